//! Steepest descent with a backtracking Armijo line search.

use nalgebra::DVector;

use crate::error::{Error, Result};

/// A differentiable objective on `R^n`.
pub trait Objective {
    fn value(&self, x: &DVector<f64>) -> f64;

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64>;
}

#[derive(Clone, Debug, PartialEq)]
pub struct DescentOptions {
    /// Stop once the gradient norm is at most this.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Step multiplier applied on each rejected trial step.
    pub shrink: f64,
    /// Armijo sufficient-decrease constant.
    pub slope: f64,
    /// Keep the objective value of every iterate.
    pub record_trace: bool,
}

impl Default for DescentOptions {
    fn default() -> Self {
        DescentOptions {
            tolerance: 1e-8,
            max_iterations: 100_000,
            shrink: 0.5,
            slope: 1e-4,
            record_trace: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DescentResult {
    pub x: DVector<f64>,
    pub value: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
    pub trace: Vec<f64>,
}

/// Smallest trial step before the line search gives up.
const MIN_STEP: f64 = 1e-20;

/// Minimizes `objective` from `x0` along the negative gradient.
///
/// Each line search starts from a secant estimate of the line minimizer,
/// taken from the directional derivative at twice the previous accepted step,
/// and halves until the Armijo condition holds. Near the minimizer the decrease falls
/// below the resolution of `f`; a step whose change in `f` is within rounding
/// is then accepted when the directional derivative along the new gradient
/// satisfies the approximate Wolfe test `g_new . g >= -(1 - 2 slope) |g|^2`,
/// which for a smooth function is the same sufficient-decrease requirement
/// expressed through derivatives.
pub fn steepest_descent<O: Objective + ?Sized>(
    objective: &O,
    x0: DVector<f64>,
    options: &DescentOptions,
) -> Result<DescentResult> {
    let mut x = x0;
    let mut f = objective.value(&x);
    let mut g = objective.gradient(&x);
    let mut gnorm = g.norm();
    let mut step: f64 = 1.0;
    let mut trace = Vec::new();
    if options.record_trace {
        trace.push(f);
    }
    for iteration in 0..options.max_iterations {
        if gnorm <= options.tolerance {
            return Ok(DescentResult {
                x,
                value: f,
                gradient_norm: gnorm,
                iterations: iteration,
                trace,
            });
        }
        let g2 = gnorm * gnorm;
        let rounding = 1e-12 * (1.0 + f.abs());
        let probe = (2.0 * step).min(1e10);
        let curvature = g2 - objective.gradient(&(&x - probe * &g)).dot(&g);
        let mut trial = if curvature > 0.0 { probe * g2 / curvature } else { probe };
        let accepted = loop {
            let candidate = &x - trial * &g;
            let fc = objective.value(&candidate);
            if fc <= f - options.slope * trial * g2 {
                break Some((candidate, fc, None));
            }
            if (fc - f).abs() <= rounding {
                let gc = objective.gradient(&candidate);
                if gc.dot(&g) >= -(1.0 - 2.0 * options.slope) * g2 {
                    break Some((candidate, fc, Some(gc)));
                }
            }
            trial *= options.shrink;
            if trial < MIN_STEP {
                break None;
            }
        };
        let Some((candidate, fc, gc)) = accepted else {
            return Err(Error::Convergence {
                iterations: iteration,
                gradient_norm: gnorm,
            });
        };
        step = trial;
        x = candidate;
        f = fc;
        g = gc.unwrap_or_else(|| objective.gradient(&x));
        gnorm = g.norm();
        if options.record_trace {
            trace.push(f);
        }
    }
    if gnorm <= options.tolerance {
        return Ok(DescentResult {
            x,
            value: f,
            gradient_norm: gnorm,
            iterations: options.max_iterations,
            trace,
        });
    }
    Err(Error::Convergence {
        iterations: options.max_iterations,
        gradient_norm: gnorm,
    })
}
