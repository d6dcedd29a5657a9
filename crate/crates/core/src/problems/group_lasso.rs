//! Group lasso as a three-objective problem:
//! `f_1 = ||Ax - y||^2`, `f_2 = ||x_age||^2`, `f_3 = ||x_lwt||^2`, each made
//! strongly convex by adding `eps ||x||^2`. Front points come from minimizing
//! the weighted sum `<w, f(x)>` for `w` on the triangle.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::dataset::RegressionDataset;
use super::descent::{steepest_descent, DescentOptions, Objective};
use super::{draw_training_set, FrontProblem};
use crate::error::{Error, Result};
use crate::fit::TrainingSet;
use crate::risk::{isk_risk_coefficients, optimal_allocation};
use crate::simplex::SimplexPoint;

pub const DEFAULT_EPS: f64 = 1e-4;

/// Absolute slack in the pairwise dominance check.
pub const DOMINANCE_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct GroupLasso {
    a: DMatrix<f64>,
    y: DVector<f64>,
    gram: DMatrix<f64>,
    aty: DVector<f64>,
    yty: f64,
    groups: [Vec<usize>; 2],
    eps: f64,
    options: DescentOptions,
}

/// Minimizer of one weighted sum.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarizationResult {
    pub w: SimplexPoint,
    pub x_star: DVector<f64>,
    pub f_tilde: [f64; 3],
    pub iterations: usize,
    pub final_gradient_norm: f64,
}

struct Scalarized<'a> {
    h: DMatrix<f64>,
    rhs: DVector<f64>,
    constant: f64,
    _problem: &'a GroupLasso,
}

impl Objective for Scalarized<'_> {
    fn value(&self, x: &DVector<f64>) -> f64 {
        x.dot(&(&self.h * x)) - 2.0 * self.rhs.dot(x) + self.constant
    }

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        2.0 * (&self.h * x - &self.rhs)
    }
}

impl GroupLasso {
    pub fn new(dataset: &RegressionDataset, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::invalid(format!("perturbation eps must be positive, got {eps}")));
        }
        let age = dataset.group("age").ok_or_else(|| Error::invalid("dataset has no age group"))?;
        let lwt = dataset.group("lwt").ok_or_else(|| Error::invalid("dataset has no lwt group"))?;
        Ok(GroupLasso {
            gram: dataset.a.tr_mul(&dataset.a),
            aty: dataset.a.tr_mul(&dataset.y),
            yty: dataset.y.norm_squared(),
            a: dataset.a.clone(),
            y: dataset.y.clone(),
            groups: [age.to_vec(), lwt.to_vec()],
            eps,
            options: DescentOptions::default(),
        })
    }

    pub fn with_options(mut self, options: DescentOptions) -> Self {
        self.options = options;
        self
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn features(&self) -> usize {
        self.a.ncols()
    }

    /// `||y||^2`, the fit objective at `x = 0`.
    pub fn response_energy(&self) -> f64 {
        self.yty
    }

    /// Perturbed objectives and their gradients (one row per objective).
    pub fn objectives(&self, x: &DVector<f64>) -> Result<([f64; 3], DMatrix<f64>)> {
        if x.len() != self.features() {
            return Err(Error::invalid(format!(
                "x has {} entries, expected {}",
                x.len(),
                self.features()
            )));
        }
        let ridge = self.eps * x.norm_squared();
        let residual = &self.a * x - &self.y;
        let mut f = [residual.norm_squared() + ridge, ridge, ridge];
        let mut grad = DMatrix::zeros(3, self.features());
        grad.row_mut(0)
            .copy_from(&(2.0 * (self.a.tr_mul(&residual) + self.eps * x)).transpose());
        for (g, cols) in self.groups.iter().enumerate() {
            let mut row = 2.0 * self.eps * x.transpose();
            for &j in cols {
                f[g + 1] += x[j] * x[j];
                row[j] += 2.0 * x[j];
            }
            grad.row_mut(g + 1).copy_from(&row);
        }
        Ok((f, grad))
    }

    /// The weighted sum `<w, f(x)>` as a quadratic objective.
    pub fn scalarized(&self, w: &SimplexPoint) -> impl Objective + '_ {
        let c = w.coords();
        let n = self.features();
        let mut h = c[0] * &self.gram + DMatrix::from_diagonal_element(n, n, self.eps);
        for (g, cols) in self.groups.iter().enumerate() {
            for &j in cols {
                h[(j, j)] += c[g + 1];
            }
        }
        Scalarized {
            h,
            rhs: c[0] * &self.aty,
            constant: c[0] * self.yty,
            _problem: self,
        }
    }

    /// `x*(w) = argmin_x <w, f(x)>` by steepest descent from `x = 0`.
    pub fn solve(&self, w: &SimplexPoint) -> Result<ScalarizationResult> {
        if w.dim() != 3 {
            return Err(Error::invalid(format!("weight has {} entries, expected 3", w.dim())));
        }
        let objective = self.scalarized(w);
        let r = steepest_descent(&objective, DVector::zeros(self.features()), &self.options)?;
        let (f_tilde, _) = self.objectives(&r.x)?;
        Ok(ScalarizationResult {
            w: w.clone(),
            x_star: r.x,
            f_tilde,
            iterations: r.iterations,
            final_gradient_norm: r.gradient_norm,
        })
    }
}

impl FrontProblem for GroupLasso {
    fn dim(&self) -> usize {
        3
    }

    fn ambient(&self) -> usize {
        3
    }

    fn observe(&self, t: &SimplexPoint, _rng: &mut dyn rand::RngCore) -> Result<Vec<f64>> {
        self.truth(t)
    }

    fn truth(&self, t: &SimplexPoint) -> Result<Vec<f64>> {
        Ok(self.solve(t)?.f_tilde.to_vec())
    }
}

/// Perturbed objectives of `dataset` at `x` and their gradients.
pub fn group_lasso_objectives(
    dataset: &RegressionDataset,
    x: &DVector<f64>,
    eps: f64,
) -> Result<([f64; 3], DMatrix<f64>)> {
    GroupLasso::new(dataset, eps)?.objectives(x)
}

/// `n` front points at weights drawn uniformly from the triangle. A
/// stratified sample splits `n` over the vertices, edges and interior by the
/// optimal degree-3 inductive skeleton allocation.
pub fn group_lasso_front_sample(
    dataset: &RegressionDataset,
    n: usize,
    stratified: bool,
    eps: f64,
    seed: u64,
) -> Result<TrainingSet> {
    let problem = GroupLasso::new(dataset, eps)?;
    let counts = if stratified && n > 0 {
        optimal_allocation(&isk_risk_coefficients(3, 3)?, n)?.per_level
    } else {
        BTreeMap::from([(1, n)])
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    draw_training_set(&problem, &counts, stratified, &mut rng)
}

/// Pairs `(i, j)` where row `i` dominates row `j`: no worse than `j` in every
/// objective up to `tol` and better by more than `tol` in at least one.
pub fn dominated_pairs(points: &DMatrix<f64>, tol: f64) -> Vec<(usize, usize)> {
    let n = points.nrows();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let a = points.row(i);
            let b = points.row(j);
            let no_worse = a.iter().zip(b.iter()).all(|(x, y)| *x <= y + tol);
            let better = a.iter().zip(b.iter()).any(|(x, y)| *x < y - tol);
            if no_worse && better {
                out.push((i, j));
            }
        }
    }
    out
}
