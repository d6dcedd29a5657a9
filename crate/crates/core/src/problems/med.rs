//! The generalized location problem with three objectives
//! `f_m(x) = ||x - e_m||^2` on `R^4`. Its Pareto set is the triangle spanned by
//! `e_1, e_2, e_3`, and the front is a degree-2 Bezier triangle.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{draw_training_set, FrontProblem};
use crate::error::{Error, Result};
use crate::fit::TrainingSet;
use crate::risk::{isk_risk_coefficients, optimal_allocation};
use crate::simplex::SimplexPoint;

/// Objective values at the Pareto optimal `x = t_1 e_1 + t_2 e_2 + t_3 e_3`:
/// `f_m = (t_m - 1)^2 + sum_{j != m} t_j^2`.
pub fn med_front_point(t: &SimplexPoint) -> Result<[f64; 3]> {
    if t.dim() != 3 {
        return Err(Error::invalid(format!(
            "the location problem front is a triangle, got a point with {} coordinates",
            t.dim()
        )));
    }
    let c = t.coords();
    let squares: f64 = c.iter().map(|v| v * v).sum();
    Ok([0, 1, 2].map(|m| squares - c[m] * c[m] + (c[m] - 1.0).powi(2)))
}

/// Front samples of the location problem with optional Gaussian noise on the
/// training observations.
#[derive(Clone, Debug)]
pub struct Med {
    noise: Option<Normal<f64>>,
}

impl Med {
    pub fn new(noise_sd: f64) -> Result<Self> {
        if !(noise_sd >= 0.0 && noise_sd.is_finite()) {
            return Err(Error::invalid(format!("noise level must be non-negative, got {noise_sd}")));
        }
        let noise = (noise_sd > 0.0).then(|| Normal::new(0.0, noise_sd).expect("valid normal"));
        Ok(Med { noise })
    }

    pub fn exact() -> Self {
        Med { noise: None }
    }
}

impl FrontProblem for Med {
    fn dim(&self) -> usize {
        3
    }

    fn ambient(&self) -> usize {
        3
    }

    fn observe(&self, t: &SimplexPoint, rng: &mut dyn rand::RngCore) -> Result<Vec<f64>> {
        let mut f = med_front_point(t)?.to_vec();
        if let Some(noise) = &self.noise {
            for v in &mut f {
                *v += noise.sample(rng);
            }
        }
        Ok(f)
    }

    fn truth(&self, t: &SimplexPoint) -> Result<Vec<f64>> {
        Ok(med_front_point(t)?.to_vec())
    }
}

/// `n` exact front points. A stratified sample splits `n` by the optimal
/// degree-2 inductive skeleton allocation.
pub fn med_sample(n: usize, stratified: bool, seed: u64) -> Result<TrainingSet> {
    let counts = if stratified && n > 0 {
        optimal_allocation(&isk_risk_coefficients(3, 2)?, n)?.per_level
    } else {
        BTreeMap::from([(1, n)])
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    draw_training_set(&Med::exact(), &counts, stratified, &mut rng)
}
