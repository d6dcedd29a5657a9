//! The affine benchmark: a degree-`D` Bezier simplex tracing the unit simplex
//! spanned by `e_1, ..., e_M` in `R^L`, observed with isotropic Gaussian noise.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{draw_training_set, FrontProblem};
use crate::bezier::BezierSimplex;
use crate::error::{Error, Result};
use crate::fit::TrainingSet;
use crate::risk::{isk_risk_coefficients, optimal_allocation};
use crate::simplex::SimplexPoint;

/// Training sample sizes: a single total or one size per skeleton level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleSizes {
    Total(usize),
    PerLevel(BTreeMap<usize, usize>),
}

impl SampleSizes {
    pub fn total(&self) -> usize {
        match self {
            SampleSizes::Total(n) => *n,
            SampleSizes::PerLevel(c) => c.values().sum(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    #[serde(rename = "L")]
    pub ambient: usize,
    #[serde(rename = "M")]
    pub dim: usize,
    #[serde(rename = "D")]
    pub degree: u32,
    pub sigma: f64,
    pub sizes: SampleSizes,
    pub seed: u64,
}

/// Noisy observations of the unit-simplex model.
#[derive(Clone, Debug)]
pub struct Synthetic {
    truth: BezierSimplex,
    noise: Normal<f64>,
}

impl Synthetic {
    pub fn new(ambient: usize, dim: usize, degree: u32, sigma: f64) -> Result<Self> {
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::invalid(format!("noise level must be non-negative, got {sigma}")));
        }
        Ok(Synthetic {
            truth: BezierSimplex::unit_simplex(dim, degree, ambient)?,
            noise: Normal::new(0.0, sigma).map_err(|e| Error::invalid(e.to_string()))?,
        })
    }

    pub fn truth_model(&self) -> &BezierSimplex {
        &self.truth
    }

    pub fn sigma(&self) -> f64 {
        self.noise.std_dev()
    }
}

impl FrontProblem for Synthetic {
    fn dim(&self) -> usize {
        self.truth.dim()
    }

    fn ambient(&self) -> usize {
        self.truth.ambient()
    }

    fn observe(&self, t: &SimplexPoint, rng: &mut dyn rand::RngCore) -> Result<Vec<f64>> {
        let mut x = self.truth.evaluate(t)?;
        if self.sigma() > 0.0 {
            for v in &mut x {
                *v += self.noise.sample(rng);
            }
        }
        Ok(x)
    }

    fn truth(&self, t: &SimplexPoint) -> Result<Vec<f64>> {
        self.truth.evaluate(t)
    }

    fn truth_many(&self, params: &[SimplexPoint]) -> Result<nalgebra::DMatrix<f64>> {
        self.truth.evaluate_many(params)
    }
}

/// Draws a training set from `spec`. A stratified draw with a single total
/// splits it by the optimal inductive skeleton allocation; an unstratified
/// draw with per-level sizes uses their total.
pub fn synthetic_training_set(spec: &SyntheticSpec, stratified: bool) -> Result<TrainingSet> {
    let problem = Synthetic::new(spec.ambient, spec.dim, spec.degree, spec.sigma)?;
    let counts = match (&spec.sizes, stratified) {
        (SampleSizes::Total(n), true) => {
            let model = isk_risk_coefficients(spec.dim, spec.degree)?;
            optimal_allocation(&model, *n)?.per_level
        }
        (SampleSizes::Total(n), false) => BTreeMap::from([(0, *n)]),
        (SampleSizes::PerLevel(c), _) => c.clone(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    draw_training_set(&problem, &counts, stratified, &mut rng)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(sigma: f64, sizes: SampleSizes) -> SyntheticSpec {
        SyntheticSpec {
            ambient: 5,
            dim: 3,
            degree: 2,
            sigma,
            sizes,
            seed: 4,
        }
    }

    #[test]
    fn noiseless_points_lie_on_the_unit_simplex() {
        let TrainingSet::Plain(s) = synthetic_training_set(&spec(0.0, SampleSizes::Total(50)), false).unwrap() else {
            panic!("expected a plain sample");
        };
        for (n, t) in s.params().iter().enumerate() {
            for l in 0..5 {
                let expect = t.coords().get(l).copied().unwrap_or(0.0);
                assert!((s.values()[(n, l)] - expect).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn stratified_sizes() {
        let counts = BTreeMap::from([(1, 7), (2, 11)]);
        let TrainingSet::Stratified(s) =
            synthetic_training_set(&spec(0.1, SampleSizes::PerLevel(counts.clone())), true).unwrap()
        else {
            panic!("expected a stratified sample");
        };
        assert_eq!(s.counts(), counts);

        let TrainingSet::Stratified(s) = synthetic_training_set(&spec(0.1, SampleSizes::Total(100)), true).unwrap()
        else {
            panic!("expected a stratified sample");
        };
        let model = isk_risk_coefficients(3, 2).unwrap();
        assert_eq!(s.counts(), optimal_allocation(&model, 100).unwrap().per_level);
    }

    #[test]
    fn deterministic_per_seed() {
        let a = synthetic_training_set(&spec(0.3, SampleSizes::Total(20)), false).unwrap();
        let b = synthetic_training_set(&spec(0.3, SampleSizes::Total(20)), false).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_negative_noise() {
        assert!(Synthetic::new(3, 3, 2, -1.0).is_err());
    }
}
