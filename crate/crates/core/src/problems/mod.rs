//! Benchmark problems whose Pareto fronts are fit by Bezier simplices.
//!
//! Every problem maps a simplex parameter `t` to a point of its front through
//! [`FrontProblem`]. Training observations may carry noise while
//! [`FrontProblem::truth`] is the noiseless front used for scoring.

mod dataset;
mod descent;
mod group_lasso;
mod med;
mod synthetic;

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{Error, Result};
use crate::fit::{Sample, StratifiedSample, TrainingSet};
use crate::simplex::{enumerate_subsimplices, sample_subsimplex, sample_uniform_simplex, SimplexPoint, SubsimplexMask};

pub use dataset::{birthwt, load_regression_dataset, parse_regression_dataset, RegressionDataset, BIRTHWT_ROWS};
pub use descent::{steepest_descent, DescentOptions, DescentResult, Objective};
pub use group_lasso::{
    dominated_pairs, group_lasso_front_sample, group_lasso_objectives, GroupLasso, ScalarizationResult,
    DEFAULT_EPS, DOMINANCE_TOLERANCE,
};
pub use med::{med_front_point, med_sample, Med};
pub use synthetic::{synthetic_training_set, SampleSizes, Synthetic, SyntheticSpec};

/// Draws of a front attempted per point before giving up.
pub const MAX_ATTEMPTS: usize = 10;

/// A problem whose Pareto front is parametrized by the `(M-1)`-simplex.
pub trait FrontProblem: Sync {
    /// `M`.
    fn dim(&self) -> usize;

    /// `L`.
    fn ambient(&self) -> usize;

    /// Training observation at `t`, possibly noisy.
    fn observe(&self, t: &SimplexPoint, rng: &mut dyn rand::RngCore) -> Result<Vec<f64>>;

    /// Noiseless front point at `t`.
    fn truth(&self, t: &SimplexPoint) -> Result<Vec<f64>>;

    /// Noiseless front points, one row per parameter.
    fn truth_many(&self, params: &[SimplexPoint]) -> Result<DMatrix<f64>> {
        let mut out = DMatrix::zeros(params.len(), self.ambient());
        for (n, t) in params.iter().enumerate() {
            for (l, v) in self.truth(t)?.into_iter().enumerate() {
                out[(n, l)] = v;
            }
        }
        Ok(out)
    }
}

fn observe_with_retries<P, R, F>(problem: &P, rng: &mut R, mut draw: F) -> Result<(SimplexPoint, Vec<f64>)>
where
    P: FrontProblem + ?Sized,
    R: Rng,
    F: FnMut(&mut R) -> SimplexPoint,
{
    let mut last = None;
    for _ in 0..MAX_ATTEMPTS {
        let t = draw(rng);
        match problem.observe(&t, rng) {
            Ok(x) => return Ok((t, x)),
            Err(e) if e.is_numerical() => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

/// `n` observations at parameters uniform on the whole simplex. A parameter
/// whose observation fails numerically is redrawn up to [`MAX_ATTEMPTS`]
/// times.
pub fn draw_sample<P, R>(problem: &P, n: usize, rng: &mut R) -> Result<Sample>
where
    P: FrontProblem + ?Sized,
    R: Rng,
{
    let dim = problem.dim();
    let pairs = (0..n)
        .map(|_| observe_with_retries(problem, rng, |r| sample_uniform_simplex(dim, r)))
        .collect::<Result<Vec<_>>>()?;
    Sample::from_pairs(dim, problem.ambient(), pairs)
}

/// Observations on the skeletons, `counts[m]` of them at level `m`. Points of
/// a level are spread round-robin over its faces and redrawn on the same face
/// when an observation fails.
pub fn draw_stratified<P, R>(problem: &P, counts: &BTreeMap<usize, usize>, rng: &mut R) -> Result<StratifiedSample>
where
    P: FrontProblem + ?Sized,
    R: Rng,
{
    let dim = problem.dim();
    let mut out = StratifiedSample::new(dim, problem.ambient());
    for (&level, &n) in counts {
        let faces: Vec<SubsimplexMask> = enumerate_subsimplices(dim, level)?;
        let pairs = (0..n)
            .map(|i| {
                let face = &faces[i % faces.len()];
                observe_with_retries(problem, rng, |r| sample_subsimplex(face, 1, r).remove(0))
            })
            .collect::<Result<Vec<_>>>()?;
        out.insert(level, Sample::from_pairs(dim, problem.ambient(), pairs)?)?;
    }
    Ok(out)
}

/// Either [`draw_sample`] with the total of `counts` or [`draw_stratified`].
pub fn draw_training_set<P, R>(
    problem: &P,
    counts: &BTreeMap<usize, usize>,
    stratified: bool,
    rng: &mut R,
) -> Result<TrainingSet>
where
    P: FrontProblem + ?Sized,
    R: Rng,
{
    if stratified {
        if counts.keys().any(|&m| m == 0) {
            return Err(Error::invalid("stratified sizes must be keyed by levels 1..=M"));
        }
        draw_stratified(problem, counts, rng).map(TrainingSet::Stratified)
    } else {
        draw_sample(problem, counts.values().sum(), rng).map(TrainingSet::Plain)
    }
}
