//! Bezier simplex fitting of Pareto fronts.
//!
//! Two estimators of the control points are provided: all-at-once least
//! squares over the whole simplex and the inductive skeleton estimator that
//! fits faces of increasing dimension in turn. The [`risk`] module gives their
//! asymptotic risks and the skeleton sample allocation that minimizes the
//! inductive one. [`problems`] and [`experiment`] reproduce the benchmark
//! studies.

pub mod bezier;
pub mod error;
pub mod experiment;
pub mod fit;
pub mod problems;
pub mod risk;
pub mod sample_csv;
pub mod simplex;

pub use bezier::{BernsteinBasis, BezierSimplex};
pub use error::{Error, Result};
pub use fit::{fit_all_at_once, fit_inductive_skeleton, Sample, StratifiedSample, TrainingSet};
pub use simplex::{MultiIndex, SimplexPoint, SubsimplexMask};
