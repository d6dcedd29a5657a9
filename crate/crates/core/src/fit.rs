//! The two least-squares estimators of a Bezier simplex.
//!
//! *All-at-once* fitting solves one ordinary least-squares problem for every
//! control point from samples spread over the whole simplex.
//!
//! *Inductive skeleton* fitting works level by level: the vertex control
//! points are fit from vertex samples, then edge control points from edge
//! samples with the vertex contribution subtracted, and so on up to level
//! `min(M, D)`. A control point whose multi-index has more than `m` nonzero
//! entries vanishes on the level-`m` skeleton, so stage `m` only solves for
//! the control points with exactly `m` nonzero entries.

use std::collections::BTreeMap;

use nalgebra::{Cholesky, DMatrix};

use crate::bezier::{partition_by_level, BernsteinBasis, BezierSimplex};
use crate::error::{Error, Result};
use crate::simplex::SimplexPoint;

/// Normal matrices whose estimated condition number exceeds this are
/// reported as singular.
pub const MAX_CONDITION: f64 = 1e12;

/// Paired parameters and observations `(t_n, x_n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    dim: usize,
    params: Vec<SimplexPoint>,
    /// One row per observation.
    values: DMatrix<f64>,
}

impl Sample {
    pub fn new(dim: usize, params: Vec<SimplexPoint>, values: DMatrix<f64>) -> Result<Self> {
        if params.len() != values.nrows() {
            return Err(Error::invalid(format!(
                "{} parameters but {} observations",
                params.len(),
                values.nrows()
            )));
        }
        if let Some(t) = params.iter().find(|t| t.dim() != dim) {
            return Err(Error::invalid(format!(
                "parameter with {} coordinates in a sample of dimension {dim}",
                t.dim()
            )));
        }
        Ok(Sample { dim, params, values })
    }

    pub fn empty(dim: usize, ambient: usize) -> Self {
        Sample {
            dim,
            params: Vec::new(),
            values: DMatrix::zeros(0, ambient),
        }
    }

    pub fn from_pairs(dim: usize, ambient: usize, pairs: Vec<(SimplexPoint, Vec<f64>)>) -> Result<Self> {
        let mut values = DMatrix::zeros(pairs.len(), ambient);
        let mut params = Vec::with_capacity(pairs.len());
        for (n, (t, x)) in pairs.into_iter().enumerate() {
            if x.len() != ambient {
                return Err(Error::invalid(format!(
                    "observation {n} has {} components, expected {ambient}",
                    x.len()
                )));
            }
            for (l, v) in x.into_iter().enumerate() {
                values[(n, l)] = v;
            }
            params.push(t);
        }
        Sample::new(dim, params, values)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ambient(&self) -> usize {
        self.values.ncols()
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn params(&self) -> &[SimplexPoint] {
        &self.params
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    /// Same parameters with observations multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Sample {
        Sample {
            dim: self.dim,
            params: self.params.clone(),
            values: &self.values * c,
        }
    }
}

/// Training data split by skeleton level; level `m` points have at most `m`
/// nonzero coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct StratifiedSample {
    dim: usize,
    ambient: usize,
    levels: BTreeMap<usize, Sample>,
}

impl StratifiedSample {
    pub fn new(dim: usize, ambient: usize) -> Self {
        StratifiedSample {
            dim,
            ambient,
            levels: BTreeMap::new(),
        }
    }

    /// Adds `sample` at `level`, appending to any points already there.
    pub fn insert(&mut self, level: usize, sample: Sample) -> Result<()> {
        if level == 0 || level > self.dim {
            return Err(Error::invalid(format!(
                "level {level} out of range 1..={}",
                self.dim
            )));
        }
        if sample.dim() != self.dim || (!sample.is_empty() && sample.ambient() != self.ambient) {
            return Err(Error::invalid("sample dimensions do not match the stratified sample"));
        }
        if let Some(t) = sample.params().iter().find(|t| t.nonzero_count() > level) {
            return Err(Error::invalid(format!(
                "point {:?} has {} nonzero coordinates, too many for level {level}",
                t.coords(),
                t.nonzero_count()
            )));
        }
        match self.levels.get_mut(&level) {
            Some(existing) if !sample.is_empty() => {
                let mut params = existing.params.clone();
                params.extend(sample.params.iter().cloned());
                let rows = existing.len() + sample.len();
                let mut values = DMatrix::zeros(rows, self.ambient);
                values.rows_mut(0, existing.len()).copy_from(&existing.values);
                values.rows_mut(existing.len(), sample.len()).copy_from(&sample.values);
                *existing = Sample::new(self.dim, params, values)?;
            }
            Some(_) => {}
            None => {
                self.levels.insert(level, sample);
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn level(&self, m: usize) -> Option<&Sample> {
        self.levels.get(&m)
    }

    pub fn levels(&self) -> &BTreeMap<usize, Sample> {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.values().map(Sample::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn counts(&self) -> BTreeMap<usize, usize> {
        self.levels.iter().map(|(&m, s)| (m, s.len())).collect()
    }

    /// Merges all levels into one unstratified sample.
    pub fn flatten(&self) -> Sample {
        let n = self.len();
        let mut params = Vec::with_capacity(n);
        let mut values = DMatrix::zeros(n, self.ambient);
        let mut row = 0;
        for s in self.levels.values() {
            params.extend(s.params.iter().cloned());
            values.rows_mut(row, s.len()).copy_from(&s.values);
            row += s.len();
        }
        Sample {
            dim: self.dim,
            params,
            values,
        }
    }
}

/// Either kind of training data.
#[derive(Clone, Debug, PartialEq)]
pub enum TrainingSet {
    Plain(Sample),
    Stratified(StratifiedSample),
}

impl TrainingSet {
    pub fn len(&self) -> usize {
        match self {
            TrainingSet::Plain(s) => s.len(),
            TrainingSet::Stratified(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Returns `G^{-1} B` for a symmetric positive definite `G` via Cholesky.
pub fn solve_normal_equations(gram: &DMatrix<f64>, rhs: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !gram.is_square() || gram.nrows() != rhs.nrows() {
        return Err(Error::invalid(format!(
            "normal matrix is {}x{}, right-hand side has {} rows",
            gram.nrows(),
            gram.ncols(),
            rhs.nrows()
        )));
    }
    let scale = gram.amax().max(f64::MIN_POSITIVE);
    for i in 0..gram.nrows() {
        for j in 0..i {
            if (gram[(i, j)] - gram[(j, i)]).abs() > 1e-12 * scale {
                return Err(Error::invalid("normal matrix is not symmetric"));
            }
        }
    }
    let chol = Cholesky::new(gram.clone()).ok_or_else(|| Error::SingularDesign {
        level: None,
        reason: "normal matrix is not positive definite".into(),
    })?;
    let diag = chol.l_dirty().diagonal();
    let (lo, hi) = diag
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let condition = (hi / lo).powi(2);
    if !condition.is_finite() || condition > MAX_CONDITION {
        return Err(Error::SingularDesign {
            level: None,
            reason: format!("condition estimate {condition:.3e} exceeds {MAX_CONDITION:e}"),
        });
    }
    Ok(chol.solve(rhs))
}

fn least_squares(z: &DMatrix<f64>, x: &DMatrix<f64>, level: Option<usize>) -> Result<DMatrix<f64>> {
    if z.nrows() < z.ncols() {
        return Err(Error::SingularDesign {
            level,
            reason: format!("{} samples for {} unknown control points", z.nrows(), z.ncols()),
        });
    }
    let gram = z.tr_mul(z);
    let rhs = z.tr_mul(x);
    solve_normal_equations(&gram, &rhs).map_err(|e| match e {
        Error::SingularDesign { reason, .. } => Error::SingularDesign { level, reason },
        other => other,
    })
}

/// All-at-once estimator: `argmin_P ||X - Z P||_F^2` over every control point.
pub fn fit_all_at_once(sample: &Sample, degree: u32) -> Result<BezierSimplex> {
    let basis = BernsteinBasis::new(sample.dim(), degree)?;
    let z = basis.design_matrix(sample.params())?;
    let p = least_squares(&z, sample.values(), None)?;
    BezierSimplex::with_basis(basis, p)
}

/// Inductive skeleton estimator. Levels above `min(M, D)` carry no control
/// points and any samples there are ignored.
pub fn fit_inductive_skeleton(sample: &StratifiedSample, degree: u32) -> Result<BezierSimplex> {
    fit_inductive_skeleton_levels(sample, degree, usize::MAX)
}

/// Runs the inductive stages `1..=min(max_level, M, D)` only; control points of
/// the remaining levels stay zero.
pub fn fit_inductive_skeleton_levels(
    sample: &StratifiedSample,
    degree: u32,
    max_level: usize,
) -> Result<BezierSimplex> {
    if degree == 0 {
        return Err(Error::invalid(
            "inductive skeleton fitting needs degree at least 1",
        ));
    }
    let basis = BernsteinBasis::new(sample.dim(), degree)?;
    let parts = partition_by_level(basis.lattice());
    let top = sample.dim().min(degree as usize).min(max_level);
    let mut p = DMatrix::zeros(basis.len(), sample.ambient());
    let mut fixed: Vec<usize> = Vec::new();

    for m in 1..=top {
        let level = sample
            .level(m)
            .filter(|s| !s.is_empty())
            .ok_or(Error::InsufficientStrata { level: m })?;
        let z = basis.design_matrix(level.params())?;
        let mut target = level.values().clone();
        if !fixed.is_empty() {
            let z_fixed = z.select_columns(&fixed);
            let p_fixed = p.select_rows(&fixed);
            target -= z_fixed * p_fixed;
        }
        let cols = &parts[&m];
        let z_m = z.select_columns(cols);
        let p_m = least_squares(&z_m, &target, Some(m))?;
        for (k, &row) in cols.iter().enumerate() {
            p.row_mut(row).copy_from(&p_m.row(k));
        }
        fixed.extend_from_slice(cols);
        fixed.sort_unstable();
    }
    BezierSimplex::with_basis(basis, p)
}

/// `||Z^T (X - Z P)||_inf` relative to the magnitude of `|Z|^T |X|`.
/// Zero (up to rounding) at the least-squares optimum.
pub fn residual_orthogonality(sample: &Sample, model: &BezierSimplex) -> Result<f64> {
    let z = model.basis().design_matrix(sample.params())?;
    Ok(relative_orthogonality(&z, sample.values(), model.control_points()))
}

/// Per-level residual orthogonality of an inductive skeleton fit, measured
/// against the level-`m` basis columns only.
pub fn level_residual_orthogonality(
    sample: &StratifiedSample,
    model: &BezierSimplex,
) -> Result<BTreeMap<usize, f64>> {
    let parts = partition_by_level(model.lattice());
    let top = model.dim().min(model.degree() as usize);
    let mut out = BTreeMap::new();
    for m in 1..=top {
        let Some(level) = sample.level(m) else { continue };
        let z = model.basis().design_matrix(level.params())?;
        let residual = level.values() - &z * model.control_points();
        let z_m = z.select_columns(&parts[&m]);
        let grad = z_m.tr_mul(&residual);
        let scale = z_m.abs().tr_mul(&level.values().abs()).amax().max(1.0);
        out.insert(m, grad.amax() / scale);
    }
    Ok(out)
}

fn relative_orthogonality(z: &DMatrix<f64>, x: &DMatrix<f64>, p: &DMatrix<f64>) -> f64 {
    let residual = x - z * p;
    let grad = z.tr_mul(&residual);
    let scale = z.abs().tr_mul(&x.abs()).amax().max(1.0);
    grad.amax() / scale
}

/// Mean squared training loss `(1/N) ||X - Z P||_F^2`.
pub fn training_loss(sample: &Sample, model: &BezierSimplex) -> Result<f64> {
    let z = model.basis().design_matrix(sample.params())?;
    let residual = sample.values() - z * model.control_points();
    Ok(residual.norm_squared() / sample.len().max(1) as f64)
}
