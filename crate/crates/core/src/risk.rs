//! Asymptotic risk of the two estimators and the optimal skeleton allocation.
//!
//! For `N` training points, the all-at-once risk is `sigma^2 L C(D+M-1, D) / N`.
//! The inductive skeleton risk has the form `sigma^2 L sum_m c_m / N_m` where
//! `N_m` is the number of level-`m` samples. The coefficients `c_m` come from
//! contracting the second moment of the estimated control points against the
//! moment matrix `Sigma` of the Bernstein basis.
//!
//! Levels follow the crate-wide convention: level `m` is the union of the
//! `(m-1)`-dimensional faces (`m = 1` are the vertices).

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::bezier::partition_by_level;
use crate::error::{Error, Result};
use crate::simplex::{binomial, enumerate_lattice, enumerate_subsimplices, factorial, multinomial, MultiIndex};

fn check_exponents(dim: usize, q: &[u32]) -> Result<()> {
    if dim == 0 {
        return Err(Error::invalid("simplex dimension must be at least 1"));
    }
    if q.len() != dim {
        return Err(Error::invalid(format!(
            "exponent vector has {} entries, expected {dim}",
            q.len()
        )));
    }
    Ok(())
}

/// `a! * prod(q_i!) / b!` computed exactly when the factorials fit in `u128`.
fn factorial_ratio(a: u32, q: &[u32], b: u32) -> f64 {
    let exact = || -> Option<f64> {
        let mut num = factorial(a)?;
        for &x in q {
            num = num.checked_mul(factorial(x)?)?;
        }
        let den = factorial(b)?;
        Some(num as f64 / den as f64)
    };
    exact().unwrap_or_else(|| {
        let ln = |n: u32| ln_gamma(n as f64 + 1.0);
        (ln(a) + q.iter().map(|&x| ln(x)).sum::<f64>() - ln(b)).exp()
    })
}

/// `E[t^q]` for `t` uniform on the `(M-1)`-simplex:
/// `(M-1)! prod(q_i!) / (Q + M - 1)!`.
pub fn simplex_moment(dim: usize, q: &[u32]) -> Result<f64> {
    check_exponents(dim, q)?;
    let total: u32 = q.iter().sum();
    Ok(factorial_ratio(dim as u32 - 1, q, total + dim as u32 - 1))
}

/// `E[t^q]` for `t` uniform on the level-`m` skeleton, i.e. a face chosen
/// uniformly among the `C(M, m)` faces with `m` vertices, then a point uniform
/// on that face. Faces that miss a coordinate where `q` is positive contribute
/// zero.
pub fn skeleton_moment(dim: usize, level: usize, q: &[u32]) -> Result<f64> {
    check_exponents(dim, q)?;
    if level == 0 || level > dim {
        return Err(Error::invalid(format!("level {level} out of range 1..={dim}")));
    }
    let support: Vec<usize> = (0..dim).filter(|&i| q[i] > 0).collect();
    if support.len() > level {
        return Ok(0.0);
    }
    let faces = enumerate_subsimplices(dim, level)?;
    let mut total = 0.0;
    for face in &faces {
        if support.iter().all(|&i| face.bits()[i]) {
            let restricted: Vec<u32> = face.support().iter().map(|&i| q[i]).collect();
            total += simplex_moment(level, &restricted)?;
        }
    }
    Ok(total / faces.len() as f64)
}

/// Second-moment matrix `Sigma_AB = E[b_A(t) b_B(t)]` of the Bernstein basis
/// under the uniform distribution, in canonical lattice order.
#[derive(Clone, Debug, PartialEq)]
pub struct SigmaMatrix {
    dim: usize,
    degree: u32,
    lattice: Vec<MultiIndex>,
    entries: DMatrix<f64>,
}

impl SigmaMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn lattice(&self) -> &[MultiIndex] {
        &self.lattice
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn inverse(&self) -> Result<DMatrix<f64>> {
        let n = self.entries.nrows();
        crate::fit::solve_normal_equations(&self.entries, &DMatrix::identity(n, n))
    }
}

fn checked_multinomial(degree: u32, d: &MultiIndex) -> Result<f64> {
    Ok(multinomial(degree, d)? as f64)
}

/// `Sigma` as `multinomial(D, d_A) multinomial(D, d_B) E[t^(d_A + d_B)]`.
pub fn sigma_matrix(dim: usize, degree: u32) -> Result<SigmaMatrix> {
    let lattice = enumerate_lattice(dim, degree)?;
    let coef: Vec<f64> = lattice
        .iter()
        .map(|d| checked_multinomial(degree, d))
        .collect::<Result<_>>()?;
    let n = lattice.len();
    let mut entries = DMatrix::zeros(n, n);
    for a in 0..n {
        for b in a..n {
            let q = lattice[a].add(&lattice[b]);
            let v = coef[a] * coef[b] * simplex_moment(dim, q.entries())?;
            entries[(a, b)] = v;
            entries[(b, a)] = v;
        }
    }
    Ok(SigmaMatrix {
        dim,
        degree,
        lattice,
        entries,
    })
}

/// `Sigma` from the closed form
/// `(2D)! (M-1)! / (2D+M-1)! * C(D; d_A) C(D; d_B) / C(2D; d_A + d_B)`.
pub fn sigma_matrix_closed_form(dim: usize, degree: u32) -> Result<DMatrix<f64>> {
    if dim == 0 {
        return Err(Error::invalid("simplex dimension must be at least 1"));
    }
    let lattice = enumerate_lattice(dim, degree)?;
    let lead = factorial_ratio(2 * degree, &[dim as u32 - 1], 2 * degree + dim as u32 - 1);
    let n = lattice.len();
    let mut out = DMatrix::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            let q = lattice[a].add(&lattice[b]);
            out[(a, b)] = lead * checked_multinomial(degree, &lattice[a])? * checked_multinomial(degree, &lattice[b])?
                / checked_multinomial(2 * degree, &q)?;
        }
    }
    Ok(out)
}

/// Generic risk contraction `sum_AB Sigma_AB S_AB` for a second-moment matrix
/// `S` of the estimated control points.
pub fn risk_contraction(sigma: &SigmaMatrix, second_moment: &DMatrix<f64>) -> Result<f64> {
    if second_moment.shape() != sigma.entries.shape() {
        return Err(Error::invalid(format!(
            "second moment is {:?}, Sigma is {:?}",
            second_moment.shape(),
            sigma.entries.shape()
        )));
    }
    Ok(sigma.entries.component_mul(second_moment).sum())
}

/// `sum_AB Sigma_AB (Sigma^{-1})_AB`, which equals `C(D+M-1, D)`.
pub fn hadamard_identity_check(dim: usize, degree: u32) -> Result<f64> {
    let sigma = sigma_matrix(dim, degree)?;
    let inv = sigma.inverse()?;
    risk_contraction(&sigma, &inv)
}

/// `sigma^2 L C(D+M-1, D) / N`.
pub fn aao_risk(dim: usize, degree: u32, sigma2_l: f64, n: usize) -> Result<f64> {
    if dim == 0 {
        return Err(Error::invalid("simplex dimension must be at least 1"));
    }
    if n == 0 {
        return Err(Error::invalid("sample size must be positive"));
    }
    let k = binomial(degree as u64 + dim as u64 - 1, degree as u64)
        .ok_or_else(|| Error::invalid("lattice size overflows"))?;
    Ok(sigma2_l * k as f64 / n as f64)
}

/// Block `Lambda^{(m)[k]}` with rows indexed by the level-`m` lattice points and
/// columns by the level-`k` points, both in canonical order.
#[derive(Clone, Debug, PartialEq)]
pub struct LambdaMatrix {
    pub m: usize,
    pub k: usize,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub entries: DMatrix<f64>,
}

struct LevelMoments {
    dim: usize,
    degree: u32,
    lattice: Vec<MultiIndex>,
    coef: Vec<f64>,
    levels: BTreeMap<usize, Vec<usize>>,
}

impl LevelMoments {
    fn new(dim: usize, degree: u32) -> Result<Self> {
        let lattice = enumerate_lattice(dim, degree)?;
        let coef = lattice
            .iter()
            .map(|d| checked_multinomial(degree, d))
            .collect::<Result<_>>()?;
        let levels = partition_by_level(&lattice);
        Ok(LevelMoments {
            dim,
            degree,
            lattice,
            coef,
            levels,
        })
    }

    fn top(&self) -> usize {
        self.dim.min(self.degree as usize)
    }

    fn lambda(&self, m: usize, k: usize) -> Result<LambdaMatrix> {
        let top = self.top();
        if k == 0 || k > m || m > top {
            return Err(Error::invalid(format!(
                "need 1 <= k <= m <= {top}, got m={m}, k={k}"
            )));
        }
        let rows = self.levels[&m].clone();
        let cols = self.levels[&k].clone();
        let mut entries = DMatrix::zeros(rows.len(), cols.len());
        for (i, &a) in rows.iter().enumerate() {
            for (j, &b) in cols.iter().enumerate() {
                let q = self.lattice[a].add(&self.lattice[b]);
                entries[(i, j)] = self.coef[a] * self.coef[b] * skeleton_moment(self.dim, m, q.entries())?;
            }
        }
        Ok(LambdaMatrix { m, k, rows, cols, entries })
    }
}

/// `Lambda^{(m)[k]}` for `1 <= k <= m <= min(M, D)`.
pub fn lambda_matrix(dim: usize, degree: u32, m: usize, k: usize) -> Result<LambdaMatrix> {
    LevelMoments::new(dim, degree)?.lambda(m, k)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RiskKind {
    Aao,
    Isk,
}

/// Asymptotic risk as a function of the sample sizes.
///
/// For `Aao` the single coefficient is stored under level 0 and the risk is
/// `scale * c / N`; for `Isk` it is `scale * sum_m c_m / N_m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RiskModel {
    pub kind: RiskKind,
    pub dim: usize,
    pub degree: u32,
    pub coefficients: BTreeMap<usize, f64>,
    pub scale: f64,
}

impl RiskModel {
    /// Sets the `sigma^2 L` multiplier.
    pub fn with_scale(mut self, sigma2_l: f64) -> Self {
        self.scale = sigma2_l;
        self
    }

    /// Levels carrying a coefficient (just `[0]` for the all-at-once model).
    pub fn levels(&self) -> Vec<usize> {
        self.coefficients.keys().copied().collect()
    }

    /// Risk at the given sample sizes; for `Aao` the sizes are summed.
    /// A level with a coefficient but no samples has infinite risk.
    pub fn risk_at(&self, counts: &BTreeMap<usize, usize>) -> f64 {
        match self.kind {
            RiskKind::Aao => {
                let n: usize = counts.values().sum();
                self.scale * self.coefficients[&0] / n as f64
            }
            RiskKind::Isk => self
                .coefficients
                .iter()
                .map(|(m, c)| c / counts.get(m).copied().unwrap_or(0) as f64)
                .sum::<f64>()
                * self.scale,
        }
    }

    /// Risk at real-valued sample sizes.
    pub fn risk_at_continuous(&self, sizes: &BTreeMap<usize, f64>) -> f64 {
        match self.kind {
            RiskKind::Aao => self.scale * self.coefficients[&0] / sizes.values().sum::<f64>(),
            RiskKind::Isk => self
                .coefficients
                .iter()
                .map(|(m, c)| c / sizes.get(m).copied().unwrap_or(0.0))
                .sum::<f64>()
                * self.scale,
        }
    }
}

/// All-at-once model with coefficient `C(D+M-1, D)` and unit scale.
pub fn aao_risk_model(dim: usize, degree: u32) -> Result<RiskModel> {
    let c = aao_risk(dim, degree, 1.0, 1)?;
    Ok(RiskModel {
        kind: RiskKind::Aao,
        dim,
        degree,
        coefficients: BTreeMap::from([(0, c)]),
        scale: 1.0,
    })
}

/// Inductive skeleton coefficients `c_m` for levels `1..=min(M, D)` with unit
/// scale.
///
/// The level-`m` noise enters the control points through
/// `V_m Lambda_(m) Z_m^T eps_m`, where `V_m` stacks the propagation operators
/// `U_{i,m} = -Lambda_(i) sum_{m <= k < i} Lambda^{(i)[k]} U_{k,m}` with
/// `U_{m,m} = I`. Hence `c_m = sum(Sigma o V_m Lambda_(m) V_m^T)`.
pub fn isk_risk_coefficients(dim: usize, degree: u32) -> Result<RiskModel> {
    if dim == 0 {
        return Err(Error::invalid("simplex dimension must be at least 1"));
    }
    if degree == 0 {
        return Err(Error::invalid("inductive skeleton fitting needs degree at least 1"));
    }
    let lm = LevelMoments::new(dim, degree)?;
    let sigma = sigma_matrix(dim, degree)?;
    let top = lm.top();

    let mut lambda = BTreeMap::new();
    for m in 1..=top {
        for k in 1..=m {
            lambda.insert((m, k), lm.lambda(m, k)?);
        }
    }
    let mut lambda_inv = BTreeMap::new();
    for m in 1..=top {
        let block = &lambda[&(m, m)].entries;
        let inv = crate::fit::solve_normal_equations(block, &DMatrix::identity(block.nrows(), block.nrows()))
            .map_err(|e| match e {
                Error::SingularDesign { reason, .. } => Error::SingularDesign { level: Some(m), reason },
                other => other,
            })?;
        lambda_inv.insert(m, inv);
    }

    let n = lm.lattice.len();
    let mut coefficients = BTreeMap::new();
    for m in 1..=top {
        let width = lm.levels[&m].len();
        let mut u: BTreeMap<usize, DMatrix<f64>> = BTreeMap::new();
        u.insert(m, DMatrix::identity(width, width));
        for i in m + 1..=top {
            let mut acc = DMatrix::zeros(lm.levels[&i].len(), width);
            for k in m..i {
                acc += &lambda[&(i, k)].entries * &u[&k];
            }
            u.insert(i, -(&lambda_inv[&i] * acc));
        }
        let mut v = DMatrix::zeros(n, width);
        for (i, block) in &u {
            for (r, &row) in lm.levels[i].iter().enumerate() {
                v.row_mut(row).copy_from(&block.row(r));
            }
        }
        let second = &v * &lambda_inv[&m] * v.transpose();
        coefficients.insert(m, risk_contraction(&sigma, &second)?);
    }
    Ok(RiskModel {
        kind: RiskKind::Isk,
        dim,
        degree,
        coefficients,
        scale: 1.0,
    })
}

/// Sample sizes per level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Allocation {
    pub total: usize,
    /// Integer sizes used for sampling; they sum to `total`.
    pub per_level: BTreeMap<usize, usize>,
    /// Continuous fractions of `total`.
    pub fractions: BTreeMap<usize, f64>,
    /// Risk at the continuous sizes `total * fractions`.
    pub minimized_risk: f64,
    /// Risk at the integer sizes.
    pub integer_risk: f64,
}

/// Largest-remainder rounding of `total * fractions`; ties go to the higher
/// level. Every level ends up with at least one sample when `total` allows.
fn round_allocation(total: usize, fractions: &BTreeMap<usize, f64>) -> BTreeMap<usize, usize> {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    let mut remainders = Vec::new();
    for (&m, &f) in fractions {
        let exact = f * total as f64;
        let base = exact.floor() as usize;
        counts.insert(m, base);
        remainders.push((exact - base as f64, m));
    }
    let assigned: usize = counts.values().sum();
    remainders.sort_by(|a, b| b.0.total_cmp(&a.0).then(b.1.cmp(&a.1)));
    for &(_, m) in remainders.iter().take(total.saturating_sub(assigned)) {
        *counts.get_mut(&m).unwrap() += 1;
    }
    let empty: Vec<usize> = counts.iter().filter(|(_, &c)| c == 0).map(|(&m, _)| m).collect();
    for m in empty {
        let (&donor, _) = counts.iter().max_by_key(|(&l, &c)| (c, l)).unwrap();
        if counts[&donor] <= 1 {
            break;
        }
        *counts.get_mut(&donor).unwrap() -= 1;
        *counts.get_mut(&m).unwrap() += 1;
    }
    counts
}

fn allocation_from_fractions(model: &RiskModel, total: usize, fractions: BTreeMap<usize, f64>) -> Allocation {
    let per_level = round_allocation(total, &fractions);
    let continuous: BTreeMap<usize, f64> = fractions.iter().map(|(&m, &f)| (m, f * total as f64)).collect();
    Allocation {
        total,
        minimized_risk: model.risk_at_continuous(&continuous),
        integer_risk: model.risk_at(&per_level),
        per_level,
        fractions,
    }
}

fn require_isk(model: &RiskModel, total: usize) -> Result<()> {
    if model.kind != RiskKind::Isk {
        return Err(Error::invalid("allocation needs an inductive skeleton risk model"));
    }
    if total == 0 {
        return Err(Error::invalid("total sample size must be positive"));
    }
    if total < model.coefficients.len() {
        return Err(Error::invalid(format!(
            "{total} samples cannot cover {} levels",
            model.coefficients.len()
        )));
    }
    Ok(())
}

/// Minimizes `sum_m c_m / N_m` subject to `sum_m N_m = N`. The continuous
/// optimum is `N_m = N sqrt(c_m) / sum_k sqrt(c_k)` with risk
/// `(sum_m sqrt(c_m))^2 / N`.
pub fn optimal_allocation(model: &RiskModel, total: usize) -> Result<Allocation> {
    require_isk(model, total)?;
    let roots: BTreeMap<usize, f64> = model.coefficients.iter().map(|(&m, &c)| (m, c.sqrt())).collect();
    let sum: f64 = roots.values().sum();
    let fractions = roots.into_iter().map(|(m, r)| (m, r / sum)).collect();
    Ok(allocation_from_fractions(model, total, fractions))
}

/// Equal split over the levels of `model`, or over every level `1..=M` when
/// `all_levels` is set (levels above `D` then receive samples the estimator
/// ignores).
pub fn equal_allocation(model: &RiskModel, total: usize, all_levels: bool) -> Result<Allocation> {
    require_isk(model, total)?;
    let levels: Vec<usize> = if all_levels {
        (1..=model.dim).collect()
    } else {
        model.levels()
    };
    if total < levels.len() {
        return Err(Error::invalid(format!("{total} samples cannot cover {} levels", levels.len())));
    }
    let share = 1.0 / levels.len() as f64;
    let fractions = levels.into_iter().map(|m| (m, share)).collect();
    Ok(allocation_from_fractions(model, total, fractions))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn simplex_moment_examples() {
        assert_relative_eq!(simplex_moment(2, &[1, 1]).unwrap(), 1.0 / 6.0, epsilon = 1e-15);
        assert_relative_eq!(simplex_moment(3, &[0, 0, 0]).unwrap(), 1.0);
        assert_relative_eq!(simplex_moment(2, &[2, 0]).unwrap(), 1.0 / 3.0, epsilon = 1e-15);
        // large exponents go through the log-gamma path
        let big = simplex_moment(2, &[30, 30]).unwrap();
        let beta = (ln_gamma(31.0) * 2.0 - ln_gamma(62.0)).exp();
        assert_relative_eq!(big, beta, max_relative = 1e-10);
        assert!(simplex_moment(0, &[]).is_err());
        assert!(simplex_moment(2, &[1]).is_err());
    }

    #[test]
    fn skeleton_moment_examples() {
        assert_relative_eq!(skeleton_moment(2, 1, &[2, 0]).unwrap(), 0.5);
        assert_eq!(skeleton_moment(3, 2, &[1, 1, 1]).unwrap(), 0.0);
        assert_relative_eq!(skeleton_moment(2, 2, &[1, 1]).unwrap(), 1.0 / 6.0, epsilon = 1e-15);
        // a vertex monomial on the edges of a triangle: two of three edges
        // contain e_1 and E[t^2] = 1/3 on each
        assert_relative_eq!(skeleton_moment(3, 2, &[2, 0, 0]).unwrap(), 2.0 / 9.0, epsilon = 1e-15);
        assert!(skeleton_moment(3, 4, &[0, 0, 0]).is_err());
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma_matrix(1, 5).unwrap().entries(), &DMatrix::from_element(1, 1, 1.0));
        let s = sigma_matrix(2, 1).unwrap();
        let expect = DMatrix::from_row_slice(2, 2, &[1.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 3.0]);
        assert!((s.entries() - expect).amax() < 1e-15);
        assert_relative_eq!(sigma_matrix(2, 2).unwrap().entries()[(0, 0)], 0.2, epsilon = 1e-15);
    }

    #[test]
    fn sigma_two_formulas_agree() {
        for dim in 1..=8 {
            for degree in 0..=3 {
                let a = sigma_matrix(dim, degree).unwrap();
                let b = sigma_matrix_closed_form(dim, degree).unwrap();
                assert!((a.entries() - b).amax() <= 1e-12, "M={dim} D={degree}");
                assert!(a.entries().iter().all(|&v| v > 0.0 && v <= 1.0));
            }
        }
    }

    #[test]
    fn hadamard_identity() {
        assert_relative_eq!(hadamard_identity_check(2, 2).unwrap(), 3.0, epsilon = 1e-8);
        assert_relative_eq!(hadamard_identity_check(5, 3).unwrap(), 35.0, epsilon = 1e-8);
        assert_relative_eq!(hadamard_identity_check(1, 7).unwrap(), 1.0, epsilon = 1e-8);
    }

    #[test]
    fn contraction_examples() {
        let s = sigma_matrix(3, 2).unwrap();
        let n = s.lattice().len();
        assert_eq!(risk_contraction(&s, &DMatrix::zeros(n, n)).unwrap(), 0.0);
        assert_relative_eq!(
            risk_contraction(&s, &DMatrix::identity(n, n)).unwrap(),
            s.entries().trace(),
            epsilon = 1e-15
        );
        assert!(risk_contraction(&s, &DMatrix::zeros(n + 1, n + 1)).is_err());
    }

    #[test]
    fn aao_examples() {
        assert_eq!(aao_risk(8, 3, 1.0, 1).unwrap(), 120.0);
        assert_eq!(aao_risk(3, 2, 1.0, 1).unwrap(), 6.0);
        assert_relative_eq!(aao_risk(2, 2, 2.0, 100).unwrap(), 0.06, epsilon = 1e-15);
        assert!(aao_risk(2, 2, 1.0, 0).is_err());
    }

    #[test]
    fn lambda_examples() {
        let l = lambda_matrix(2, 2, 1, 1).unwrap();
        assert!((l.entries - DMatrix::from_diagonal_element(2, 2, 0.5)).amax() < 1e-15);
        // edge level of a segment: integrals of products of quadratic Bernstein
        // polynomials on [0, 1] against the vertex ones
        let l = lambda_matrix(2, 2, 2, 1).unwrap();
        assert_eq!(l.rows, vec![1]);
        assert_eq!(l.cols, vec![0, 2]);
        // int 2t(1-t) t^2 dt = 1/10 for both endpoints by symmetry
        assert_relative_eq!(l.entries[(0, 0)], 0.1, epsilon = 1e-15);
        assert_relative_eq!(l.entries[(0, 1)], 0.1, epsilon = 1e-15);
        let l = lambda_matrix(3, 3, 2, 1).unwrap();
        for (i, &a) in l.rows.iter().enumerate() {
            for (j, &b) in l.cols.iter().enumerate() {
                let lat = enumerate_lattice(3, 3).unwrap();
                let contained = (0..3).all(|c| lat[b].entries()[c] == 0 || lat[a].entries()[c] > 0);
                if !contained {
                    assert_eq!(l.entries[(i, j)], 0.0);
                }
            }
        }
        assert!(lambda_matrix(3, 2, 3, 1).is_err());
    }

    #[test]
    fn isk_small_cases() {
        let r = isk_risk_coefficients(2, 2).unwrap();
        assert_relative_eq!(r.coefficients[&1], 0.5, epsilon = 1e-10);
        assert_relative_eq!(r.coefficients[&2], 1.0, epsilon = 1e-10);
        let r = isk_risk_coefficients(1, 4).unwrap();
        assert_relative_eq!(r.coefficients[&1], 1.0, epsilon = 1e-10);
        assert!(isk_risk_coefficients(3, 0).is_err());
    }

    #[test]
    fn allocation_two_levels() {
        let model = isk_risk_coefficients(2, 2).unwrap();
        let a = optimal_allocation(&model, 1000).unwrap();
        assert_relative_eq!(a.minimized_risk * 1000.0, 2.91421, epsilon = 1e-5);
        assert_relative_eq!(a.fractions[&1], 0.4142, epsilon = 1e-4);
        assert_eq!(a.per_level.values().sum::<usize>(), 1000);
        assert!(optimal_allocation(&model, 0).is_err());
        assert!(optimal_allocation(&aao_risk_model(2, 2).unwrap(), 10).is_err());
    }

    #[test]
    fn rounding_ties_go_up() {
        let fr = BTreeMap::from([(1, 0.5), (2, 0.5)]);
        assert_eq!(round_allocation(3, &fr), BTreeMap::from([(1, 1), (2, 2)]));
        let fr = BTreeMap::from([(1, 0.001), (2, 0.999)]);
        assert_eq!(round_allocation(10, &fr), BTreeMap::from([(1, 1), (2, 9)]));
    }

    #[test]
    fn equal_split_levels() {
        let model = isk_risk_coefficients(4, 2).unwrap();
        let a = equal_allocation(&model, 100, false).unwrap();
        assert_eq!(a.per_level, BTreeMap::from([(1, 50), (2, 50)]));
        let a = equal_allocation(&model, 100, true).unwrap();
        assert_eq!(a.per_level.len(), 4);
        assert_eq!(a.per_level.values().sum::<usize>(), 100);
        assert!(a.integer_risk.is_finite());
    }
}
