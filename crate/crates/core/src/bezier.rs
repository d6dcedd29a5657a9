//! Bezier simplices: the Bernstein basis on the simplex lattice, model
//! evaluation, design matrices and the split of control points by skeleton
//! level.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simplex::{enumerate_lattice, multinomial, MultiIndex, SimplexPoint};

/// Bernstein basis values `C(D; d) t^d` in canonical lattice order.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureVector(pub Vec<f64>);

impl FeatureVector {
    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

/// The degree-`D` Bernstein basis over `M` barycentric coordinates, with the
/// lattice and multinomial weights precomputed.
#[derive(Clone, Debug)]
pub struct BernsteinBasis {
    dim: usize,
    degree: u32,
    lattice: Vec<MultiIndex>,
    weights: Vec<f64>,
}

impl BernsteinBasis {
    pub fn new(dim: usize, degree: u32) -> Result<Self> {
        let lattice = enumerate_lattice(dim, degree)?;
        let weights = lattice
            .iter()
            .map(|d| multinomial(degree, d).map(|c| c as f64))
            .collect::<Result<Vec<_>>>()?;
        Ok(BernsteinBasis {
            dim,
            degree,
            lattice,
            weights,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.lattice.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lattice.is_empty()
    }

    pub fn lattice(&self) -> &[MultiIndex] {
        &self.lattice
    }

    /// Multinomial coefficients in lattice order.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn check(&self, t: &SimplexPoint) -> Result<()> {
        if t.dim() != self.dim {
            return Err(Error::invalid(format!(
                "point has {} coordinates, basis expects {}",
                t.dim(),
                self.dim
            )));
        }
        Ok(())
    }

    /// Writes the basis values at `t` into `out` (length `self.len()`).
    fn fill(&self, t: &[f64], out: &mut [f64]) {
        let stride = self.degree as usize + 1;
        let mut powers = vec![1.0; self.dim * stride];
        for (i, &x) in t.iter().enumerate() {
            for k in 1..stride {
                powers[i * stride + k] = powers[i * stride + k - 1] * x;
            }
        }
        for ((d, &w), o) in self.lattice.iter().zip(&self.weights).zip(out.iter_mut()) {
            *o = d
                .entries()
                .iter()
                .enumerate()
                .fold(w, |acc, (i, &e)| acc * powers[i * stride + e as usize]);
        }
    }

    pub fn features(&self, t: &SimplexPoint) -> Result<FeatureVector> {
        self.check(t)?;
        let mut out = vec![0.0; self.len()];
        self.fill(t.coords(), &mut out);
        Ok(FeatureVector(out))
    }

    /// `N x |lattice|` matrix whose row `n` is the basis evaluated at `points[n]`.
    pub fn design_matrix(&self, points: &[SimplexPoint]) -> Result<DMatrix<f64>> {
        let k = self.len();
        let mut row = vec![0.0; k];
        let mut z = DMatrix::zeros(points.len(), k);
        for (n, t) in points.iter().enumerate() {
            self.check(t)?;
            self.fill(t.coords(), &mut row);
            for (j, &v) in row.iter().enumerate() {
                z[(n, j)] = v;
            }
        }
        Ok(z)
    }

    /// Like [`design_matrix`](Self::design_matrix) restricted to the given lattice positions.
    pub fn design_columns(&self, points: &[SimplexPoint], columns: &[usize]) -> Result<DMatrix<f64>> {
        let full = self.design_matrix(points)?;
        Ok(full.select_columns(columns))
    }
}

/// Bernstein features of `t` at degree `degree`.
pub fn bernstein_features(t: &SimplexPoint, degree: u32) -> Result<FeatureVector> {
    BernsteinBasis::new(t.dim(), degree)?.features(t)
}

/// Design matrix `Z` with rows `bernstein_features(t_n, D)`.
pub fn design_matrix(points: &[SimplexPoint], degree: u32) -> Result<DMatrix<f64>> {
    let first = points
        .first()
        .ok_or_else(|| Error::invalid("design matrix needs at least one point"))?;
    BernsteinBasis::new(first.dim(), degree)?.design_matrix(points)
}

/// Groups lattice positions by the number of nonzero entries of their
/// multi-index. Keys run over `1..=min(M, D)` (key 0 only for `D = 0`).
pub fn partition_by_level(lattice: &[MultiIndex]) -> BTreeMap<usize, Vec<usize>> {
    let mut levels: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (pos, d) in lattice.iter().enumerate() {
        levels.entry(d.nonzero_count()).or_default().push(pos);
    }
    levels
}

/// A Bezier simplex `b: Δ^{M-1} -> R^L` of degree `D`.
#[derive(Clone, Debug)]
pub struct BezierSimplex {
    basis: BernsteinBasis,
    control_points: DMatrix<f64>,
}

impl BezierSimplex {
    /// `control_points` has one row per lattice point in canonical order and `L` columns.
    pub fn new(dim: usize, degree: u32, control_points: DMatrix<f64>) -> Result<Self> {
        let basis = BernsteinBasis::new(dim, degree)?;
        Self::with_basis(basis, control_points)
    }

    pub fn with_basis(basis: BernsteinBasis, control_points: DMatrix<f64>) -> Result<Self> {
        if control_points.nrows() != basis.len() {
            return Err(Error::invalid(format!(
                "expected {} control points for M={}, D={}, got {}",
                basis.len(),
                basis.dim(),
                basis.degree(),
                control_points.nrows()
            )));
        }
        if control_points.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("control points must be finite"));
        }
        Ok(BezierSimplex {
            basis,
            control_points,
        })
    }

    /// The affine Bezier simplex whose control point for `d` is `sum_j (d_j / D) e_j`.
    /// It traces the unit simplex spanned by `e_1, ..., e_M` in `R^L`.
    pub fn unit_simplex(dim: usize, degree: u32, ambient: usize) -> Result<Self> {
        if degree == 0 {
            return Err(Error::invalid("unit simplex model needs degree at least 1"));
        }
        if ambient < dim {
            return Err(Error::invalid(format!(
                "ambient dimension L={ambient} must be at least M={dim}"
            )));
        }
        let basis = BernsteinBasis::new(dim, degree)?;
        let mut p = DMatrix::zeros(basis.len(), ambient);
        for (row, d) in basis.lattice().iter().enumerate() {
            for (j, &dj) in d.entries().iter().enumerate() {
                p[(row, j)] = dj as f64 / degree as f64;
            }
        }
        Self::with_basis(basis, p)
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn degree(&self) -> u32 {
        self.basis.degree()
    }

    pub fn ambient(&self) -> usize {
        self.control_points.ncols()
    }

    pub fn basis(&self) -> &BernsteinBasis {
        &self.basis
    }

    pub fn lattice(&self) -> &[MultiIndex] {
        self.basis.lattice()
    }

    pub fn control_points(&self) -> &DMatrix<f64> {
        &self.control_points
    }

    /// Control point row for the multi-index `d`, if it belongs to the lattice.
    pub fn control_point(&self, d: &MultiIndex) -> Option<Vec<f64>> {
        let row = self.lattice().iter().position(|x| x == d)?;
        Some(self.control_points.row(row).iter().copied().collect())
    }

    pub fn evaluate(&self, t: &SimplexPoint) -> Result<Vec<f64>> {
        let z = self.basis.features(t)?;
        let mut out = vec![0.0; self.ambient()];
        for (row, &w) in z.values().iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for (l, o) in out.iter_mut().enumerate() {
                *o += w * self.control_points[(row, l)];
            }
        }
        Ok(out)
    }

    /// Evaluates at many points at once: `Z P`, one row per point.
    pub fn evaluate_many(&self, points: &[SimplexPoint]) -> Result<DMatrix<f64>> {
        Ok(self.basis.design_matrix(points)? * &self.control_points)
    }
}

#[derive(Serialize, Deserialize)]
#[allow(non_snake_case)]
struct BezierSimplexJson {
    M: usize,
    D: u32,
    L: usize,
    /// Row-major, rows in canonical lattice order.
    control_points: Vec<f64>,
}

impl Serialize for BezierSimplex {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let p = &self.control_points;
        let mut flat = Vec::with_capacity(p.len());
        for r in 0..p.nrows() {
            flat.extend(p.row(r).iter().copied());
        }
        BezierSimplexJson {
            M: self.dim(),
            D: self.degree(),
            L: self.ambient(),
            control_points: flat,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BezierSimplex {
    fn deserialize<De: serde::Deserializer<'de>>(deserializer: De) -> std::result::Result<Self, De::Error> {
        use serde::de::Error as _;
        let raw = BezierSimplexJson::deserialize(deserializer)?;
        let basis = BernsteinBasis::new(raw.M, raw.D).map_err(De::Error::custom)?;
        if raw.control_points.len() != basis.len() * raw.L {
            return Err(De::Error::custom(format!(
                "expected {} control point entries, got {}",
                basis.len() * raw.L,
                raw.control_points.len()
            )));
        }
        let p = DMatrix::from_row_slice(basis.len(), raw.L, &raw.control_points);
        BezierSimplex::with_basis(basis, p).map_err(De::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use crate::simplex::sample_uniform_simplex;

    fn pt(v: &[f64]) -> SimplexPoint {
        SimplexPoint::new(v.to_vec()).unwrap()
    }

    #[test]
    fn features_at_vertex_and_midpoint() {
        let z = bernstein_features(&SimplexPoint::vertex(3, 0).unwrap(), 2).unwrap();
        assert_eq!(z.values(), &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);

        let z = bernstein_features(&pt(&[0.5, 0.5]), 2).unwrap();
        assert_eq!(z.values(), &[0.25, 0.5, 0.25]);

        let third = 1.0 / 3.0;
        let z = bernstein_features(&pt(&[third, third, third]), 1).unwrap();
        for v in z.values() {
            assert!((v - third).abs() < 1e-15);
        }
    }

    #[test]
    fn vertex_interpolation() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let basis = BernsteinBasis::new(4, 3).unwrap();
        let p = DMatrix::from_fn(basis.len(), 2, |_, _| rand::Rng::random::<f64>(&mut rng));
        let model = BezierSimplex::with_basis(basis, p).unwrap();
        for j in 0..4 {
            let mut d = vec![0; 4];
            d[j] = 3;
            let expected = model.control_point(&MultiIndex::new(d).unwrap()).unwrap();
            let got = model.evaluate(&SimplexPoint::vertex(4, j).unwrap()).unwrap();
            assert_eq!(got, expected);
        }
    }

    #[test]
    fn unit_simplex_is_affine() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let model = BezierSimplex::unit_simplex(4, 3, 6).unwrap();
        for _ in 0..100 {
            let t = sample_uniform_simplex(4, &mut rng);
            // direct summation of sum_d C(D;d) t^d p_d as the oracle
            let mut direct = vec![0.0; 6];
            for (row, d) in model.lattice().iter().enumerate() {
                let w = multinomial(3, d).unwrap() as f64 * d.monomial(t.coords());
                for l in 0..6 {
                    direct[l] += w * model.control_points()[(row, l)];
                }
            }
            let got = model.evaluate(&t).unwrap();
            for l in 0..6 {
                let truth = if l < 4 { t.coords()[l] } else { 0.0 };
                assert!((got[l] - truth).abs() < 1e-10);
                assert!((direct[l] - truth).abs() < 1e-10);
            }
        }
        assert_eq!(
            model.evaluate(&SimplexPoint::vertex(4, 1).unwrap()).unwrap(),
            vec![0.0, 1.0, 0.0, 0.0, 0.0, 0.0]
        );
    }

    #[test]
    fn degree_zero_is_constant() {
        let p = DMatrix::from_row_slice(1, 3, &[1.0, -2.0, 0.5]);
        let model = BezierSimplex::new(3, 0, p).unwrap();
        let got = model.evaluate(&pt(&[0.2, 0.3, 0.5])).unwrap();
        assert_eq!(got, vec![1.0, -2.0, 0.5]);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let model = BezierSimplex::unit_simplex(3, 2, 3).unwrap();
        assert!(model.evaluate(&pt(&[0.5, 0.5])).is_err());
        assert!(BezierSimplex::new(3, 2, DMatrix::zeros(5, 2)).is_err());
    }

    #[test]
    fn design_rows() {
        let z = design_matrix(&[SimplexPoint::vertex(2, 0).unwrap()], 2).unwrap();
        assert_eq!(z.row(0).iter().copied().collect::<Vec<_>>(), vec![1.0, 0.0, 0.0]);
        assert!(design_matrix(&[], 2).is_err());
    }

    #[test]
    fn level_partition_sizes() {
        let lat = enumerate_lattice(3, 2).unwrap();
        let parts = partition_by_level(&lat);
        assert_eq!(parts.len(), 2);
        let level1: Vec<_> = parts[&1].iter().map(|&i| lat[i].to_string()).collect();
        assert_eq!(level1, vec!["(2,0,0)", "(0,2,0)", "(0,0,2)"]);
        let level2: Vec<_> = parts[&2].iter().map(|&i| lat[i].to_string()).collect();
        assert_eq!(level2, vec!["(1,1,0)", "(1,0,1)", "(0,1,1)"]);
        assert!(!parts.contains_key(&3));

        let sizes = |m, d| {
            partition_by_level(&enumerate_lattice(m, d).unwrap())
                .values()
                .map(Vec::len)
                .collect::<Vec<_>>()
        };
        assert_eq!(sizes(3, 3), vec![3, 6, 1]);
        assert_eq!(sizes(2, 3), vec![2, 2]);
    }

    #[test]
    fn json_round_trip() {
        let model = BezierSimplex::unit_simplex(3, 2, 4).unwrap();
        let text = serde_json::to_string(&model).unwrap();
        assert!(text.contains("\"M\":3"));
        let back: BezierSimplex = serde_json::from_str(&text).unwrap();
        assert_eq!(back.control_points(), model.control_points());
        assert!(serde_json::from_str::<BezierSimplex>(r#"{"M":2,"D":1,"L":1,"control_points":[1.0]}"#).is_err());
    }
}
