//! Simplex lattices, subsimplex masks and uniform sampling on the standard
//! simplex and its skeletons.
//!
//! A *level* throughout this crate is the number of nonzero barycentric
//! coordinates: level `m` is the union of all `(m - 1)`-dimensional faces.
//! Level 1 is the vertex set, level 2 the edges, level `M` the whole simplex.

use std::fmt;

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the coordinate sum of a [`SimplexPoint`].
pub const SIMPLEX_TOLERANCE: f64 = 1e-12;

/// An exponent vector `d` with nonnegative entries summing to the degree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::invalid("multi-index needs at least one entry"));
        }
        Ok(MultiIndex(entries))
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn nonzero_count(&self) -> usize {
        self.0.iter().filter(|&&d| d > 0).count()
    }

    /// Entrywise sum, used for products of basis monomials.
    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.dim(), other.dim());
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Monomial `t^d` with `0^0 = 1`.
    pub fn monomial(&self, t: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(t)
            .filter(|(&d, _)| d > 0)
            .map(|(&d, &x)| x.powi(d as i32))
            .product()
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, ")")
    }
}

/// Binary vector identifying the subsimplex spanned by the vertices whose bit is set.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SubsimplexMask(Vec<bool>);

impl SubsimplexMask {
    pub fn new(bits: Vec<bool>) -> Result<Self> {
        if !bits.iter().any(|&b| b) {
            return Err(Error::invalid("subsimplex mask must have at least one set bit"));
        }
        Ok(SubsimplexMask(bits))
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn cardinality(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    /// Indices of the set bits, ascending.
    pub fn support(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
            .collect()
    }

    pub fn contains(&self, other: &SubsimplexMask) -> bool {
        self.0.iter().zip(&other.0).all(|(&a, &b)| a || !b)
    }
}

/// A point of the standard `(M - 1)`-simplex in barycentric coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimplexPoint(Vec<f64>);

impl SimplexPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::invalid("simplex point needs at least one coordinate"));
        }
        if coords.iter().any(|&c| !c.is_finite() || c < 0.0) {
            return Err(Error::invalid(format!(
                "simplex coordinates must be finite and nonnegative, got {coords:?}"
            )));
        }
        let sum: f64 = coords.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_TOLERANCE {
            return Err(Error::invalid(format!(
                "simplex coordinates must sum to 1, got {sum}"
            )));
        }
        Ok(SimplexPoint(coords))
    }

    /// Normalizes nonnegative weights with a positive sum onto the simplex.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|&c| !c.is_finite() || c < 0.0) {
            return Err(Error::invalid("weights must be finite and nonnegative"));
        }
        let sum: f64 = weights.iter().sum();
        if !(sum > 0.0) {
            return Err(Error::invalid("weights must have a positive sum"));
        }
        Ok(SimplexPoint(weights.into_iter().map(|w| w / sum).collect()))
    }

    /// The `j`-th vertex `e_j` of the `(dim - 1)`-simplex.
    pub fn vertex(dim: usize, j: usize) -> Result<Self> {
        if j >= dim {
            return Err(Error::invalid(format!("vertex {j} out of range for dimension {dim}")));
        }
        let mut coords = vec![0.0; dim];
        coords[j] = 1.0;
        Ok(SimplexPoint(coords))
    }

    pub fn barycenter(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        Ok(SimplexPoint(vec![1.0 / dim as f64; dim]))
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn nonzero_count(&self) -> usize {
        self.0.iter().filter(|&&c| c > 0.0).count()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// `n!` as an exact integer, `None` on overflow.
pub fn factorial(n: u32) -> Option<u128> {
    (1..=n as u128).try_fold(1u128, |acc, k| acc.checked_mul(k))
}

/// Binomial coefficient `C(n, k)`, exact; `None` on overflow.
pub fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) at every step
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// Number of lattice points `|N_D^M| = C(D + M - 1, M - 1)`.
pub fn lattice_size(dim: usize, degree: u32) -> usize {
    binomial(degree as u64 + dim as u64 - 1, dim as u64 - 1).expect("lattice size overflow") as usize
}

/// All exponent vectors of length `dim` summing to `degree`, in reverse
/// lexicographic order. This order is the row order of every control-point
/// matrix and the row/column order of every moment matrix in the crate.
pub fn enumerate_lattice(dim: usize, degree: u32) -> Result<Vec<MultiIndex>> {
    if dim == 0 {
        return Err(Error::invalid("simplex dimension count M must be at least 1"));
    }
    let mut out = Vec::with_capacity(lattice_size(dim, degree));
    let mut current = vec![0u32; dim];
    fill_lattice(&mut current, 0, degree, &mut out);
    Ok(out)
}

fn fill_lattice(current: &mut [u32], pos: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
    if pos + 1 == current.len() {
        current[pos] = remaining;
        out.push(MultiIndex(current.to_vec()));
        return;
    }
    for v in (0..=remaining).rev() {
        current[pos] = v;
        fill_lattice(current, pos + 1, remaining - v, out);
    }
}

/// Exact multinomial coefficient `D! / (d_1! ... d_M!)`.
pub fn multinomial(degree: u32, d: &MultiIndex) -> Result<u128> {
    if d.degree() != degree {
        return Err(Error::invalid(format!(
            "multi-index {d} sums to {} but degree is {degree}",
            d.degree()
        )));
    }
    // product of binomials avoids the large intermediate D!
    let mut acc: u128 = 1;
    let mut partial: u64 = 0;
    for &di in d.entries() {
        partial += di as u64;
        let b = binomial(partial, di as u64)
            .ok_or_else(|| Error::invalid("multinomial coefficient overflows u128"))?;
        acc = acc
            .checked_mul(b)
            .ok_or_else(|| Error::invalid("multinomial coefficient overflows u128"))?;
    }
    Ok(acc)
}

/// Binarization `(d)_01`: which coordinates of `d` are nonzero.
pub fn nonzero_pattern(d: &MultiIndex) -> Result<SubsimplexMask> {
    SubsimplexMask::new(d.entries().iter().map(|&x| x > 0).collect())
        .map_err(|_| Error::invalid("nonzero pattern of the zero multi-index is undefined"))
}

/// All masks with exactly `card` set bits, ordered by ascending support
/// (lexicographic combinations).
pub fn enumerate_subsimplices(dim: usize, card: usize) -> Result<Vec<SubsimplexMask>> {
    if card == 0 || card > dim {
        return Err(Error::invalid(format!(
            "subsimplex cardinality {card} out of range 1..={dim}"
        )));
    }
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..card).collect();
    loop {
        let mut bits = vec![false; dim];
        for &i in &idx {
            bits[i] = true;
        }
        out.push(SubsimplexMask(bits));

        // advance to the next combination
        let mut i = card;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            if idx[i] != i + dim - card {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..card {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Draws a point uniformly from the `(dim - 1)`-simplex via normalized
/// exponential spacings (a flat Dirichlet draw).
pub fn sample_uniform_simplex<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> SimplexPoint {
    assert!(dim >= 1, "simplex dimension count must be at least 1");
    if dim == 1 {
        return SimplexPoint(vec![1.0]);
    }
    let mut coords: Vec<f64> = (0..dim).map(|_| Exp1.sample(rng)).collect();
    let sum: f64 = coords.iter().sum();
    for c in &mut coords {
        *c /= sum;
    }
    SimplexPoint(coords)
}

/// Draws `n` points from the level-`card` skeleton. Points are spread
/// equally over the `C(dim, card)` faces; the remainder goes round-robin in
/// mask order, so point `i` lies on face `i mod C(dim, card)`.
pub fn sample_skeleton<R: Rng + ?Sized>(
    dim: usize,
    card: usize,
    n: usize,
    rng: &mut R,
) -> Result<Vec<SimplexPoint>> {
    let masks = enumerate_subsimplices(dim, card)?;
    let supports: Vec<Vec<usize>> = masks.iter().map(SubsimplexMask::support).collect();
    Ok((0..n)
        .map(|i| embed(dim, &supports[i % supports.len()], rng))
        .collect())
}

/// Draws `n` points uniformly from the face spanned by `mask`.
pub fn sample_subsimplex<R: Rng + ?Sized>(
    mask: &SubsimplexMask,
    n: usize,
    rng: &mut R,
) -> Vec<SimplexPoint> {
    let support = mask.support();
    (0..n).map(|_| embed(mask.dim(), &support, rng)).collect()
}

fn embed<R: Rng + ?Sized>(dim: usize, support: &[usize], rng: &mut R) -> SimplexPoint {
    let local = sample_uniform_simplex(support.len(), rng);
    let mut coords = vec![0.0; dim];
    for (&i, &c) in support.iter().zip(local.coords()) {
        coords[i] = c;
    }
    SimplexPoint(coords)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec()).unwrap()
    }

    #[test]
    fn lattice_small_cases() {
        let l = enumerate_lattice(3, 2).unwrap();
        assert_eq!(l.len(), 6);
        assert_eq!(l[0], mi(&[2, 0, 0]));
        assert_eq!(l[1], mi(&[1, 1, 0]));
        assert_eq!(l[5], mi(&[0, 0, 2]));
        assert_eq!(enumerate_lattice(1, 5).unwrap(), vec![mi(&[5])]);
        assert_eq!(enumerate_lattice(8, 3).unwrap().len(), 120);
        assert_eq!(enumerate_lattice(4, 0).unwrap(), vec![mi(&[0, 0, 0, 0])]);
        assert!(enumerate_lattice(0, 2).is_err());
    }

    #[test]
    fn multinomial_examples() {
        assert_eq!(multinomial(3, &mi(&[1, 1, 1])).unwrap(), 6);
        assert_eq!(multinomial(2, &mi(&[2, 0])).unwrap(), 1);
        assert_eq!(multinomial(3, &mi(&[2, 1, 0])).unwrap(), 3);
        assert!(multinomial(4, &mi(&[2, 1, 0])).is_err());
    }

    #[test]
    fn pattern_examples() {
        assert_eq!(nonzero_pattern(&mi(&[2, 0, 1])).unwrap().bits(), &[true, false, true]);
        assert_eq!(nonzero_pattern(&mi(&[0, 3, 0])).unwrap().bits(), &[false, true, false]);
        assert_eq!(nonzero_pattern(&mi(&[1, 1, 1])).unwrap().cardinality(), 3);
        assert!(nonzero_pattern(&mi(&[0, 0])).is_err());
    }

    #[test]
    fn subsimplex_enumeration() {
        let v = enumerate_subsimplices(3, 1).unwrap();
        let bits: Vec<_> = v.iter().map(|m| m.bits().to_vec()).collect();
        assert_eq!(
            bits,
            vec![
                vec![true, false, false],
                vec![false, true, false],
                vec![false, false, true]
            ]
        );
        assert_eq!(enumerate_subsimplices(3, 3).unwrap().len(), 1);
        assert_eq!(enumerate_subsimplices(4, 2).unwrap().len(), 6);
        assert_eq!(enumerate_subsimplices(8, 4).unwrap().len(), 70);
        assert!(enumerate_subsimplices(3, 0).is_err());
        assert!(enumerate_subsimplices(3, 4).is_err());
    }

    #[test]
    fn zero_simplex_is_a_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            assert_eq!(sample_uniform_simplex(1, &mut rng).coords(), &[1.0]);
        }
    }

    #[test]
    fn skeleton_split_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let pts = sample_skeleton(3, 1, 6, &mut rng).unwrap();
        for j in 0..3 {
            let hits = pts.iter().filter(|p| p.coords()[j] == 1.0).count();
            assert_eq!(hits, 2);
        }
        let pts = sample_skeleton(3, 3, 5, &mut rng).unwrap();
        assert_eq!(pts.len(), 5);
        for p in &pts {
            assert!(p.coords().iter().all(|&c| c > 0.0));
            assert!((p.coords().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        // 10 points over C(4,2) = 6 edges: 4 edges get 2, 2 edges get 1
        let pts = sample_skeleton(4, 2, 10, &mut rng).unwrap();
        let masks = enumerate_subsimplices(4, 2).unwrap();
        let counts: Vec<usize> = masks
            .iter()
            .map(|m| {
                pts.iter()
                    .filter(|p| nonzero_pattern_of_point(p) == *m)
                    .count()
            })
            .collect();
        assert_eq!(counts, vec![2, 2, 2, 2, 1, 1]);
    }

    fn nonzero_pattern_of_point(p: &SimplexPoint) -> SubsimplexMask {
        SubsimplexMask::new(p.coords().iter().map(|&c| c > 0.0).collect()).unwrap()
    }

    #[test]
    fn simplex_point_validation() {
        assert!(SimplexPoint::new(vec![0.5, 0.5]).is_ok());
        assert!(SimplexPoint::new(vec![0.5, 0.6]).is_err());
        assert!(SimplexPoint::new(vec![1.5, -0.5]).is_err());
        assert!(SimplexPoint::new(vec![]).is_err());
        let p = SimplexPoint::from_weights(vec![1.0, 3.0]).unwrap();
        assert_eq!(p.coords(), &[0.25, 0.75]);
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(10, 7), Some(120));
        assert_eq!(binomial(5, 0), Some(1));
        assert_eq!(binomial(3, 5), Some(0));
        assert_eq!(factorial(13), Some(6_227_020_800));
        assert_eq!(lattice_size(8, 2), 36);
    }
}
