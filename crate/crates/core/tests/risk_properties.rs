use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use bezierfit::fit::{fit_all_at_once, fit_inductive_skeleton, Sample, StratifiedSample};
use bezierfit::risk::{
    aao_risk, aao_risk_model, isk_risk_coefficients, optimal_allocation, risk_contraction, sigma_matrix,
    sigma_matrix_closed_form,
};
use bezierfit::simplex::{sample_skeleton, sample_uniform_simplex, SimplexPoint};
use bezierfit::Error;

#[test]
fn optimal_inductive_beats_all_at_once_for_quadratics() {
    for m in 2..=8 {
        let model = isk_risk_coefficients(m, 2).unwrap();
        let isk = optimal_allocation(&model, 1000).unwrap().minimized_risk;
        let aao = aao_risk(m, 2, 1.0, 1000).unwrap();
        assert!(isk < aao, "M={m}: {isk} vs {aao}");
    }
}

#[test]
fn single_vertex_simplex_matches_all_at_once() {
    for d in 1..=5 {
        let isk = isk_risk_coefficients(1, d).unwrap();
        let aao = aao_risk_model(1, d).unwrap();
        assert_eq!(isk.levels(), vec![1]);
        assert!((isk.coefficients[&1] - aao.coefficients[&0]).abs() < 1e-12);
    }
}

#[test]
fn inductive_risk_needs_positive_degree() {
    assert!(matches!(isk_risk_coefficients(3, 0), Err(Error::InvalidArgument(_))));
}

#[test]
fn coefficients_are_positive_and_within_levels() {
    for m in 1..=6 {
        for d in 1..=3u32 {
            let model = isk_risk_coefficients(m, d).unwrap();
            let top = m.min(d as usize);
            assert_eq!(model.levels(), (1..=top).collect::<Vec<_>>());
            assert!(model.coefficients.values().all(|&c| c > 0.0));
        }
    }
}

#[test]
fn sigma_closed_form_agrees_for_larger_degrees() {
    for m in 1..=5 {
        for d in 4..=8u32 {
            let a = sigma_matrix(m, d).unwrap();
            let b = sigma_matrix_closed_form(m, d).unwrap();
            assert!((a.entries() - b).amax() <= 1e-12);
        }
    }
}

fn noise(n: usize, ambient: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    DMatrix::from_fn(n, ambient, |_, _| StandardNormal.sample(rng))
}

/// Fits pure noise repeatedly and contracts the mean of `P P^T` against Sigma.
fn empirical_risk<F>(dim: usize, degree: u32, fits: usize, mut fit: F) -> f64
where
    F: FnMut(&mut ChaCha8Rng) -> DMatrix<f64>,
{
    let sigma = sigma_matrix(dim, degree).unwrap();
    let k = sigma.lattice().len();
    let mut rng = ChaCha8Rng::seed_from_u64(100 + dim as u64 * 10 + degree as u64);
    let mut second = DMatrix::zeros(k, k);
    for _ in 0..fits {
        let p = fit(&mut rng);
        second += &p * p.transpose();
    }
    risk_contraction(&sigma, &(second / fits as f64)).unwrap()
}

#[test]
fn simulated_risk_matches_asymptotics() {
    let (n, ambient, fits) = (10_000usize, 2usize, 200usize);
    for (m, d) in [(2usize, 2u32), (3, 2), (3, 3)] {
        let simulated = empirical_risk(m, d, fits, |rng| {
            let params: Vec<SimplexPoint> = (0..n).map(|_| sample_uniform_simplex(m, rng)).collect();
            let x = noise(n, ambient, rng);
            fit_all_at_once(&Sample::new(m, params, x).unwrap(), d)
                .unwrap()
                .control_points()
                .clone()
        });
        let theory = aao_risk(m, d, ambient as f64, n).unwrap();
        assert!((simulated / theory - 1.0).abs() <= 0.1, "aao M={m} D={d}: {simulated} vs {theory}");

        let model = isk_risk_coefficients(m, d).unwrap().with_scale(ambient as f64);
        let counts: BTreeMap<usize, usize> = optimal_allocation(&model, n).unwrap().per_level;
        let simulated = empirical_risk(m, d, fits, |rng| {
            let mut s = StratifiedSample::new(m, ambient);
            for (&level, &c) in &counts {
                let params = sample_skeleton(m, level, c, rng).unwrap();
                let x = noise(c, ambient, rng);
                s.insert(level, Sample::new(m, params, x).unwrap()).unwrap();
            }
            fit_inductive_skeleton(&s, d).unwrap().control_points().clone()
        });
        let theory = model.risk_at(&counts);
        assert!((simulated / theory - 1.0).abs() <= 0.1, "isk M={m} D={d}: {simulated} vs {theory}");
    }
}
