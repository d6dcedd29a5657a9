use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use bezierfit::bezier::{partition_by_level, BernsteinBasis, BezierSimplex};
use bezierfit::fit::{fit_all_at_once, fit_inductive_skeleton, training_loss, Sample, StratifiedSample};
use bezierfit::simplex::{binomial, sample_skeleton, sample_uniform_simplex};

fn random_model(dim: usize, degree: u32, ambient: usize, rng: &mut ChaCha8Rng) -> BezierSimplex {
    let basis = BernsteinBasis::new(dim, degree).unwrap();
    let p = DMatrix::from_fn(basis.len(), ambient, |_, _| rng.random_range(-1.0..1.0));
    BezierSimplex::with_basis(basis, p).unwrap()
}

fn observe(model: &BezierSimplex, params: Vec<bezierfit::SimplexPoint>, sigma: f64, rng: &mut ChaCha8Rng) -> Sample {
    let mut x = model.evaluate_many(&params).unwrap();
    for v in x.iter_mut() {
        let e: f64 = StandardNormal.sample(rng);
        *v += sigma * e;
    }
    Sample::new(model.dim(), params, x).unwrap()
}

fn stratified(model: &BezierSimplex, sigma: f64, rng: &mut ChaCha8Rng) -> StratifiedSample {
    let (m, d) = (model.dim(), model.degree());
    let mut s = StratifiedSample::new(m, model.ambient());
    for level in 1..=m.min(d as usize) {
        let per_face = 2 * binomial(d as u64 - 1, level as u64 - 1).unwrap() as usize + 2;
        let n = binomial(m as u64, level as u64).unwrap() as usize * per_face;
        let params = sample_skeleton(m, level, n, rng).unwrap();
        s.insert(level, observe(model, params, sigma, rng)).unwrap();
    }
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn estimators_agree_on_noiseless_data(dim in 2usize..=4, degree in 1u32..=3, ambient in 1usize..=4, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let truth = random_model(dim, degree, ambient, &mut rng);
        let params = (0..3 * truth.lattice().len()).map(|_| sample_uniform_simplex(dim, &mut rng)).collect();
        let aao = fit_all_at_once(&observe(&truth, params, 0.0, &mut rng), degree).unwrap();
        let isk = fit_inductive_skeleton(&stratified(&truth, 0.0, &mut rng), degree).unwrap();
        prop_assert!((aao.control_points() - isk.control_points()).amax() <= 1e-8);
    }

    #[test]
    fn scaling_is_equivariant(dim in 2usize..=4, degree in 1u32..=3, seed in any::<u64>(), c in -5.0f64..5.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let truth = random_model(dim, degree, 2, &mut rng);
        let params = (0..3 * truth.lattice().len()).map(|_| sample_uniform_simplex(dim, &mut rng)).collect();
        let sample = observe(&truth, params, 0.1, &mut rng);
        let base = fit_all_at_once(&sample, degree).unwrap();
        // a power of two commutes with every floating-point operation
        let doubled = fit_all_at_once(&sample.scaled(4.0), degree).unwrap();
        prop_assert_eq!(doubled.control_points(), &(base.control_points() * 4.0));
        let scaled = fit_all_at_once(&sample.scaled(c), degree).unwrap();
        let expect = base.control_points() * c;
        prop_assert!((scaled.control_points() - &expect).amax() <= 1e-10 * expect.amax().max(1.0));
    }
}

#[test]
fn least_squares_solution_is_a_strict_minimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let truth = random_model(3, 2, 3, &mut rng);
    let params = (0..60).map(|_| sample_uniform_simplex(3, &mut rng)).collect();
    let sample = observe(&truth, params, 0.2, &mut rng);
    let fit = fit_all_at_once(&sample, 2).unwrap();
    let best = training_loss(&sample, &fit).unwrap();
    for row in 0..fit.lattice().len() {
        for col in 0..fit.ambient() {
            for delta in [1e-3, -1e-3] {
                let mut p = fit.control_points().clone();
                p[(row, col)] += delta;
                let moved = BezierSimplex::new(3, 2, p).unwrap();
                assert!(training_loss(&sample, &moved).unwrap() > best);
            }
        }
    }
}

#[test]
fn lower_levels_ignore_higher_level_data() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let truth = random_model(4, 3, 2, &mut rng);
    let first = stratified(&truth, 0.1, &mut rng);
    let mut second = StratifiedSample::new(4, 2);
    for (&m, s) in first.levels() {
        if m < 3 {
            second.insert(m, s.clone()).unwrap();
        }
    }
    let params = sample_skeleton(4, 3, 40, &mut rng).unwrap();
    second.insert(3, observe(&truth, params, 0.1, &mut rng)).unwrap();

    let a = fit_inductive_skeleton(&first, 3).unwrap();
    let b = fit_inductive_skeleton(&second, 3).unwrap();
    let parts = partition_by_level(truth.lattice());
    for m in [1, 2] {
        for &row in &parts[&m] {
            assert_eq!(a.control_points().row(row), b.control_points().row(row));
        }
    }
    assert_ne!(a.control_points(), b.control_points());
}

#[test]
fn samples_above_the_top_level_are_ignored() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let truth = random_model(4, 2, 2, &mut rng);
    let mut s = stratified(&truth, 0.0, &mut rng);
    let without = fit_inductive_skeleton(&s, 2).unwrap();
    let params = sample_skeleton(4, 4, 5, &mut rng).unwrap();
    s.insert(4, observe(&truth, params, 5.0, &mut rng)).unwrap();
    let with = fit_inductive_skeleton(&s, 2).unwrap();
    assert_eq!(without.control_points(), with.control_points());
}
