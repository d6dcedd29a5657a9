//! Fitting level by level from samples stratified over the simplex skeleton.
//!
//! ```bash
//! cargo run --example fit_inductive_skeleton
//! ```

use bezierfit::experiment::model_mse;
use bezierfit::fit::{level_residual_orthogonality, TrainingSet};
use bezierfit::problems::{synthetic_training_set, SampleSizes, Synthetic, SyntheticSpec};
use bezierfit::simplex::sample_uniform_simplex;
use bezierfit::fit_inductive_skeleton;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> bezierfit::Result<()> {
    let spec = SyntheticSpec {
        ambient: 10,
        dim: 3,
        degree: 2,
        sigma: 0.1,
        sizes: SampleSizes::Total(500),
        seed: 7,
    };
    let TrainingSet::Stratified(sample) = synthetic_training_set(&spec, true)? else {
        unreachable!("stratified draw")
    };
    println!("samples per level {:?}", sample.counts());

    let fit = fit_inductive_skeleton(&sample, 2)?;
    for (level, r) in level_residual_orthogonality(&sample, &fit)? {
        println!("level {level} residual orthogonality {r:.2e}");
    }

    let truth = Synthetic::new(10, 3, 2, 0.1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let test: Vec<_> = (0..10_000).map(|_| sample_uniform_simplex(3, &mut rng)).collect();
    println!("test MSE against the truth {:.6}", model_mse(&fit, truth.truth_model(), &test)?);
    Ok(())
}
