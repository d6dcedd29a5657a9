//! Fitting a Bezier simplex to noisy points drawn uniformly from the simplex.
//!
//! ```bash
//! cargo run --example fit_all_at_once
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use bezierfit::experiment::model_mse;
use bezierfit::problems::{draw_sample, Synthetic};
use bezierfit::simplex::sample_uniform_simplex;
use bezierfit::fit::{residual_orthogonality, training_loss};
use bezierfit::fit_all_at_once;

fn main() -> bezierfit::Result<()> {
    let problem = Synthetic::new(10, 3, 2, 0.1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let sample = draw_sample(&problem, 500, &mut rng)?;

    let fit = fit_all_at_once(&sample, 2)?;
    println!("training loss {:.6}", training_loss(&sample, &fit)?);
    println!("residual orthogonality {:.2e}", residual_orthogonality(&sample, &fit)?);

    let test: Vec<_> = (0..10_000).map(|_| sample_uniform_simplex(3, &mut rng)).collect();
    println!("test MSE against the truth {:.6}", model_mse(&fit, problem.truth_model(), &test)?);
    Ok(())
}
