//! Approximating the front of a three-objective location problem.
//!
//! ```bash
//! cargo run --example med_front
//! ```

use bezierfit::experiment::evaluate_mse;
use bezierfit::fit::TrainingSet;
use bezierfit::problems::{med_front_point, med_sample};
use bezierfit::simplex::SimplexPoint;
use bezierfit::{fit_all_at_once, fit_inductive_skeleton};

fn main() -> bezierfit::Result<()> {
    let grid: Vec<SimplexPoint> = bezierfit::simplex::enumerate_lattice(3, 20)?
        .iter()
        .map(|d| SimplexPoint::from_weights(d.entries().iter().map(|&v| v as f64).collect()))
        .collect::<bezierfit::Result<_>>()?;
    let truth = |t: &SimplexPoint| med_front_point(t).map(|p| p.to_vec());

    for stratified in [false, true] {
        let model = match med_sample(30, stratified, 1)? {
            TrainingSet::Plain(s) => fit_all_at_once(&s, 2)?,
            TrainingSet::Stratified(s) => fit_inductive_skeleton(&s, 2)?,
        };
        let label = if stratified { "inductive skeleton" } else { "all at once" };
        println!("{label:>18}: grid MSE {:.3e}", evaluate_mse(&model, truth, &grid)?);
    }
    let centre = SimplexPoint::barycenter(3)?;
    println!("front point at the barycentre {:?}", med_front_point(&centre)?);
    Ok(())
}
