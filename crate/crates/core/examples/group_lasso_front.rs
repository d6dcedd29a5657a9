//! Tracing the three-objective group lasso front on the bundled birth-weight data.
//!
//! ```bash
//! cargo run --release --example group_lasso_front
//! ```

use bezierfit::fit::TrainingSet;
use bezierfit::problems::{birthwt, dominated_pairs, group_lasso_front_sample, GroupLasso, DEFAULT_EPS, DOMINANCE_TOLERANCE};
use bezierfit::simplex::SimplexPoint;
use bezierfit::{fit_all_at_once, fit_inductive_skeleton};

fn main() -> bezierfit::Result<()> {
    let data = birthwt();
    let problem = GroupLasso::new(&data, DEFAULT_EPS)?;
    for w in [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.2, 0.3, 0.5]] {
        let r = problem.solve(&SimplexPoint::new(w.to_vec())?)?;
        println!("w={w:?}: f={:.4?} in {} iterations", r.f_tilde, r.iterations);
    }

    for stratified in [false, true] {
        let (model, points) = match group_lasso_front_sample(&data, 50, stratified, DEFAULT_EPS, 0)? {
            TrainingSet::Plain(s) => (fit_all_at_once(&s, 3)?, s.values().clone()),
            TrainingSet::Stratified(s) => {
                let flat = s.flatten();
                (fit_inductive_skeleton(&s, 3)?, flat.values().clone())
            }
        };
        let centre = model.evaluate(&SimplexPoint::barycenter(3)?)?;
        println!(
            "stratified={stratified}: {} dominated pairs among samples, fitted centre {centre:.4?}",
            dominated_pairs(&points, DOMINANCE_TOLERANCE).len()
        );
    }
    Ok(())
}
