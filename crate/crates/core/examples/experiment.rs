//! Repeated trials comparing the estimators with the asymptotic risk.
//!
//! ```bash
//! cargo run --release --example experiment
//! ```

use bezierfit::experiment::{run_experiment, welch_one_sided, ExperimentConfig, Method};

fn main() -> bezierfit::Result<()> {
    let mut mse = Vec::new();
    for method in [Method::Aao, Method::IskOptimal, Method::IskEqual] {
        let mut config = ExperimentConfig::synthetic(100, 8, 2, 1000, 0.1, method);
        config.trials = 10;
        config.test_size = Some(2000);
        let report = run_experiment(&config)?;
        println!(
            "{method:?}: mean MSE {:.5} (sd {:.5}), theory {:?}, split {:?}",
            report.summary.mean, report.summary.sd, report.theoretical_risk, report.allocation
        );
        mse.push(report.mse);
    }
    let welch = welch_one_sided(&mse[1], &mse[0])?;
    println!("optimal skeleton below all-at-once: t={:.2}, p={:.2e}", welch.t, welch.p_value);
    Ok(())
}
