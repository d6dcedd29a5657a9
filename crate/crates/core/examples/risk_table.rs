//! Asymptotic risk coefficients of both estimators for a grid of dimensions.
//!
//! ```bash
//! cargo run --example risk_table
//! ```

use bezierfit::risk::{aao_risk, isk_risk_coefficients, optimal_allocation};

fn main() -> bezierfit::Result<()> {
    println!("{:>2} {:>2} {:>12} {:>12}  per-level ISK coefficients", "M", "D", "AAO N*R", "ISK N*R");
    for degree in [2u32, 3] {
        for dim in 2..=8 {
            let aao = aao_risk(dim, degree, 1.0, 1)?;
            let model = isk_risk_coefficients(dim, degree)?;
            let isk = optimal_allocation(&model, 1_000_000)?.minimized_risk * 1e6;
            let coeffs: Vec<String> = model.coefficients.values().map(|c| format!("{c:.5}")).collect();
            println!("{dim:>2} {degree:>2} {aao:>12.5} {isk:>12.5}  [{}]", coeffs.join(", "));
        }
    }
    Ok(())
}
