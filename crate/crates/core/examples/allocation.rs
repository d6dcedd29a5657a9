//! Splitting a sample budget across skeleton levels.
//!
//! ```bash
//! cargo run --example allocation
//! ```

use bezierfit::risk::{equal_allocation, isk_risk_coefficients, optimal_allocation};

fn main() -> bezierfit::Result<()> {
    let (dim, degree, total) = (8, 3, 1000);
    let model = isk_risk_coefficients(dim, degree)?;

    let optimal = optimal_allocation(&model, total)?;
    println!("optimal split of N={total} for M={dim}, D={degree}");
    for (level, n) in &optimal.per_level {
        println!("  level {level}: {n:>4} samples ({:.4})", optimal.fractions[level]);
    }
    println!("  risk/sigma^2L: continuous {:.6}, integer {:.6}", optimal.minimized_risk, optimal.integer_risk);

    for all_levels in [false, true] {
        let equal = equal_allocation(&model, total, all_levels)?;
        println!("equal split (all levels: {all_levels}): {:?}, risk {:.6}", equal.per_level, equal.integer_risk);
    }
    Ok(())
}
