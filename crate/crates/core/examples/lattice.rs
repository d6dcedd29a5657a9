//! Control-point lattice, faces and Bernstein features of a small simplex.
//!
//! ```bash
//! cargo run --example lattice
//! ```

use bezierfit::bezier::{bernstein_features, partition_by_level};
use bezierfit::simplex::{enumerate_lattice, enumerate_subsimplices, multinomial, SimplexPoint};

fn main() -> bezierfit::Result<()> {
    let (dim, degree) = (3, 2);
    let lattice = enumerate_lattice(dim, degree)?;
    println!("{} control points for M={dim}, D={degree}", lattice.len());
    for d in &lattice {
        println!("  {:?}  multinomial {}  level {}", d.entries(), multinomial(degree, d)?, d.nonzero_count());
    }

    for (level, rows) in partition_by_level(&lattice) {
        let faces = enumerate_subsimplices(dim, level)?;
        println!("level {level}: {} control points on {} faces", rows.len(), faces.len());
    }

    let t = SimplexPoint::new(vec![0.5, 0.3, 0.2])?;
    let z = bernstein_features(&t, degree)?;
    println!("features at {:?}: {:?}", t.coords(), z.values());
    println!("partition of unity: {}", z.values().iter().sum::<f64>());
    Ok(())
}
