//! Laplace versus Gaussian slab on the same data: the Gaussian posterior mean
//! over-shrinks large signals.
//!
//! ```text
//! cargo run --release --example shrinkage_demo -- [reps]
//! ```

use spikeslab::harness::{run_shrinkage_demo, ShrinkageConfig};

fn main() -> spikeslab::Result<()> {
    let reps = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(50);
    let cfg = ShrinkageConfig::default();
    let report = run_shrinkage_demo(500, 25, &[3.0, 4.0, 5.0, 7.0, 9.0], reps, &cfg)?;
    println!("{:>4} {:>12} {:>12} {:>8}", "A", "laplace MSE", "gauss MSE", "ratio");
    for r in &report.rows {
        println!("{:>4} {:>12.2} {:>12.2} {:>8.3}", r.amplitude, r.laplace_mse, r.gaussian_mse, r.ratio);
    }
    Ok(())
}
