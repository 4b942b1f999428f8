//! Posterior quadratic risk against the `p_n log(n/p_n)` rate.
//!
//! ```text
//! cargo run --release --example contraction_check -- [reps]
//! ```

use spikeslab::harness::{run_contraction_check, PriorSpec};
use spikeslab::SlabPrior;

fn main() -> spikeslab::Result<()> {
    let reps = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(20);
    let slab = SlabPrior::laplace(1.0)?;
    let report = run_contraction_check(500, &[10, 25, 50, 100], 5.0, reps, &PriorSpec::complexity(0.1), &slab, 2012)?;
    println!("{:>5} {:>10} {:>8} {:>10} {:>7}", "p_n", "risk", "se", "rate", "ratio");
    for r in &report.rows {
        println!("{:>5} {:>10.2} {:>8.2} {:>10.2} {:>7.3}", r.p_n, r.risk, r.se, r.rate, r.ratio);
    }
    println!("max/min ratio {:.3} -> bounded: {}", report.spread, report.bounded);
    Ok(())
}
