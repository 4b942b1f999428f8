//! How much posterior mass sits on models much larger than the truth.
//!
//! ```text
//! cargo run --release --example dimension_check -- [reps]
//! ```

use spikeslab::harness::run_dimension_check;
use spikeslab::{DimensionPrior, SlabPrior};

fn main() -> spikeslab::Result<()> {
    let reps = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(50);
    let (n, p_n, amp) = (500, 25, 5.0);
    let grid = [0.0, 1.0, 2.0, 3.0, 5.0, 8.0, 10.0];
    let slab = SlabPrior::laplace(1.0)?;
    for kappa in [0.1, 1.0] {
        let prior = DimensionPrior::complexity(n, kappa, 3.0)?;
        let report = run_dimension_check(n, p_n, amp, &grid, reps, &prior, &slab, 2012)?;
        println!("complexity prior, kappa = {kappa}");
        for row in &report.rows {
            println!("  M = {:>4}: P(|S| > M p_n | X) = {:.3e} (se {:.1e})", row.m, row.mean_tail, row.se);
        }
        println!("  smallest M below 0.01: {:?}\n", report.smallest_m);
    }
    Ok(())
}
