//! Monte Carlo loss tables for the posterior mean, posterior median and
//! hard-thresholding estimators.
//!
//! ```text
//! cargo run --release --example simulate_tables -- [reps] [seed]
//! ```

use std::time::Instant;

use spikeslab::harness::{run_table, Estimator, ExperimentConfig};

fn main() -> spikeslab::Result<()> {
    let mut args = std::env::args().skip(1);
    let reps = args.next().and_then(|s| s.parse().ok()).unwrap_or(100);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(2012);
    let cfg = ExperimentConfig {
        replications: reps,
        seed,
        ..ExperimentConfig::default()
    };
    let start = Instant::now();
    let table = run_table(&cfg)?;
    eprintln!("{} fits in {:.1?}", table.audit.fits, start.elapsed());

    for q in [2.0, 1.0] {
        println!("\nq = {q}");
        print!("{:<20}", "");
        for (p, a) in cfg.cells() {
            print!("{:>9}", format!("{p}/{a}"));
        }
        println!();
        for est in Estimator::ALL {
            print!("{:<20}", est.label());
            for (p, a) in cfg.cells() {
                let c = table.get(est, p, a, q).expect("cell");
                print!("{:>9.0}", c.mean_loss);
            }
            println!();
        }
    }
    println!(
        "\nidentity audit: {} fits, max |sum q - E|S||={:.2e}, max mean gap={:.2e}, violations={}",
        table.audit.fits, table.audit.max_dimension_gap, table.audit.max_mean_gap, table.audit.violations
    );
    Ok(())
}
