//! Fit the exact posterior to one simulated data set and print its main
//! functionals.
//!
//! ```text
//! cargo run --release --example fit_posterior
//! ```

use spikeslab::harness::{generate_data, ReplicationKey, SignalSpec};
use spikeslab::{DimensionPrior, FitConfig, Posterior, SlabPrior};

fn main() -> spikeslab::Result<()> {
    let n = 500;
    let spec = SignalSpec::new(n, 25, 5.0)?;
    let (theta, x) = generate_data(&spec, ReplicationKey::new(7, 0, 0))?;

    let prior = DimensionPrior::complexity(n, 0.1, 3.0)?;
    let slab = SlabPrior::laplace(1.0)?;
    let post = Posterior::fit(&x, &prior, &slab, FitConfig::default())?;

    println!("log partition        {:.6}", post.log_partition());
    println!("E[|S| | X]           {:.3}", post.expected_dimension());
    let pmf: Vec<f64> = post.dim_log_pmf().iter().map(|l| l.exp()).collect();
    let mode = (0..pmf.len()).max_by(|&a, &b| pmf[a].total_cmp(&pmf[b])).unwrap_or(0);
    println!("posterior mode of |S| {mode} (mass {:.4})", pmf[mode]);

    let mean = post.mean();
    let median = post.medians()?;
    println!("\n  i        x    theta  incl.prob     mean   median");
    for i in [0, 1, 2, n - 3, n - 2, n - 1] {
        println!(
            "{i:>3} {:>8.3} {:>8.3} {:>10.4} {:>8.3} {:>8.3}",
            x.as_slice()[i],
            theta[i],
            post.inclusion_prob()[i],
            mean[i],
            median[i]
        );
    }
    let selected = median.iter().filter(|m| **m != 0.0).count();
    println!("\nnonzero medians: {selected} (true support {})", spec.p_n);
    Ok(())
}
