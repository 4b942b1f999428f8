//! The dimension priors side by side: prior mass on small models and the
//! posterior of |S| they produce on the same data.
//!
//! ```text
//! cargo run --release --example dimension_priors
//! ```

use spikeslab::harness::{generate_data, ReplicationKey, SignalSpec};
use spikeslab::{DimensionPrior, FitConfig, Posterior, SlabPrior};

fn main() -> spikeslab::Result<()> {
    let n = 200;
    let (_, x) = generate_data(&SignalSpec::new(n, 10, 4.0)?, ReplicationKey::new(3, 0, 0))?;
    let slab = SlabPrior::laplace(1.0)?;

    let priors = [
        ("complexity k=0.1", DimensionPrior::complexity(n, 0.1, 3.0)?),
        ("complexity k=1", DimensionPrior::complexity(n, 1.0, 3.0)?),
        ("C(2n-p,n)^0.1", DimensionPrior::betabin_power(n, 0.1)?),
        ("binomial 0.05", DimensionPrior::binomial(n, 0.05)?),
        ("poisson 10", DimensionPrior::poisson(n, 10.0)?),
        ("geometric 0.1", DimensionPrior::geometric(n, 0.1)?),
    ];
    println!("{:<18} {:>10} {:>12} {:>10} {:>12}", "prior", "E[p]", "max ratio", "E[|S||X]", "P(|S|>30|X)");
    for (name, prior) in &priors {
        let post = Posterior::fit(&x, prior, &slab, FitConfig::default())?;
        println!(
            "{name:<18} {:>10.2} {:>12.4} {:>10.2} {:>12.3e}",
            prior.mean(),
            prior.max_successive_ratio(),
            post.expected_dimension(),
            post.dimension_tail(30)
        );
    }
    Ok(())
}
