//! Hard thresholding at the universal and oracle levels next to the
//! marginal-ML empirical Bayes posterior mean.
//!
//! ```text
//! cargo run --release --example thresholding_and_eb
//! ```

use spikeslab::estimators::{oracle_threshold, universal_threshold};
use spikeslab::harness::{generate_data, ReplicationKey, SignalSpec};
use spikeslab::{dq_loss, eb_binomial_weight, hard_threshold, hard_threshold_oracle, FitConfig, LossSpec, Posterior, SlabPrior};

fn main() -> spikeslab::Result<()> {
    let (n, p_n) = (500, 50);
    println!("thresholds: universal {:.3}, oracle {:.3}", universal_threshold(n)?, oracle_threshold(n, p_n)?);
    let slab = SlabPrior::laplace(1.0)?;
    for amp in [3.0, 5.0] {
        let (theta, x) = generate_data(&SignalSpec::new(n, p_n, amp)?, ReplicationKey::new(11, 0, 0))?;
        let alpha = eb_binomial_weight(&x, &slab)?;
        let eb = Posterior::fit_independent(&x, alpha, &slab, FitConfig::default())?;
        let sq = LossSpec::squared();
        println!(
            "A={amp}: HT {:.1}  HTO {:.1}  EB mean {:.1} (alpha_hat = {alpha:.4})",
            dq_loss(&hard_threshold(x.as_slice())?, &theta, sq)?,
            dq_loss(&hard_threshold_oracle(x.as_slice(), p_n)?, &theta, sq)?,
            dq_loss(&eb.mean(), &theta, sq)?
        );
    }
    Ok(())
}
