//! Marginal slab densities and slab posterior means for every slab family,
//! closed form next to adaptive quadrature.
//!
//! ```text
//! cargo run --release --example slab_families
//! ```

use spikeslab::SlabPrior;

fn main() -> spikeslab::Result<()> {
    let slabs = [
        ("laplace(1)", SlabPrior::laplace(1.0)?),
        ("gaussian(sd=1.41)", SlabPrior::gaussian(std::f64::consts::SQRT_2)?),
        ("student(3, 1)", SlabPrior::student(3.0, 1.0)?),
        ("exp-power(1.5, 1)", SlabPrior::exp_power(1.5, 1.0)?),
    ];
    for (name, slab) in &slabs {
        println!("{name} (closed form: {})", slab.has_closed_form());
        println!("      x     log psi   quadrature   E[t | x, slab]");
        for x in [0.0, 1.0, 3.0, 6.0, 10.0] {
            println!(
                "{x:>7.1} {:>11.6} {:>12.6} {:>16.4}",
                slab.log_psi(x)?,
                slab.log_psi_by_quadrature(x)?,
                slab.slab_mean(x)?
            );
        }
        println!();
    }
    // heavy tails leave large observations nearly unshrunk, the Gaussian does not
    println!("shrinkage x - E[t | x] at x = 10:");
    for (name, slab) in &slabs {
        println!("  {name:<18} {:.3}", 10.0 - slab.slab_mean(10.0)?);
    }
    Ok(())
}
