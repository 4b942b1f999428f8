//! Elementary symmetric sums of many likelihood ratios without overflow: the
//! log-domain product `∏(1 + r_i Z)` and its leave-one-out polynomials.
//!
//! ```text
//! cargo run --release --example log_polynomials
//! ```

use spikeslab::{leave_one_out_table, product_of_linear_factors, LogPoly, ProductStrategy};

fn main() -> spikeslab::Result<()> {
    // (1 + 2Z)(1 + 3Z) = 1 + 5Z + 6Z²
    let small = product_of_linear_factors(&[2f64.ln(), 3f64.ln()], ProductStrategy::Schoolbook);
    println!("coefficients: {:?}", small.coeffs());

    // ratios as large as e^700 and as small as e^-700 in one product
    let log_r: Vec<f64> = (0..2000).map(|i| 700.0 * ((i as f64) * 0.37).sin()).collect();
    let a = product_of_linear_factors(&log_r, ProductStrategy::Schoolbook);
    let b = product_of_linear_factors(&log_r, ProductStrategy::DivideAndConquer);
    let gap = a
        .log_coeffs()
        .iter()
        .zip(b.log_coeffs())
        .map(|(x, y)| (x - y).abs() / x.abs().max(1.0))
        .fold(0.0, f64::max);
    println!("degree {} ; log F(1) = {:.6} ; strategies agree to {gap:.1e}", a.degree(), a.log_eval_at_one());

    // dropping factor i from the product
    let table = leave_one_out_table(&log_r[..50]);
    let without_7 = table.polynomial(7);
    let back = without_7.mul_linear(log_r[7]);
    let full = table.full();
    let err = back
        .log_coeffs()
        .iter()
        .zip(full.log_coeffs())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    println!("leave-one-out times its factor recovers the full product to {err:.1e}");

    let ones = LogPoly::from_coeffs(&[1.0, 1.0])?;
    println!("(1 + Z)^2 = {:?}", ones.convolve(&ones).coeffs());
    Ok(())
}
