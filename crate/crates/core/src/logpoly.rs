//! Polynomials with nonnegative coefficients stored as log-coefficients.
//!
//! The inner sums over supports of a fixed size are elementary symmetric
//! polynomials of the per-coordinate ratios `r_i`, i.e. coefficients of
//! `∏_i (1 + r_i Z)`. Products and sums of nonnegative terms are all that is ever
//! needed, so no sign tracking is required and no subtraction occurs.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::log_add_exp;

const NEG_INF: f64 = f64::NEG_INFINITY;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogPoly {
    log_coeffs: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ProductStrategy {
    /// Multiply the factors in one at a time.
    #[default]
    Schoolbook,
    /// Balanced product tree.
    DivideAndConquer,
}

impl LogPoly {
    /// The constant polynomial 1.
    pub fn one() -> Self {
        Self { log_coeffs: vec![0.0] }
    }

    pub fn from_log_coeffs(log_coeffs: Vec<f64>) -> Result<Self> {
        if log_coeffs.is_empty() {
            return Err(Error::LengthMismatch { expected: 1, got: 0 });
        }
        if log_coeffs.iter().any(|v| v.is_nan() || *v == f64::INFINITY) {
            return Err(Error::NonFinite("log-polynomial coefficient"));
        }
        Ok(Self { log_coeffs })
    }

    /// Build from linear-domain nonnegative coefficients.
    pub fn from_coeffs(coeffs: &[f64]) -> Result<Self> {
        if coeffs.iter().any(|&c| c < 0.0 || !c.is_finite()) {
            return Err(Error::NonFinite("nonnegative polynomial coefficient"));
        }
        Self::from_log_coeffs(coeffs.iter().map(|c| c.ln()).collect())
    }

    /// `1 + r Z` given `log r`.
    pub fn linear(log_r: f64) -> Self {
        Self {
            log_coeffs: vec![0.0, log_r],
        }
    }

    pub fn degree(&self) -> usize {
        self.log_coeffs.len() - 1
    }

    pub fn log_coeffs(&self) -> &[f64] {
        &self.log_coeffs
    }

    pub fn coeffs(&self) -> Vec<f64> {
        self.log_coeffs.iter().map(|v| v.exp()).collect()
    }

    /// `log P(1)`, the log of the coefficient sum.
    pub fn log_eval_at_one(&self) -> f64 {
        crate::special::log_sum_exp(&self.log_coeffs)
    }

    /// Polynomial product: coefficient `k` is the log-sum-exp of `a_i + b_j` over `i + j = k`.
    pub fn convolve(&self, other: &LogPoly) -> LogPoly {
        let (a, b) = (&self.log_coeffs, &other.log_coeffs);
        let deg = a.len() + b.len() - 2;
        let mut out = Vec::with_capacity(deg + 1);
        for k in 0..=deg {
            let lo = k.saturating_sub(b.len() - 1);
            let hi = k.min(a.len() - 1);
            let mut max = NEG_INF;
            for i in lo..=hi {
                max = max.max(a[i] + b[k - i]);
            }
            if max == NEG_INF {
                out.push(NEG_INF);
                continue;
            }
            let mut sum = 0.0;
            for i in lo..=hi {
                sum += (a[i] + b[k - i] - max).exp();
            }
            out.push(max + sum.ln());
        }
        LogPoly { log_coeffs: out }
    }

    /// Multiply in one linear factor `1 + r Z`.
    pub fn mul_linear(&self, log_r: f64) -> LogPoly {
        let c = &self.log_coeffs;
        let mut out = Vec::with_capacity(c.len() + 1);
        out.push(c[0]);
        for k in 1..c.len() {
            out.push(log_add_exp(c[k], c[k - 1] + log_r));
        }
        out.push(c[c.len() - 1] + log_r);
        LogPoly { log_coeffs: out }
    }

    /// `log Σ_p exp(log_w[p] + log_coeffs[p])`.
    pub fn weighted_coeff_sum(&self, log_w: &[f64]) -> Result<f64> {
        if log_w.len() != self.log_coeffs.len() {
            return Err(Error::LengthMismatch {
                expected: self.log_coeffs.len(),
                got: log_w.len(),
            });
        }
        Ok(crate::special::log_sum_exp_iter(
            self.log_coeffs.iter().zip(log_w).map(|(c, w)| c + w),
        ))
    }
}

/// `∏_i (1 + r_i Z)` from `log r_i`; coefficient `p` is the `p`-th elementary symmetric polynomial.
pub fn product_of_linear_factors(log_r: &[f64], strategy: ProductStrategy) -> LogPoly {
    match strategy {
        ProductStrategy::Schoolbook => log_r
            .iter()
            .fold(LogPoly::one(), |acc, &lr| acc.mul_linear(lr)),
        ProductStrategy::DivideAndConquer => product_tree(log_r),
    }
}

fn product_tree(log_r: &[f64]) -> LogPoly {
    match log_r.len() {
        0 => LogPoly::one(),
        1 => LogPoly::linear(log_r[0]),
        n if n <= 16 => product_of_linear_factors(log_r, ProductStrategy::Schoolbook),
        n => {
            let (left, right) = log_r.split_at(n / 2);
            let (l, r) = rayon::join(|| product_tree(left), || product_tree(right));
            l.convolve(&r)
        }
    }
}

/// Prefix and suffix partial products for leave-one-out polynomials
/// `G_i = ∏_{j≠i} (1 + r_j Z)`.
#[derive(Debug, Clone)]
pub struct LeaveOneOut {
    /// `prefix[i] = ∏_{j<i}`, `i = 0..=n`.
    prefix: Vec<LogPoly>,
    /// `tail[i] = ∏_{j>=i}`, `i = 0..=n`.
    tail: Vec<LogPoly>,
    log_r: Vec<f64>,
}

/// Build the prefix/suffix tables in `O(n²)`.
pub fn leave_one_out_table(log_r: &[f64]) -> LeaveOneOut {
    let n = log_r.len();
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(LogPoly::one());
    for &lr in log_r {
        let next = prefix.last().expect("non-empty").mul_linear(lr);
        prefix.push(next);
    }
    let mut tail = vec![LogPoly::one(); n + 1];
    for i in (0..n).rev() {
        tail[i] = tail[i + 1].mul_linear(log_r[i]);
    }
    LeaveOneOut {
        prefix,
        tail,
        log_r: log_r.to_vec(),
    }
}

impl LeaveOneOut {
    pub fn len(&self) -> usize {
        self.prefix.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `∏_{j<i} (1 + r_j Z)` for `i = 0..=n`.
    pub fn prefix(&self, i: usize) -> &LogPoly {
        &self.prefix[i]
    }

    /// `∏_{j>i} (1 + r_j Z)` for `i = 0..n`; `suffix(n)` is the empty product.
    pub fn suffix(&self, i: usize) -> &LogPoly {
        &self.tail[(i + 1).min(self.len())]
    }

    /// The full product `∏_j (1 + r_j Z)`.
    pub fn full(&self) -> &LogPoly {
        &self.prefix[self.len()]
    }

    /// `G_i = prefix(i) ⊛ suffix(i)`.
    pub fn polynomial(&self, i: usize) -> LogPoly {
        self.prefix(i).convolve(self.suffix(i))
    }

    /// `log Σ_p exp(log_w[p + shift] + log G_i[p])`, without materializing `G_i`.
    ///
    /// `log_w` must have at least `n - 1 + shift + 1` entries.
    pub fn weighted_sum(&self, i: usize, log_w: &[f64], shift: usize) -> f64 {
        let pre = self.prefix(i).log_coeffs();
        let suf = self.suffix(i).log_coeffs();
        debug_assert!(log_w.len() >= pre.len() + suf.len() - 1 + shift);
        let mut max = NEG_INF;
        for (a, &pa) in pre.iter().enumerate() {
            if pa == NEG_INF {
                continue;
            }
            let w = &log_w[a + shift..a + shift + suf.len()];
            for (sb, wb) in suf.iter().zip(w) {
                max = max.max(pa + sb + wb);
            }
        }
        if max == NEG_INF || max == f64::INFINITY {
            return max;
        }
        let mut total = 0.0;
        for (a, &pa) in pre.iter().enumerate() {
            if pa == NEG_INF {
                continue;
            }
            let base = pa - max;
            let w = &log_w[a + shift..a + shift + suf.len()];
            let mut row = 0.0;
            for (sb, wb) in suf.iter().zip(w) {
                row += (base + sb + wb).exp();
            }
            total += row;
        }
        max + total.ln()
    }

    /// [`Self::weighted_sum`] for every coordinate in `O(n²)` total.
    ///
    /// Sweeps the suffix side backwards, carrying the weights already contracted
    /// with the suffix product, `A_i[m] = Σ_b suffix(i)[b] w[m + b]`, which obeys
    /// `A_{i−1}[m] = A_i[m] + r_i A_i[m + 1]`. Every step adds nonnegative terms.
    pub fn weighted_sums(&self, log_w: &[f64], shift: usize) -> Vec<f64> {
        let n = self.len();
        if n == 0 {
            return Vec::new();
        }
        // A_{n−1} = w; entries past the end of w are zero
        let mut contracted: Vec<f64> = log_w.to_vec();
        contracted.push(NEG_INF);
        let mut out = vec![NEG_INF; n];
        for i in (0..n).rev() {
            let pre = self.prefix(i).log_coeffs();
            out[i] = crate::special::log_sum_exp_iter(
                pre.iter()
                    .enumerate()
                    .map(|(a, pa)| pa + contracted.get(a + shift).copied().unwrap_or(NEG_INF)),
            );
            if i > 0 {
                let lr = self.log_r[i];
                for m in 0..contracted.len() - 1 {
                    contracted[m] = log_add_exp(contracted[m], lr + contracted[m + 1]);
                }
            }
        }
        out
    }

    /// [`Self::weighted_sum`] for every coordinate by explicit per-coordinate
    /// contraction, `O(n³)`; run in parallel across coordinates.
    pub fn weighted_sums_direct(&self, log_w: &[f64], shift: usize) -> Vec<f64> {
        (0..self.len())
            .into_par_iter()
            .map(|i| self.weighted_sum(i, log_w, shift))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_coeffs(p: &LogPoly, want: &[f64], tol: f64) {
        let got = p.coeffs();
        assert_eq!(got.len(), want.len(), "{got:?}");
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() <= tol * w.abs().max(1.0), "{got:?} vs {want:?}");
        }
    }

    #[test]
    fn small_products() {
        let lr = [2f64.ln(), (1.0f64 / 3.0).ln()];
        for s in [ProductStrategy::Schoolbook, ProductStrategy::DivideAndConquer] {
            assert_coeffs(&product_of_linear_factors(&lr, s), &[1.0, 7.0 / 3.0, 2.0 / 3.0], 1e-15);
            assert_coeffs(&product_of_linear_factors(&[0.0; 3], s), &[1.0, 3.0, 3.0, 1.0], 1e-15);
        }
        assert_coeffs(&product_of_linear_factors(&[], ProductStrategy::Schoolbook), &[1.0], 0.0);
    }

    #[test]
    fn convolve_examples() {
        let a = LogPoly::from_coeffs(&[1.0, 2.0]).unwrap();
        let b = LogPoly::from_coeffs(&[3.0, 1.0]).unwrap();
        assert_coeffs(&a.convolve(&b), &[3.0, 7.0, 2.0], 1e-15);
        assert_eq!(a.convolve(&LogPoly::one()), a);
    }

    #[test]
    fn zero_coefficients_propagate() {
        let a = LogPoly::from_coeffs(&[1.0, 0.0, 2.0]).unwrap();
        let b = LogPoly::from_coeffs(&[0.0, 1.0]).unwrap();
        let c = a.convolve(&b);
        assert_eq!(c.log_coeffs()[0], NEG_INF);
        assert_coeffs(&c, &[0.0, 1.0, 0.0, 2.0], 1e-15);
        assert_eq!(LogPoly::linear(NEG_INF).mul_linear(0.0).coeffs(), vec![1.0, 1.0, 0.0]);
    }

    #[test]
    fn leave_one_out_examples() {
        let t = leave_one_out_table(&[0.0, 0.0]);
        assert_coeffs(&t.polynomial(0), &[1.0, 1.0], 1e-15);
        let t = leave_one_out_table(&[0.0, 2f64.ln(), 3f64.ln()]);
        assert_coeffs(&t.polynomial(1), &[1.0, 4.0, 3.0], 1e-15);
        assert_coeffs(t.full(), &[1.0, 6.0, 11.0, 6.0], 1e-14);
        assert_eq!(t.len(), 3);
    }

    #[test]
    fn weighted_sum_without_materializing() {
        let lr = [0.3, -1.2, 2.0, 0.0, -0.5];
        let t = leave_one_out_table(&lr);
        let log_w: Vec<f64> = (0..6).map(|p| -0.7 * p as f64).collect();
        for i in 0..lr.len() {
            let g = t.polynomial(i);
            let direct = g.weighted_coeff_sum(&log_w[1..]).unwrap();
            let fast = t.weighted_sum(i, &log_w, 1);
            assert!((direct - fast).abs() < 1e-13);
        }
        for shift in [0, 1] {
            let swept = t.weighted_sums(&log_w, shift);
            let direct = t.weighted_sums_direct(&log_w, shift);
            for (a, b) in swept.iter().zip(&direct) {
                assert!((a - b).abs() < 1e-13, "{swept:?} vs {direct:?}");
            }
        }
    }

    #[test]
    fn weighted_coeff_sum_examples() {
        let p = LogPoly::from_coeffs(&[1.0, 1.0, 1.0]).unwrap();
        assert!((p.weighted_coeff_sum(&[0.0; 3]).unwrap() - 3f64.ln()).abs() < 1e-15);
        let q = LogPoly::from_coeffs(&[2.0, 5.0, 7.0]).unwrap();
        let one_hot = [NEG_INF, 0.0, NEG_INF];
        assert_eq!(q.weighted_coeff_sum(&one_hot).unwrap(), 5f64.ln());
        assert!(q.weighted_coeff_sum(&[0.0; 2]).is_err());
    }

    #[test]
    fn rejects_nan() {
        assert!(LogPoly::from_log_coeffs(vec![0.0, f64::NAN]).is_err());
        assert!(LogPoly::from_log_coeffs(vec![]).is_err());
    }
}
