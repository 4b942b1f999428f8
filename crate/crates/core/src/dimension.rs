//! Priors on the number of nonzero coordinates.
//!
//! Every constructor normalizes eagerly, so `log_pmf` always log-sums to zero.
//! The posterior engine consumes the per-model weights
//! `λ_p = log π_n(p) − log C(n, p)` from [`DimensionPrior::log_model_weight`].

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{invalid, Error, Result};
use crate::special::{ln_binomial, log_sum_exp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DimensionFamily {
    Complexity,
    BetaBinomialPower,
    Binomial,
    Poisson,
    Geometric,
    Custom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionPrior {
    n: usize,
    log_pmf: Vec<f64>,
    family: DimensionFamily,
    params: Vec<f64>,
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        Err(invalid("n", "must be at least 1"))
    } else {
        Ok(())
    }
}

fn check_positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(invalid(name, format!("must be positive and finite, got {v}")))
    }
}

fn check_unit_open(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(invalid(name, format!("must lie strictly between 0 and 1, got {v}")))
    }
}

impl DimensionPrior {
    fn from_log_weights(log_w: Vec<f64>, family: DimensionFamily, params: Vec<f64>) -> Result<Self> {
        if log_w.iter().any(|v| v.is_nan() || *v == f64::INFINITY) {
            return Err(Error::NonFinite("dimension prior weights"));
        }
        let norm = log_sum_exp(&log_w);
        if !norm.is_finite() {
            return Err(invalid("dimension prior", "weights have no positive mass"));
        }
        Ok(Self {
            n: log_w.len() - 1,
            log_pmf: log_w.into_iter().map(|v| v - norm).collect(),
            family,
            params,
        })
    }

    /// Complexity prior `π_n(p) ∝ exp(−κ p log(b n / p))`, with the `p = 0` weight equal to 1.
    pub fn complexity(n: usize, kappa: f64, b: f64) -> Result<Self> {
        check_n(n)?;
        check_positive("kappa", kappa)?;
        check_positive("b", b)?;
        let nf = n as f64;
        let log_w = (0..=n)
            .map(|p| {
                if p == 0 {
                    0.0
                } else {
                    let pf = p as f64;
                    -kappa * pf * (b * nf / pf).ln()
                }
            })
            .collect();
        Self::from_log_weights(log_w, DimensionFamily::Complexity, vec![kappa, b])
    }

    /// `π_n(p) ∝ C(2n − p, n)^κ`; for `κ = 1` this is the Beta-binomial(1, n + 1) prior.
    pub fn betabin_power(n: usize, kappa: f64) -> Result<Self> {
        check_n(n)?;
        check_positive("kappa", kappa)?;
        let log_w = (0..=n)
            .map(|p| kappa * ln_binomial((2 * n - p) as u64, n as u64))
            .collect();
        Self::from_log_weights(log_w, DimensionFamily::BetaBinomialPower, vec![kappa])
    }

    /// Binomial(n, α).
    pub fn binomial(n: usize, alpha: f64) -> Result<Self> {
        check_n(n)?;
        check_unit_open("alpha", alpha)?;
        let (la, lb) = (alpha.ln(), (-alpha).ln_1p());
        let log_w = (0..=n)
            .map(|p| ln_binomial(n as u64, p as u64) + p as f64 * la + (n - p) as f64 * lb)
            .collect();
        Self::from_log_weights(log_w, DimensionFamily::Binomial, vec![alpha])
    }

    /// Poisson(α) truncated to `{0, …, n}`.
    pub fn poisson(n: usize, alpha: f64) -> Result<Self> {
        check_n(n)?;
        check_positive("alpha", alpha)?;
        let la = alpha.ln();
        let log_w = (0..=n)
            .map(|p| p as f64 * la - ln_gamma(p as f64 + 1.0))
            .collect();
        Self::from_log_weights(log_w, DimensionFamily::Poisson, vec![alpha])
    }

    /// Shifted geometric `π_n(p) ∝ λ (1 − λ)^p` truncated to `{0, …, n}`; `λ` is the success probability.
    pub fn geometric(n: usize, lambda: f64) -> Result<Self> {
        check_n(n)?;
        check_unit_open("lambda", lambda)?;
        let (ll, lq) = (lambda.ln(), (-lambda).ln_1p());
        let log_w = (0..=n).map(|p| ll + p as f64 * lq).collect();
        Self::from_log_weights(log_w, DimensionFamily::Geometric, vec![lambda])
    }

    /// User-supplied (unnormalized) log weights for `p = 0..=n`. Entries may be `−∞`.
    pub fn custom(log_weights: Vec<f64>) -> Result<Self> {
        if log_weights.len() < 2 {
            return Err(invalid("log_weights", "need weights for p = 0..=n with n >= 1"));
        }
        Self::from_log_weights(log_weights, DimensionFamily::Custom, Vec::new())
    }

    /// Point mass at `k` (a degenerate custom prior).
    pub fn point_mass(n: usize, k: usize) -> Result<Self> {
        check_n(n)?;
        if k > n {
            return Err(Error::OutOfRange { index: k, len: n + 1 });
        }
        let mut w = vec![f64::NEG_INFINITY; n + 1];
        w[k] = 0.0;
        Self::custom(w)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn family(&self) -> DimensionFamily {
        self.family
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn log_pmf(&self) -> &[f64] {
        &self.log_pmf
    }

    pub fn pmf(&self) -> Vec<f64> {
        self.log_pmf.iter().map(|v| v.exp()).collect()
    }

    /// `log π_n(p) − log C(n, p)`: the prior weight of one particular support of size `p`.
    pub fn log_model_weight(&self, p: usize) -> Result<f64> {
        if p > self.n {
            return Err(Error::OutOfRange {
                index: p,
                len: self.n + 1,
            });
        }
        Ok(self.log_pmf[p] - ln_binomial(self.n as u64, p as u64))
    }

    /// All model weights `λ_0, …, λ_n`.
    pub fn log_model_weights(&self) -> Vec<f64> {
        (0..=self.n)
            .map(|p| self.log_pmf[p] - ln_binomial(self.n as u64, p as u64))
            .collect()
    }

    /// Largest ratio `π_n(p) / π_n(p − 1)` over `p = 1..=n`.
    pub fn max_successive_ratio(&self) -> f64 {
        self.log_pmf
            .windows(2)
            .map(|w| (w[1] - w[0]).exp())
            .fold(0.0, f64::max)
    }

    pub fn mean(&self) -> f64 {
        self.log_pmf
            .iter()
            .enumerate()
            .map(|(p, lp)| p as f64 * lp.exp())
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_pmf(prior: &DimensionPrior, want: &[f64], tol: f64) {
        let got = prior.pmf();
        assert_eq!(got.len(), want.len());
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() < tol, "{got:?} vs {want:?}");
        }
    }

    #[test]
    fn complexity_small_case() {
        let prior = DimensionPrior::complexity(3, 1.0, 3.0).unwrap();
        // unnormalized (1, 1/9, 1/4.5², 1/27)
        let w = [1.0, 1.0 / 9.0, 1.0 / 20.25, 1.0 / 27.0];
        let s: f64 = w.iter().sum();
        let want: Vec<f64> = w.iter().map(|v| v / s).collect();
        assert_pmf(&prior, &want, 1e-14);
    }

    #[test]
    fn complexity_flat_limit() {
        let prior = DimensionPrior::complexity(1, 1e-12, 3.0).unwrap();
        assert_pmf(&prior, &[0.5, 0.5], 1e-11);
    }

    #[test]
    fn complexity_pmf_strictly_decreasing() {
        let prior = DimensionPrior::complexity(100, 0.1, 3.0).unwrap();
        let log_ratios: Vec<f64> = prior.log_pmf().windows(2).map(|w| w[1] - w[0]).collect();
        assert!(log_ratios.iter().all(|&r| r < 0.0));
        // the successive ratios climb toward exp(−κ(log b − 1)) from below
        for r in log_ratios.windows(2) {
            assert!(r[1] > r[0]);
        }
        let limit = -0.1 * (3f64.ln() - 1.0);
        assert!(*log_ratios.last().unwrap() < limit);
    }

    #[test]
    fn betabin_small_cases() {
        assert_pmf(&DimensionPrior::betabin_power(2, 1.0).unwrap(), &[0.6, 0.3, 0.1], 1e-14);
        assert_pmf(&DimensionPrior::betabin_power(1, 1.0).unwrap(), &[2.0 / 3.0, 1.0 / 3.0], 1e-14);
    }

    #[test]
    fn betabin_ratio_matches_closed_form() {
        let n = 40;
        let prior = DimensionPrior::betabin_power(n, 1.0).unwrap();
        for p in 1..=n {
            let got = (prior.log_pmf()[p] - prior.log_pmf()[p - 1]).exp();
            let want = (n - p + 1) as f64 / (2 * n - p + 1) as f64;
            assert!((got - want).abs() < 1e-12);
            assert!(got <= 0.5);
        }
    }

    #[test]
    fn binomial_values_and_mean() {
        assert_pmf(&DimensionPrior::binomial(2, 0.5).unwrap(), &[0.25, 0.5, 0.25], 1e-15);
        assert!(DimensionPrior::binomial(2, 0.0).is_err());
        assert!(DimensionPrior::binomial(2, 1.0).is_err());
        let prior = DimensionPrior::binomial(500, 25.0 / 500.0).unwrap();
        assert!((prior.mean() - 25.0).abs() < 1e-9);
    }

    #[test]
    fn poisson_and_geometric() {
        assert_pmf(&DimensionPrior::poisson(2, 1.0).unwrap(), &[0.4, 0.4, 0.2], 1e-15);
        assert_pmf(
            &DimensionPrior::geometric(2, 0.5).unwrap(),
            &[4.0 / 7.0, 2.0 / 7.0, 1.0 / 7.0],
            1e-15,
        );
        let near_zero = DimensionPrior::poisson(5, 1e-12).unwrap();
        assert!((near_zero.pmf()[0] - 1.0).abs() < 1e-11);
    }

    #[test]
    fn parameter_validation() {
        assert!(DimensionPrior::complexity(0, 1.0, 3.0).is_err());
        assert!(DimensionPrior::complexity(5, 0.0, 3.0).is_err());
        assert!(DimensionPrior::complexity(5, 1.0, -1.0).is_err());
        assert!(DimensionPrior::betabin_power(5, -1.0).is_err());
        assert!(DimensionPrior::poisson(5, 0.0).is_err());
        assert!(DimensionPrior::geometric(5, 1.0).is_err());
        assert!(DimensionPrior::custom(vec![0.0]).is_err());
        assert!(DimensionPrior::custom(vec![f64::NEG_INFINITY; 3]).is_err());
        assert!(DimensionPrior::point_mass(3, 4).is_err());
    }

    #[test]
    fn model_weight_basics() {
        let prior = DimensionPrior::betabin_power(10, 1.0).unwrap();
        assert_eq!(prior.log_model_weight(0).unwrap(), prior.log_pmf()[0]);
        assert!(prior.log_model_weight(11).is_err());
        let big = DimensionPrior::complexity(500, 0.1, 3.0).unwrap();
        assert!(big.log_model_weight(250).unwrap().is_finite());
    }

    #[test]
    fn all_constructors_normalized_small_n() {
        for n in 1..=20 {
            let priors = [
                DimensionPrior::complexity(n, 0.5, 3.0).unwrap(),
                DimensionPrior::betabin_power(n, 0.3).unwrap(),
                DimensionPrior::binomial(n, 0.2).unwrap(),
                DimensionPrior::poisson(n, 2.0).unwrap(),
                DimensionPrior::geometric(n, 0.3).unwrap(),
                DimensionPrior::custom((0..=n).map(|p| -(p as f64).sqrt()).collect()).unwrap(),
            ];
            for prior in priors {
                let s: f64 = prior.pmf().iter().sum();
                assert!((s - 1.0).abs() < 1e-12, "{:?} n={n}", prior.family());
                assert!(prior.pmf().iter().all(|&v| v > 0.0));
            }
        }
    }

    #[test]
    fn exponential_decrease_audit() {
        // b > 1 + e
        let c = DimensionPrior::complexity(200, 1.0, 3.0).unwrap();
        assert!(c.max_successive_ratio() < 1.0);
        let bb = DimensionPrior::betabin_power(200, 1.0).unwrap();
        assert!(bb.max_successive_ratio() <= 0.5 + 1e-12);
    }
}
