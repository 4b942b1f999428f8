//! Exact posterior functionals for the sparse normal-means model
//! `X_i = θ_i + ε_i` under a hierarchical spike-and-slab prior.
//!
//! The common factor `∏ φ(X_i)` is divided out of every support weight, so the
//! inner sums over supports of size `p` become the coefficients of
//! `F(Z) = ∏ (1 + r_i Z)` with `r_i = ψ(X_i)/φ(X_i)`. The dimension posterior is
//! `λ_p F_p / Z` and the inclusion probability of coordinate `i` is
//! `r_i Σ_p λ_{p+1} G_i[p] / Z`, where `G_i` leaves factor `i` out; its
//! complement is `Σ_p λ_p G_i[p] / Z`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dimension::DimensionPrior;
use crate::error::{invalid, Error, Result};
use crate::logpoly::{leave_one_out_table, product_of_linear_factors, LogPoly, ProductStrategy};
use crate::slab::SlabPrior;
use crate::special::{log_norm_pdf, log_sum_exp};

/// Observed data `X ∈ ℝⁿ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ObservationVector(Vec<f64>);

impl ObservationVector {
    pub fn new(x: Vec<f64>) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::Empty);
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("observation"));
        }
        Ok(Self(x))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for ObservationVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    pub strategy: ProductStrategy,
    /// Credible interval levels.
    pub levels: (f64, f64),
    /// Absolute tolerance on quantiles.
    pub quantile_tol: f64,
    /// Initial half-width of the quantile search bracket around `[min(x, 0), max(x, 0)]`.
    pub bracket: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            strategy: ProductStrategy::Schoolbook,
            levels: (0.025, 0.975),
            quantile_tol: 1e-9,
            bracket: 40.0,
        }
    }
}

/// Marginal posterior of one coordinate: an atom `1 − q` at zero plus `q` times
/// the slab-conditional posterior with distribution function `H(u) = ψ(x, u)/ψ(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Marginal {
    pub x: f64,
    pub inclusion: f64,
    /// `1 − inclusion`, carried separately so it stays accurate when `inclusion` is near one.
    exclusion: f64,
    log_psi: f64,
    slab: SlabPrior,
    tol: f64,
    bracket: f64,
}

impl Marginal {
    pub fn new(x: f64, inclusion: f64, slab: SlabPrior, cfg: &FitConfig) -> Result<Self> {
        if !(0.0..=1.0).contains(&inclusion) {
            return Err(invalid("inclusion", format!("must lie in [0, 1], got {inclusion}")));
        }
        Ok(Self {
            x,
            inclusion,
            exclusion: 1.0 - inclusion,
            log_psi: slab.log_psi(x)?,
            slab,
            tol: cfg.quantile_tol,
            bracket: cfg.bracket,
        })
    }

    /// `log H(u)`.
    fn log_lower(&self, u: f64) -> Result<f64> {
        Ok(self.slab.log_psi_partial(self.x, u)? - self.log_psi)
    }

    /// `log(1 − H(u))`, via the symmetry `∫_u^∞ φ(x − t) g(t) dt = ψ(−x, −u)`.
    fn log_upper(&self, u: f64) -> Result<f64> {
        Ok(self.slab.log_psi_partial(-self.x, -u)? - self.log_psi)
    }

    /// Slab-conditional distribution function `H(u)`.
    pub fn slab_cdf(&self, u: f64) -> Result<f64> {
        Ok(self.log_lower(u)?.exp().min(1.0))
    }

    /// Posterior distribution function of the coordinate at `u` (right-continuous).
    pub fn cdf(&self, u: f64) -> Result<f64> {
        if u.is_nan() {
            return Err(Error::NonFinite("cdf argument"));
        }
        let q = self.inclusion;
        if u < 0.0 {
            return Ok((q * self.log_lower(u)?.exp()).clamp(0.0, 1.0));
        }
        // take whichever tail of H is the smaller one, so neither form cancels
        let log_lower = self.log_lower(u)?;
        let slab_part = if log_lower <= -std::f64::consts::LN_2 {
            self.exclusion + q * log_lower.exp()
        } else {
            1.0 - q * self.log_upper(u)?.exp()
        };
        Ok(slab_part.clamp(0.0, 1.0))
    }

    /// Generalized inverse of `H`, with `H⁻¹(v) = −∞` for `v ≤ 0` and `+∞` for `v ≥ 1`.
    pub fn slab_quantile(&self, v: f64) -> Result<f64> {
        if v.is_nan() {
            return Err(Error::NonFinite("quantile level"));
        }
        if v <= 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        if v >= 1.0 {
            return Ok(f64::INFINITY);
        }
        // below(u) is true when H(u) < v
        let use_lower = v <= 0.5;
        let target = if use_lower { v.ln() } else { (1.0 - v).ln() };
        let below = |u: f64| -> Result<bool> {
            if use_lower {
                Ok(self.log_lower(u)? < target)
            } else {
                Ok(self.log_upper(u)? > target)
            }
        };
        let mut lo = self.x.min(0.0) - self.bracket;
        let mut hi = self.x.max(0.0) + self.bracket;
        let mut width = self.bracket;
        while !below(lo)? {
            width *= 2.0;
            lo -= width;
        }
        width = self.bracket;
        while below(hi)? {
            width *= 2.0;
            hi += width;
        }
        while hi - lo > self.tol {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if below(mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Generalized inverse of [`Self::cdf`].
    pub fn quantile(&self, level: f64) -> Result<f64> {
        if !(level > 0.0 && level < 1.0) {
            return Err(invalid("level", format!("must lie in (0, 1), got {level}")));
        }
        let q = self.inclusion;
        if q == 0.0 {
            return Ok(0.0);
        }
        let below_zero = q * self.log_lower(0.0)?.exp();
        let at_zero = self.cdf(0.0)?;
        if level <= below_zero {
            self.slab_quantile(level / q)
        } else if level <= at_zero {
            Ok(0.0)
        } else {
            self.slab_quantile((level - self.exclusion) / q)
        }
    }

    /// `[H⁻¹(1 − 1/(2q)) ∨ 0] + [H⁻¹(1/(2q)) ∧ 0]`.
    pub fn median(&self) -> Result<f64> {
        let half_inv = 0.5 / self.inclusion;
        let upper = self.slab_quantile(1.0 - half_inv)?.max(0.0);
        let lower = self.slab_quantile(half_inv)?.min(0.0);
        Ok(upper + lower)
    }
}

/// Everything needed to evaluate posterior functionals after a fit.
#[derive(Debug, Clone)]
pub struct Posterior {
    x: ObservationVector,
    slab: SlabPrior,
    config: FitConfig,
    log_partition: f64,
    dim_log_pmf: Vec<f64>,
    inclusion: Vec<f64>,
    exclusion: Vec<f64>,
    slab_mean: Vec<f64>,
    log_psi: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorSummary {
    /// `log Q_n − Σ log φ(x_i)`.
    pub log_partition: f64,
    pub dim_log_pmf: Vec<f64>,
    pub inclusion_prob: Vec<f64>,
    pub mean: Vec<f64>,
    pub median: Vec<f64>,
    pub credible_lo: Vec<f64>,
    pub credible_hi: Vec<f64>,
    pub levels: (f64, f64),
}

/// Fit and summarize with the default configuration.
pub fn fit(x: &ObservationVector, dim_prior: &DimensionPrior, slab: &SlabPrior) -> Result<PosteriorSummary> {
    Posterior::fit(x, dim_prior, slab, FitConfig::default())?.summary()
}

fn slab_terms(x: &[f64], slab: &SlabPrior) -> Result<(Vec<f64>, Vec<f64>)> {
    let rows: Result<Vec<(f64, f64)>> = x
        .par_iter()
        .map(|&xi| Ok((slab.log_psi(xi)?, slab.slab_mean(xi)?)))
        .collect();
    Ok(rows?.into_iter().unzip())
}

impl Posterior {
    pub fn fit(x: &ObservationVector, dim_prior: &DimensionPrior, slab: &SlabPrior, config: FitConfig) -> Result<Self> {
        let n = x.len();
        if dim_prior.n() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: dim_prior.n(),
            });
        }
        let (log_psi, slab_mean) = slab_terms(x.as_slice(), slab)?;
        let log_r: Vec<f64> = x
            .as_slice()
            .iter()
            .zip(&log_psi)
            .map(|(&xi, lp)| lp - log_norm_pdf(xi))
            .collect();
        if log_r.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("log ψ/φ ratio"));
        }
        let lambda = dim_prior.log_model_weights();
        let table = leave_one_out_table(&log_r);
        let full: LogPoly = match config.strategy {
            ProductStrategy::Schoolbook => table.full().clone(),
            s => product_of_linear_factors(&log_r, s),
        };
        let terms: Vec<f64> = full
            .log_coeffs()
            .iter()
            .zip(&lambda)
            .map(|(c, l)| c + l)
            .collect();
        let log_z = log_sum_exp(&terms);
        let dim_log_pmf = terms.iter().map(|t| t - log_z).collect();
        let inclusion = table
            .weighted_sums(&lambda, 1)
            .into_iter()
            .zip(&log_r)
            .map(|(s, lr)| (lr + s - log_z).exp().min(1.0))
            .collect();
        let exclusion = table
            .weighted_sums(&lambda, 0)
            .into_iter()
            .map(|s| (s - log_z).exp().min(1.0))
            .collect();
        Ok(Self {
            x: x.clone(),
            slab: *slab,
            config,
            log_partition: log_z,
            dim_log_pmf,
            inclusion,
            exclusion,
            slab_mean,
            log_psi,
        })
    }

    /// Posterior under a Binomial(n, α) dimension prior, where the coordinates are
    /// independent a posteriori: `q_i = α r_i / (1 − α + α r_i)`. Runs in `O(n²)`.
    pub fn fit_independent(x: &ObservationVector, alpha: f64, slab: &SlabPrior, config: FitConfig) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(invalid("alpha", format!("must lie in (0, 1), got {alpha}")));
        }
        let (log_psi, slab_mean) = slab_terms(x.as_slice(), slab)?;
        let (la, lb) = (alpha.ln(), (-alpha).ln_1p());
        let mut log_partition = 0.0;
        let mut inclusion = Vec::with_capacity(x.len());
        let mut log_q = Vec::with_capacity(x.len());
        let mut log_1mq = Vec::with_capacity(x.len());
        let mut exclusion = Vec::with_capacity(x.len());
        for (&xi, lp) in x.as_slice().iter().zip(&log_psi) {
            let on = la + lp - log_norm_pdf(xi);
            let norm = crate::special::log_add_exp(on, lb);
            log_partition += norm;
            log_q.push(on - norm);
            log_1mq.push(lb - norm);
            inclusion.push((on - norm).exp());
            exclusion.push((lb - norm).exp());
        }
        // dimension posterior is Poisson-binomial: ∏ (1 − q_i + q_i Z)
        let ratio: Vec<f64> = log_q.iter().zip(&log_1mq).map(|(a, b)| a - b).collect();
        let base: f64 = log_1mq.iter().sum();
        let poly = product_of_linear_factors(&ratio, config.strategy);
        let mut dim_log_pmf: Vec<f64> = poly.log_coeffs().iter().map(|c| c + base).collect();
        let norm = log_sum_exp(&dim_log_pmf);
        dim_log_pmf.iter_mut().for_each(|v| *v -= norm);
        Ok(Self {
            x: x.clone(),
            slab: *slab,
            config,
            log_partition,
            dim_log_pmf,
            inclusion,
            exclusion,
            slab_mean,
            log_psi,
        })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn observations(&self) -> &ObservationVector {
        &self.x
    }

    pub fn slab(&self) -> &SlabPrior {
        &self.slab
    }

    pub fn config(&self) -> &FitConfig {
        &self.config
    }

    pub fn log_partition(&self) -> f64 {
        self.log_partition
    }

    /// `log Q_n` including the factored-out `∏ φ(x_i)`.
    pub fn log_partition_full(&self) -> f64 {
        self.log_partition + self.x.as_slice().iter().map(|&v| log_norm_pdf(v)).sum::<f64>()
    }

    pub fn dim_log_pmf(&self) -> &[f64] {
        &self.dim_log_pmf
    }

    pub fn inclusion_prob(&self) -> &[f64] {
        &self.inclusion
    }

    /// `1 − q_i`, computed from the supports that leave `i` out rather than by subtraction.
    pub fn exclusion_prob(&self) -> &[f64] {
        &self.exclusion
    }

    /// `ζ(x_i)/ψ(x_i)` per coordinate.
    pub fn slab_means(&self) -> &[f64] {
        &self.slab_mean
    }

    pub fn log_psi(&self) -> &[f64] {
        &self.log_psi
    }

    pub fn mean(&self) -> Vec<f64> {
        self.inclusion
            .iter()
            .zip(&self.slab_mean)
            .map(|(q, m)| q * m)
            .collect()
    }

    /// `E[θ_i² | X] = q_i ∫ t² φ(x_i − t) g(t) dt / ψ(x_i)`.
    pub fn second_moments(&self) -> Result<Vec<f64>> {
        self.x
            .as_slice()
            .par_iter()
            .zip(&self.inclusion)
            .map(|(&xi, &q)| Ok(q * self.slab.slab_second_moment(xi)?))
            .collect()
    }

    /// Posterior expected dimension `Σ_p p Π(|S| = p | X)`.
    pub fn expected_dimension(&self) -> f64 {
        self.dim_log_pmf
            .iter()
            .enumerate()
            .map(|(p, lp)| p as f64 * lp.exp())
            .sum()
    }

    /// `Π(|S| > k | X)`.
    pub fn dimension_tail(&self, k: usize) -> f64 {
        if k + 1 >= self.dim_log_pmf.len() {
            return 0.0;
        }
        log_sum_exp(&self.dim_log_pmf[k + 1..]).exp()
    }

    pub fn marginal(&self, i: usize) -> Result<Marginal> {
        if i >= self.len() {
            return Err(Error::OutOfRange {
                index: i,
                len: self.len(),
            });
        }
        Ok(Marginal {
            x: self.x.as_slice()[i],
            inclusion: self.inclusion[i],
            exclusion: self.exclusion[i],
            log_psi: self.log_psi[i],
            slab: self.slab,
            tol: self.config.quantile_tol,
            bracket: self.config.bracket,
        })
    }

    pub fn marginal_cdf(&self, i: usize, u: f64) -> Result<f64> {
        self.marginal(i)?.cdf(u)
    }

    pub fn marginal_quantile(&self, i: usize, level: f64) -> Result<f64> {
        self.marginal(i)?.quantile(level)
    }

    pub fn coordinatewise_median(&self, i: usize) -> Result<f64> {
        self.marginal(i)?.median()
    }

    pub fn medians(&self) -> Result<Vec<f64>> {
        (0..self.len())
            .into_par_iter()
            .map(|i| self.coordinatewise_median(i))
            .collect()
    }

    /// Medians and credible interval endpoints, per coordinate.
    pub fn medians_and_intervals(&self) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
        let (lo_level, hi_level) = self.config.levels;
        let rows: Result<Vec<(f64, f64, f64)>> = (0..self.len())
            .into_par_iter()
            .map(|i| {
                let m = self.marginal(i)?;
                Ok((m.median()?, m.quantile(lo_level)?, m.quantile(hi_level)?))
            })
            .collect();
        let rows = rows?;
        Ok((
            rows.iter().map(|r| r.0).collect(),
            rows.iter().map(|r| r.1).collect(),
            rows.iter().map(|r| r.2).collect(),
        ))
    }

    pub fn summary(&self) -> Result<PosteriorSummary> {
        let (median, credible_lo, credible_hi) = self.medians_and_intervals()?;
        Ok(PosteriorSummary {
            log_partition: self.log_partition,
            dim_log_pmf: self.dim_log_pmf.clone(),
            inclusion_prob: self.inclusion.clone(),
            mean: self.mean(),
            median,
            credible_lo,
            credible_hi,
            levels: self.config.levels,
        })
    }
}

/// Marginal maximum-likelihood mixing weight of the independent spike-and-slab
/// model, `argmax_α Σ log((1 − α) φ(x_i) + α ψ(x_i))` over `[1/n, 1 − 10⁻⁶]`.
pub fn eb_binomial_weight(x: &ObservationVector, slab: &SlabPrior) -> Result<f64> {
    let log_r: Vec<f64> = x
        .as_slice()
        .par_iter()
        .map(|&xi| Ok(slab.log_psi(xi)? - log_norm_pdf(xi)))
        .collect::<Result<_>>()?;
    let lo = (1.0 / x.len() as f64).min(0.5);
    let hi = 1.0 - 1e-6;
    // log-likelihood up to the constant Σ log φ(x_i)
    let loglik = |a: f64| -> f64 {
        let (la, lb) = (a.ln(), (-a).ln_1p());
        log_r.iter().map(|lr| crate::special::log_add_exp(la + lr, lb)).sum()
    };
    // derivative Σ (r − 1)/(1 + α(r − 1)), written to avoid overflow of r
    let slope = |a: f64| -> f64 {
        log_r
            .iter()
            .map(|&lr| {
                if lr >= 0.0 {
                    let s = (-lr).exp();
                    (1.0 - s) / (a + (1.0 - a) * s)
                } else {
                    let r = lr.exp();
                    (r - 1.0) / (1.0 + a * (r - 1.0))
                }
            })
            .sum()
    };
    // the log-likelihood is concave in α
    if slope(lo) <= 0.0 {
        return Ok(lo);
    }
    if slope(hi) >= 0.0 {
        return Ok(hi);
    }
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (loglik(c), loglik(d));
    while b - a > 1e-8 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = loglik(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = loglik(d);
        }
    }
    Ok(0.5 * (a + b))
}
