//! Desk-scale Monte Carlo checks of the asymptotic statements: dimension
//! control, contraction at the `p_n log(n/p_n)` scale, and the shrinkage
//! penalty of light-tailed slabs.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::harness::config::{PriorSpec, SlabSpec};
use crate::harness::data::{generate_data, ReplicationKey, SignalSpec};
use crate::harness::table::mean_and_se;
use crate::posterior::{FitConfig, Posterior};
use crate::slab::SlabPrior;
use crate::dimension::DimensionPrior;

/// Average tail mass below which a multiplier `M` counts as controlling the dimension.
pub const DIMENSION_TAIL_TARGET: f64 = 0.01;

/// A contraction ratio sequence counts as bounded when max/min stays below this.
pub const CONTRACTION_SPREAD_LIMIT: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionRow {
    pub m: f64,
    /// Mean over replications of `Π(|S| > M p_n | X)`.
    pub mean_tail: f64,
    pub se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionReport {
    pub n: usize,
    pub p_n: usize,
    pub amplitude: f64,
    pub reps: usize,
    pub rows: Vec<DimensionRow>,
    /// Smallest `M` with mean tail mass below [`DIMENSION_TAIL_TARGET`].
    pub smallest_m: Option<f64>,
}

impl DimensionReport {
    pub fn row(&self, m: f64) -> Option<&DimensionRow> {
        self.rows.iter().find(|r| r.m == m)
    }
}

/// Posterior mass on models larger than `M p_n`, averaged over replications.
///
/// `M = 0` is allowed and gives `1 − Π(|S| = 0 | X)`.
#[allow(clippy::too_many_arguments)]
pub fn run_dimension_check(
    n: usize,
    p_n: usize,
    amplitude: f64,
    m_grid: &[f64],
    reps: usize,
    prior: &DimensionPrior,
    slab: &SlabPrior,
    seed: u64,
) -> Result<DimensionReport> {
    if reps == 0 {
        return Err(invalid("reps", "must be at least 1"));
    }
    if prior.n() != n {
        return Err(invalid("prior", format!("built for n = {}, need n = {n}", prior.n())));
    }
    if m_grid.iter().any(|m| !(m.is_finite() && *m >= 0.0)) {
        return Err(invalid("m_grid", "multipliers must be finite and nonnegative"));
    }
    let spec = SignalSpec::new(n, p_n, amplitude)?;
    let tails: Vec<Vec<f64>> = (0..reps)
        .into_par_iter()
        .map(|r| {
            let (_, x) = generate_data(&spec, ReplicationKey::new(seed, 0, r as u32))?;
            let post = Posterior::fit(&x, prior, slab, FitConfig::default())?;
            Ok(m_grid
                .iter()
                .map(|&m| post.dimension_tail((m * p_n as f64).floor() as usize))
                .collect())
        })
        .collect::<Result<_>>()?;

    let rows: Vec<DimensionRow> = m_grid
        .iter()
        .enumerate()
        .map(|(j, &m)| {
            let col: Vec<f64> = tails.iter().map(|t| t[j]).collect();
            let (mean_tail, se) = mean_and_se(&col);
            DimensionRow { m, mean_tail, se }
        })
        .collect();
    let smallest_m = rows
        .iter()
        .filter(|r| r.mean_tail < DIMENSION_TAIL_TARGET)
        .map(|r| r.m)
        .fold(None, |acc: Option<f64>, m| Some(acc.map_or(m, |a| a.min(m))));
    Ok(DimensionReport {
        n,
        p_n,
        amplitude,
        reps,
        rows,
        smallest_m,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractionRow {
    pub p_n: usize,
    /// Mean over replications of `∫ ‖θ − θ₀‖² dΠ(θ | X)`.
    pub risk: f64,
    pub se: f64,
    /// `p_n log(n / p_n)`.
    pub rate: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractionReport {
    pub n: usize,
    pub amplitude: f64,
    pub reps: usize,
    pub rows: Vec<ContractionRow>,
    /// max ratio / min ratio over the grid.
    pub spread: f64,
    pub bounded: bool,
}

/// Posterior quadratic risk, `Σ_i E[θ_i² | X] − 2 θ₀ᵢ E[θ_i | X] + θ₀ᵢ²`.
pub fn posterior_risk(post: &Posterior, theta0: &[f64]) -> Result<f64> {
    let second = post.second_moments()?;
    let mean = post.mean();
    let risk: f64 = second
        .iter()
        .zip(&mean)
        .zip(theta0)
        .map(|((s, m), t)| s - 2.0 * t * m + t * t)
        .sum();
    // cancellation can leave a tiny negative value when the posterior is a near point mass at θ₀
    Ok(risk.max(0.0))
}

pub fn run_contraction_check(
    n: usize,
    pn_grid: &[usize],
    amplitude: f64,
    reps: usize,
    prior: &PriorSpec,
    slab: &SlabPrior,
    seed: u64,
) -> Result<ContractionReport> {
    if reps == 0 {
        return Err(invalid("reps", "must be at least 1"));
    }
    if pn_grid.is_empty() || pn_grid.iter().any(|&p| p == 0 || 2 * p >= n) {
        return Err(invalid("pn_grid", "every p_n must lie in (0, n/2)"));
    }
    let dim_prior = prior.build(n)?;
    let mut rows = Vec::with_capacity(pn_grid.len());
    for (c, &p_n) in pn_grid.iter().enumerate() {
        let spec = SignalSpec::new(n, p_n, amplitude)?;
        let risks: Vec<f64> = (0..reps)
            .into_par_iter()
            .map(|r| {
                let (theta, x) = generate_data(&spec, ReplicationKey::new(seed, c as u32, r as u32))?;
                let post = Posterior::fit(&x, &dim_prior, slab, FitConfig::default())?;
                posterior_risk(&post, &theta)
            })
            .collect::<Result<_>>()?;
        let (risk, se) = mean_and_se(&risks);
        let rate = p_n as f64 * (n as f64 / p_n as f64).ln();
        rows.push(ContractionRow {
            p_n,
            risk,
            se,
            rate,
            ratio: risk / rate,
        });
    }
    let max = rows.iter().map(|r| r.ratio).fold(f64::NEG_INFINITY, f64::max);
    let min = rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    let spread = max / min;
    Ok(ContractionReport {
        n,
        amplitude,
        reps,
        rows,
        spread,
        bounded: spread.is_finite() && spread < CONTRACTION_SPREAD_LIMIT,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShrinkageRow {
    pub amplitude: f64,
    pub laplace_mse: f64,
    pub laplace_se: f64,
    pub gaussian_mse: f64,
    pub gaussian_se: f64,
    /// Gaussian / Laplace.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShrinkageReport {
    pub n: usize,
    pub p_n: usize,
    pub reps: usize,
    pub laplace: SlabSpec,
    pub gaussian: SlabSpec,
    pub rows: Vec<ShrinkageRow>,
}

impl ShrinkageReport {
    pub fn row(&self, amplitude: f64) -> Option<&ShrinkageRow> {
        self.rows.iter().find(|r| r.amplitude == amplitude)
    }
}

/// Settings shared by both arms of the shrinkage comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShrinkageConfig {
    pub prior: PriorSpec,
    pub laplace: SlabSpec,
    /// Defaults to the Gaussian with the Laplace slab's variance, so the two
    /// arms differ only in tail weight.
    pub gaussian: SlabSpec,
    pub seed: u64,
}

impl Default for ShrinkageConfig {
    fn default() -> Self {
        Self {
            prior: PriorSpec::complexity(0.1),
            laplace: SlabSpec::laplace(1.0),
            gaussian: SlabSpec::gaussian(std::f64::consts::SQRT_2),
            seed: 2012,
        }
    }
}

/// Posterior-mean squared loss under a Laplace slab and a Gaussian slab on
/// the same data sets.
pub fn run_shrinkage_demo(
    n: usize,
    p_n: usize,
    amp_grid: &[f64],
    reps: usize,
    cfg: &ShrinkageConfig,
) -> Result<ShrinkageReport> {
    if reps == 0 {
        return Err(invalid("reps", "must be at least 1"));
    }
    #[allow(clippy::neg_cmp_op_on_partial_ord)] // also rejects NaN
    if amp_grid.is_empty() || amp_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(invalid("amp_grid", "must be nonempty and strictly increasing"));
    }
    let dim_prior = cfg.prior.build(n)?;
    let laplace = cfg.laplace.build()?;
    let gaussian = cfg.gaussian.build()?;
    let mut rows = Vec::with_capacity(amp_grid.len());
    for (c, &amp) in amp_grid.iter().enumerate() {
        let spec = SignalSpec::new(n, p_n, amp)?;
        let pairs: Vec<(f64, f64)> = (0..reps)
            .into_par_iter()
            .map(|r| {
                let (theta, x) = generate_data(&spec, ReplicationKey::new(cfg.seed, c as u32, r as u32))?;
                let loss = |slab: &SlabPrior| -> Result<f64> {
                    let post = Posterior::fit(&x, &dim_prior, slab, FitConfig::default())?;
                    Ok(post.mean().iter().zip(&theta).map(|(m, t)| (m - t).powi(2)).sum())
                };
                Ok((loss(&laplace)?, loss(&gaussian)?))
            })
            .collect::<Result<_>>()?;
        let (laplace_mse, laplace_se) = mean_and_se(&pairs.iter().map(|p| p.0).collect::<Vec<_>>());
        let (gaussian_mse, gaussian_se) = mean_and_se(&pairs.iter().map(|p| p.1).collect::<Vec<_>>());
        rows.push(ShrinkageRow {
            amplitude: amp,
            laplace_mse,
            laplace_se,
            gaussian_mse,
            gaussian_se,
            ratio: gaussian_mse / laplace_mse,
        });
    }
    Ok(ShrinkageReport {
        n,
        p_n,
        reps,
        laplace: cfg.laplace,
        gaussian: cfg.gaussian,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_mass_at_zero_has_no_tail() {
        let prior = DimensionPrior::point_mass(40, 0).unwrap();
        let slab = SlabPrior::laplace(1.0).unwrap();
        let report = run_dimension_check(40, 4, 5.0, &[1.0, 2.0, 5.0], 3, &prior, &slab, 1).unwrap();
        for row in &report.rows {
            assert_eq!(row.mean_tail, 0.0);
        }
        assert_eq!(report.smallest_m, Some(1.0));
    }

    #[test]
    fn zero_multiplier_is_nonempty_mass() {
        let n = 60;
        let prior = DimensionPrior::complexity(n, 0.1, 3.0).unwrap();
        let slab = SlabPrior::laplace(1.0).unwrap();
        let report = run_dimension_check(n, 5, 4.0, &[0.0], 1, &prior, &slab, 9).unwrap();
        let (_, x) = generate_data(&SignalSpec::new(n, 5, 4.0).unwrap(), ReplicationKey::new(9, 0, 0)).unwrap();
        let post = Posterior::fit(&x, &prior, &slab, FitConfig::default()).unwrap();
        let expected = 1.0 - post.dim_log_pmf()[0].exp();
        assert!((report.rows[0].mean_tail - expected).abs() < 1e-12);
    }

    #[test]
    fn risk_is_nonnegative_and_small_without_signal() {
        let slab = SlabPrior::laplace(1.0).unwrap();
        let report = run_contraction_check(200, &[1, 5], 0.0, 4, &PriorSpec::complexity(0.1), &slab, 3).unwrap();
        for row in &report.rows {
            assert!(row.risk >= 0.0);
        }
        // the p_n = 1 budget is log n
        assert!(report.rows[0].risk < (200f64).ln());
    }

    #[test]
    fn shrinkage_pairs_share_noise() {
        let cfg = ShrinkageConfig {
            gaussian: SlabSpec::laplace(1.0),
            ..ShrinkageConfig::default()
        };
        let report = run_shrinkage_demo(80, 5, &[3.0, 5.0], 3, &cfg).unwrap();
        for row in &report.rows {
            assert_eq!(row.laplace_mse, row.gaussian_mse);
            assert_eq!(row.ratio, 1.0);
        }
    }

    #[test]
    fn rejects_bad_grids() {
        let slab = SlabPrior::laplace(1.0).unwrap();
        assert!(run_contraction_check(100, &[50], 3.0, 2, &PriorSpec::complexity(0.1), &slab, 1).is_err());
        assert!(run_shrinkage_demo(100, 5, &[5.0, 3.0], 2, &ShrinkageConfig::default()).is_err());
    }
}
