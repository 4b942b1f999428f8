//! Monte Carlo comparison of posterior and thresholding estimators on a grid
//! of sparsity levels and signal amplitudes.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::estimators::{dq_loss, hard_threshold, hard_threshold_oracle, LossSpec};
use crate::harness::config::{PriorSpec, SlabSpec};
use crate::harness::data::{generate_data, Placement, ReplicationKey, SignalSpec};
use crate::posterior::{eb_binomial_weight, FitConfig, Posterior};
use crate::slab::SlabPrior;

/// The eight estimators, in table row order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Estimator {
    /// Posterior mean, complexity prior.
    PM1,
    /// Posterior mean, `C(2n − p, n)^κ` prior.
    PM2,
    /// Posterior mean under the binomial prior with marginal-ML weight.
    EBM,
    PMed1,
    PMed2,
    EBMed,
    HT,
    HTO,
}

impl Estimator {
    pub const ALL: [Estimator; 8] = [
        Estimator::PM1,
        Estimator::PM2,
        Estimator::EBM,
        Estimator::PMed1,
        Estimator::PMed2,
        Estimator::EBMed,
        Estimator::HT,
        Estimator::HTO,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Estimator::PM1 => "PM1",
            Estimator::PM2 => "PM2",
            Estimator::EBM => "EBM (marginal-ML)",
            Estimator::PMed1 => "PMed1",
            Estimator::PMed2 => "PMed2",
            Estimator::EBMed => "EBMed (marginal-ML)",
            Estimator::HT => "HT",
            Estimator::HTO => "HTO",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        Estimator::ALL
            .into_iter()
            .find(|e| {
                let label = e.label().to_ascii_lowercase();
                label == key || label.split_whitespace().next() == Some(key.as_str())
            })
            .ok_or_else(|| invalid("estimator", format!("unknown estimator `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n: usize,
    pub pn_grid: Vec<usize>,
    pub amp_grid: Vec<f64>,
    pub replications: usize,
    pub estimators: Vec<Estimator>,
    /// κ shared by both dimension priors.
    pub kappa: f64,
    /// `b` of the complexity prior.
    pub b: f64,
    pub slab: SlabSpec,
    pub losses: Vec<LossSpec>,
    pub seed: u64,
    pub placement: Placement,
    pub noise_sd: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n: 500,
            pn_grid: vec![25, 50, 100],
            amp_grid: vec![3.0, 4.0, 5.0],
            replications: 100,
            estimators: Estimator::ALL.to_vec(),
            kappa: 0.1,
            b: 3.0,
            slab: SlabSpec::laplace(1.0),
            losses: vec![LossSpec::squared(), LossSpec::absolute()],
            seed: 2012,
            placement: Placement::Tail,
            noise_sd: 1.0,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(invalid("replications", "must be at least 1"));
        }
        if self.estimators.is_empty() || self.losses.is_empty() {
            return Err(invalid("estimators", "need at least one estimator and one loss"));
        }
        if self.pn_grid.is_empty() || self.amp_grid.is_empty() {
            return Err(invalid("grid", "signal grid is empty"));
        }
        for &p in &self.pn_grid {
            SignalSpec::new(self.n, p, 0.0)?;
            if self.estimators.contains(&Estimator::HTO) && (p == 0 || p >= self.n) {
                return Err(invalid("p_n", format!("HTO needs 1 <= p_n < n, got {p}")));
            }
        }
        if self.n < 2 {
            return Err(invalid("n", "must be at least 2"));
        }
        self.slab.build()?;
        PriorSpec::complexity(self.kappa).build(self.n)?;
        Ok(())
    }

    /// Grid cells `(p_n, A)` in row-major order; the index doubles as the RNG stream id.
    pub fn cells(&self) -> Vec<(usize, f64)> {
        self.pn_grid
            .iter()
            .flat_map(|&p| self.amp_grid.iter().map(move |&a| (p, a)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultCell {
    pub estimator: Estimator,
    pub p_n: usize,
    pub amplitude: f64,
    pub q: f64,
    pub mean_loss: f64,
    /// Monte Carlo standard error of `mean_loss`.
    pub se: f64,
    /// Replications that contributed.
    pub reps: usize,
    pub failures: usize,
}

impl ResultCell {
    pub fn is_complete(&self) -> bool {
        self.failures == 0
    }
}

/// Worst deviations from the posterior identities observed over all fits.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct IdentityAudit {
    pub fits: usize,
    /// `max |Σ q_i − E[|S| | X]|`.
    pub max_dimension_gap: f64,
    /// `max_i |mean_i − q_i ζ(x_i)/ψ(x_i)| / max(1, |mean_i|)`.
    pub max_mean_gap: f64,
    pub violations: usize,
}

pub const DIMENSION_IDENTITY_TOL: f64 = 1e-8;
pub const MEAN_IDENTITY_TOL: f64 = 1e-10;

impl IdentityAudit {
    pub fn check(post: &Posterior) -> Result<Self> {
        let sum_q: f64 = post.inclusion_prob().iter().sum();
        let dim_gap = (sum_q - post.expected_dimension()).abs();
        let slab = post.slab();
        let mut mean_gap: f64 = 0.0;
        for ((&xi, &q), m) in post
            .observations()
            .as_slice()
            .iter()
            .zip(post.inclusion_prob())
            .zip(post.mean())
        {
            let ratio = slab.zeta(xi)? / slab.log_psi(xi)?.exp();
            mean_gap = mean_gap.max((m - q * ratio).abs() / m.abs().max(1.0));
        }
        let violated = dim_gap > DIMENSION_IDENTITY_TOL || mean_gap > MEAN_IDENTITY_TOL || !dim_gap.is_finite();
        Ok(Self {
            fits: 1,
            max_dimension_gap: dim_gap,
            max_mean_gap: mean_gap,
            violations: violated as usize,
        })
    }

    pub fn merge(self, other: Self) -> Self {
        Self {
            fits: self.fits + other.fits,
            max_dimension_gap: self.max_dimension_gap.max(other.max_dimension_gap),
            max_mean_gap: self.max_mean_gap.max(other.max_mean_gap),
            violations: self.violations + other.violations,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub cells: Vec<ResultCell>,
    pub audit: IdentityAudit,
    /// Error messages of failed replications, as `(p_n, A, rep, message)`.
    pub failures: Vec<(usize, f64, usize, String)>,
}

impl ResultTable {
    pub fn get(&self, estimator: Estimator, p_n: usize, amplitude: f64, q: f64) -> Option<&ResultCell> {
        self.cells
            .iter()
            .find(|c| c.estimator == estimator && c.p_n == p_n && c.amplitude == amplitude && c.q == q)
    }

    /// CSV with columns `estimator,p_n,A,q,mean_loss,se,reps`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        let io = |e: csv::Error| Error::Io(e.to_string());
        wtr.write_record(["estimator", "p_n", "A", "q", "mean_loss", "se", "reps"])
            .map_err(io)?;
        for c in &self.cells {
            wtr.write_record([
                c.estimator.label().to_string(),
                c.p_n.to_string(),
                c.amplitude.to_string(),
                c.q.to_string(),
                format!("{:.6}", c.mean_loss),
                format!("{:.6}", c.se),
                c.reps.to_string(),
            ])
            .map_err(io)?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Per-replication loss of every requested estimator under every loss.
struct Replication {
    losses: Vec<f64>,
    audit: IdentityAudit,
}

struct Fitted {
    mean: Vec<f64>,
    median: Option<Vec<f64>>,
}

fn fit_estimates(post: &Posterior, want_median: bool) -> Result<Fitted> {
    Ok(Fitted {
        mean: post.mean(),
        median: if want_median { Some(post.medians()?) } else { None },
    })
}

fn run_replication(
    cfg: &ExperimentConfig,
    slab: &SlabPrior,
    p_n: usize,
    amplitude: f64,
    key: ReplicationKey,
) -> Result<Replication> {
    let spec = SignalSpec {
        n: cfg.n,
        p_n,
        amplitude,
        placement: cfg.placement,
        noise_sd: cfg.noise_sd,
    };
    let (theta, x) = generate_data(&spec, key)?;
    let wants = |e: Estimator| cfg.estimators.contains(&e);
    let fit_cfg = FitConfig::default();
    let mut audit = IdentityAudit::default();

    let mut run_prior = |prior: PriorSpec, mean_est: Estimator, med_est: Estimator| -> Result<Option<Fitted>> {
        if !(wants(mean_est) || wants(med_est)) {
            return Ok(None);
        }
        let post = Posterior::fit(&x, &prior.build(cfg.n)?, slab, fit_cfg)?;
        audit = audit.merge(IdentityAudit::check(&post)?);
        Ok(Some(fit_estimates(&post, wants(med_est))?))
    };
    let first = run_prior(
        PriorSpec {
            b: cfg.b,
            ..PriorSpec::complexity(cfg.kappa)
        },
        Estimator::PM1,
        Estimator::PMed1,
    )?;
    let second = run_prior(PriorSpec::betabin(cfg.kappa), Estimator::PM2, Estimator::PMed2)?;
    let eb = if wants(Estimator::EBM) || wants(Estimator::EBMed) {
        let alpha = eb_binomial_weight(&x, slab)?;
        let post = Posterior::fit_independent(&x, alpha, slab, fit_cfg)?;
        audit = audit.merge(IdentityAudit::check(&post)?);
        Some(fit_estimates(&post, wants(Estimator::EBMed))?)
    } else {
        None
    };

    let mut losses = Vec::with_capacity(cfg.estimators.len() * cfg.losses.len());
    for &est in &cfg.estimators {
        let pick = |f: &Option<Fitted>, median: bool| -> Vec<f64> {
            let f = f.as_ref().expect("fitted when requested");
            if median {
                f.median.clone().expect("median requested")
            } else {
                f.mean.clone()
            }
        };
        let estimate = match est {
            Estimator::PM1 => pick(&first, false),
            Estimator::PMed1 => pick(&first, true),
            Estimator::PM2 => pick(&second, false),
            Estimator::PMed2 => pick(&second, true),
            Estimator::EBM => pick(&eb, false),
            Estimator::EBMed => pick(&eb, true),
            Estimator::HT => hard_threshold(x.as_slice())?,
            Estimator::HTO => hard_threshold_oracle(x.as_slice(), p_n)?,
        };
        for &loss in &cfg.losses {
            losses.push(dq_loss(&estimate, &theta, loss)?);
        }
    }
    Ok(Replication { losses, audit })
}

/// Mean and standard error of a sample.
pub fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let k = values.len();
    if k == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / k as f64;
    if k == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1) as f64;
    (mean, (var / k as f64).sqrt())
}

pub fn run_table(cfg: &ExperimentConfig) -> Result<ResultTable> {
    cfg.validate()?;
    let slab = cfg.slab.build()?;
    let cells = cfg.cells();
    let tasks: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..cfg.replications).map(move |r| (c, r)))
        .collect();
    let outcomes: Vec<Result<Replication>> = tasks
        .par_iter()
        .map(|&(c, r)| {
            let (p_n, amp) = cells[c];
            run_replication(cfg, &slab, p_n, amp, ReplicationKey::new(cfg.seed, c as u32, r as u32))
        })
        .collect();

    let mut audit = IdentityAudit::default();
    let mut failures = Vec::new();
    let mut result_cells = Vec::new();
    let per_rep = cfg.estimators.len() * cfg.losses.len();
    for (c, &(p_n, amp)) in cells.iter().enumerate() {
        let mut columns: Vec<Vec<f64>> = vec![Vec::with_capacity(cfg.replications); per_rep];
        let mut failed = 0;
        for r in 0..cfg.replications {
            match &outcomes[c * cfg.replications + r] {
                Ok(rep) => {
                    audit = audit.merge(rep.audit);
                    for (col, v) in columns.iter_mut().zip(&rep.losses) {
                        col.push(*v);
                    }
                }
                Err(e) => {
                    failed += 1;
                    failures.push((p_n, amp, r, e.to_string()));
                }
            }
        }
        for (e, &est) in cfg.estimators.iter().enumerate() {
            for (l, loss) in cfg.losses.iter().enumerate() {
                let col = &columns[e * cfg.losses.len() + l];
                let (mean, se) = mean_and_se(col);
                result_cells.push(ResultCell {
                    estimator: est,
                    p_n,
                    amplitude: amp,
                    q: loss.q(),
                    mean_loss: mean,
                    se,
                    reps: col.len(),
                    failures: failed,
                });
            }
        }
    }
    Ok(ResultTable {
        cells: result_cells,
        audit,
        failures,
    })
}
