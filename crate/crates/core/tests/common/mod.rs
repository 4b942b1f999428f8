//! Brute-force reference implementation used by the integration tests.
//!
//! Nothing here calls into the crate's numerics: slab integrals use panelled
//! tanh-sinh quadrature, priors are rebuilt from their formulas, and posterior
//! functionals come from summing over all `2^n` supports.

#![allow(dead_code)]

use statrs::function::gamma::ln_gamma;

pub const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

#[derive(Debug, Clone, Copy)]
pub enum OracleSlab {
    Laplace { a: f64 },
    Gaussian { sd: f64 },
    Student { df: f64, scale: f64 },
    ExpPower { alpha: f64, scale: f64 },
}

impl OracleSlab {
    pub fn density(&self, t: f64) -> f64 {
        match *self {
            OracleSlab::Laplace { a } => 0.5 * a * (-a * t.abs()).exp(),
            OracleSlab::Gaussian { sd } => (-0.5 * (t / sd).powi(2)).exp() / (sd * (2.0 * std::f64::consts::PI).sqrt()),
            OracleSlab::Student { df, scale } => {
                let z = t / scale;
                let log_c = ln_gamma(0.5 * (df + 1.0)) - ln_gamma(0.5 * df) - 0.5 * (df * std::f64::consts::PI).ln() - scale.ln();
                (log_c - 0.5 * (df + 1.0) * (1.0 + z * z / df).ln()).exp()
            }
            OracleSlab::ExpPower { alpha, scale } => {
                let log_c = alpha.ln() - (2.0 * scale).ln() - ln_gamma(1.0 / alpha);
                (log_c - (t.abs() / scale).powf(alpha)).exp()
            }
        }
    }
}

pub fn norm_pdf(z: f64) -> f64 {
    (-0.5 * z * z - LN_SQRT_2PI).exp()
}

/// tanh-sinh rule on `[a, b]` with step `h` in the transformed variable.
fn tanh_sinh<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, h: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let half_pi = std::f64::consts::FRAC_PI_2;
    let kmax = (3.5 / h).ceil() as i64;
    let mut sum = 0.0;
    for k in -kmax..=kmax {
        let t = k as f64 * h;
        let u = half_pi * t.sinh();
        let s = u.tanh();
        let w = half_pi * t.cosh() / u.cosh().powi(2);
        if w == 0.0 {
            continue;
        }
        let x = (mid + half * s).clamp(a, b);
        sum += w * f(x);
    }
    sum * h * half
}

/// `∫_lo^hi f` split at `breaks` and into panels no wider than one unit.
pub fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, breaks: &[f64]) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    let mut pts = vec![lo, hi];
    pts.extend(breaks.iter().copied().filter(|b| *b > lo && *b < hi));
    pts.sort_by(f64::total_cmp);
    let mut total = 0.0;
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let pieces = ((b - a).ceil() as usize).max(1);
        let step = (b - a) / pieces as f64;
        for j in 0..pieces {
            let pa = a + j as f64 * step;
            let pb = if j + 1 == pieces { b } else { pa + step };
            total += tanh_sinh(&f, pa, pb, 1.0 / 16.0);
        }
    }
    total
}

fn range(x: f64) -> (f64, f64) {
    (x.min(0.0) - 40.0, x.max(0.0) + 40.0)
}

/// `ψ(x) = ∫ φ(x − t) g(t) dt`.
pub fn psi(slab: &OracleSlab, x: f64) -> f64 {
    let (lo, hi) = range(x);
    integrate(|t| norm_pdf(x - t) * slab.density(t), lo, hi, &[0.0, x])
}

/// `∫_{−∞}^u φ(x − t) g(t) dt`.
pub fn psi_partial(slab: &OracleSlab, x: f64, u: f64) -> f64 {
    let (lo, hi) = range(x);
    integrate(|t| norm_pdf(x - t) * slab.density(t), lo, u.min(hi), &[0.0, x])
}

/// `∫ t φ(x − t) g(t) dt`.
pub fn zeta(slab: &OracleSlab, x: f64) -> f64 {
    let (lo, hi) = range(x);
    integrate(|t| t * norm_pdf(x - t) * slab.density(t), lo, hi, &[0.0, x])
}

#[derive(Debug, Clone, Copy)]
pub enum OraclePrior {
    Complexity { kappa: f64, b: f64 },
    Betabin { kappa: f64 },
    Binomial { alpha: f64 },
    Poisson { rate: f64 },
    Geometric { lambda: f64 },
}

fn ln_choose(n: usize, k: usize) -> f64 {
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

impl OraclePrior {
    /// Unnormalized `log π(p)`.
    pub fn log_weight(&self, n: usize, p: usize) -> f64 {
        let pf = p as f64;
        match *self {
            OraclePrior::Complexity { kappa, b } => {
                if p == 0 {
                    0.0
                } else {
                    -kappa * pf * (b * n as f64 / pf).ln()
                }
            }
            OraclePrior::Betabin { kappa } => kappa * ln_choose(2 * n - p, n),
            OraclePrior::Binomial { alpha } => ln_choose(n, p) + pf * alpha.ln() + (n - p) as f64 * (1.0 - alpha).ln(),
            OraclePrior::Poisson { rate } => pf * rate.ln() - ln_gamma(pf + 1.0),
            OraclePrior::Geometric { lambda } => pf * (1.0 - lambda).ln(),
        }
    }
}

/// Posterior functionals by enumerating every support.
pub struct Enumerated {
    /// `log Σ_S π(|S|)/C(n,|S|) ∏_{i∈S} ψ_i ∏_{i∉S} φ_i − Σ log φ_i`.
    pub log_partition: f64,
    pub dim_pmf: Vec<f64>,
    pub inclusion: Vec<f64>,
    pub exclusion: Vec<f64>,
    pub mean: Vec<f64>,
    x: Vec<f64>,
    psi: Vec<f64>,
    slab: OracleSlab,
}

pub fn enumerate(x: &[f64], prior: &OraclePrior, slab: &OracleSlab) -> Enumerated {
    let n = x.len();
    assert!(n <= 16, "enumeration is exponential in n");
    let psi: Vec<f64> = x.iter().map(|&xi| psi(slab, xi)).collect();
    let zeta: Vec<f64> = x.iter().map(|&xi| zeta(slab, xi)).collect();
    let log_r: Vec<f64> = x
        .iter()
        .zip(&psi)
        .map(|(&xi, &p)| p.ln() - (-0.5 * xi * xi - LN_SQRT_2PI))
        .collect();
    let log_norm = {
        let w: Vec<f64> = (0..=n).map(|p| prior.log_weight(n, p)).collect();
        let m = w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        m + w.iter().map(|v| (v - m).exp()).sum::<f64>().ln()
    };
    let log_terms: Vec<(usize, f64)> = (0u32..(1 << n))
        .map(|mask| {
            let p = mask.count_ones() as usize;
            let mut lw = prior.log_weight(n, p) - log_norm - ln_choose(n, p);
            for (i, lr) in log_r.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    lw += lr;
                }
            }
            (p, lw)
        })
        .collect();
    let max = log_terms.iter().map(|t| t.1).fold(f64::NEG_INFINITY, f64::max);
    let total: f64 = log_terms.iter().map(|t| (t.1 - max).exp()).sum();
    let log_partition = max + total.ln();

    let mut dim_pmf = vec![0.0; n + 1];
    let mut inclusion = vec![0.0; n];
    let mut exclusion = vec![0.0; n];
    for (mask, &(p, lw)) in log_terms.iter().enumerate() {
        let w = (lw - log_partition).exp();
        dim_pmf[p] += w;
        for i in 0..n {
            if mask & (1 << i) != 0 {
                inclusion[i] += w;
            } else {
                exclusion[i] += w;
            }
        }
    }
    let mean = inclusion.iter().zip(zeta.iter().zip(&psi)).map(|(q, (z, p))| q * z / p).collect();
    Enumerated {
        log_partition,
        dim_pmf,
        inclusion,
        exclusion,
        mean,
        x: x.to_vec(),
        psi,
        slab: *slab,
    }
}

impl Enumerated {
    /// `P(θ_i ≤ u | X)`.
    pub fn cdf(&self, i: usize, u: f64) -> f64 {
        let q = self.inclusion[i];
        let slab_part = q * psi_partial(&self.slab, self.x[i], u) / self.psi[i];
        let atom = if u >= 0.0 { self.exclusion[i] } else { 0.0 };
        atom + slab_part
    }

    /// `inf{u : P(θ_i ≤ u | X) ≥ 1/2}` by bisection.
    pub fn median(&self, i: usize) -> f64 {
        let (mut lo, mut hi) = (self.x[i].min(0.0) - 30.0, self.x[i].max(0.0) + 30.0);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if self.cdf(i, mid) >= 0.5 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }
}

/// `|a − b| ≤ rel |b| + abs`.
pub fn close(a: f64, b: f64, rel: f64, abs: f64) -> bool {
    (a - b).abs() <= rel * b.abs() + abs
}

/// One randomly drawn small problem, in both the oracle's and the crate's terms.
pub struct SmallCase {
    pub x: Vec<f64>,
    pub oracle_prior: OraclePrior,
    pub oracle_slab: OracleSlab,
    pub prior: spikeslab::DimensionPrior,
    pub slab: spikeslab::SlabPrior,
}

pub fn random_case<R: rand::Rng>(rng: &mut R) -> SmallCase {
    let n = rng.gen_range(1..=12);
    let x: Vec<f64> = (0..n)
        .map(|_| {
            let z: f64 = rng.sample(rand_distr::StandardNormal);
            if rng.gen_bool(0.3) {
                z + rng.gen_range(-7.0..7.0)
            } else {
                z
            }
        })
        .collect();
    let (oracle_prior, prior) = match rng.gen_range(0..5) {
        0 => {
            let (kappa, b) = (rng.gen_range(0.05..2.0), rng.gen_range(1.0..5.0));
            (OraclePrior::Complexity { kappa, b }, spikeslab::DimensionPrior::complexity(n, kappa, b))
        }
        1 => {
            let kappa = rng.gen_range(0.05..2.0);
            (OraclePrior::Betabin { kappa }, spikeslab::DimensionPrior::betabin_power(n, kappa))
        }
        2 => {
            let alpha = rng.gen_range(0.02..0.9);
            (OraclePrior::Binomial { alpha }, spikeslab::DimensionPrior::binomial(n, alpha))
        }
        3 => {
            let rate = rng.gen_range(0.2..6.0);
            (OraclePrior::Poisson { rate }, spikeslab::DimensionPrior::poisson(n, rate))
        }
        _ => {
            let lambda = rng.gen_range(0.05..0.9);
            (OraclePrior::Geometric { lambda }, spikeslab::DimensionPrior::geometric(n, lambda))
        }
    };
    let (oracle_slab, slab) = match rng.gen_range(0..4) {
        0 => {
            let a = rng.gen_range(0.3..3.0);
            (OracleSlab::Laplace { a }, spikeslab::SlabPrior::laplace(a))
        }
        1 => {
            let sd = rng.gen_range(0.5..4.0);
            (OracleSlab::Gaussian { sd }, spikeslab::SlabPrior::gaussian(sd))
        }
        2 => {
            let (df, scale) = (rng.gen_range(2.5..10.0), rng.gen_range(0.5..3.0));
            (OracleSlab::Student { df, scale }, spikeslab::SlabPrior::student(df, scale))
        }
        _ => {
            let (alpha, scale) = (rng.gen_range(0.8..2.0), rng.gen_range(0.5..3.0));
            (OracleSlab::ExpPower { alpha, scale }, spikeslab::SlabPrior::exp_power(alpha, scale))
        }
    };
    SmallCase {
        x,
        oracle_prior,
        oracle_slab,
        prior: prior.expect("valid prior"),
        slab: slab.expect("valid slab"),
    }
}

/// Worst relative disagreement per functional between a fit and the enumeration.
#[derive(Debug, Default, Clone, Copy)]
pub struct Disagreement {
    pub log_partition: f64,
    pub dim_log_pmf: f64,
    pub inclusion: f64,
    pub mean: f64,
    pub cdf: f64,
    pub median: f64,
}

impl Disagreement {
    pub fn merge(self, o: Self) -> Self {
        Self {
            log_partition: self.log_partition.max(o.log_partition),
            dim_log_pmf: self.dim_log_pmf.max(o.dim_log_pmf),
            inclusion: self.inclusion.max(o.inclusion),
            mean: self.mean.max(o.mean),
            cdf: self.cdf.max(o.cdf),
            median: self.median.max(o.median),
        }
    }

    pub fn worst(&self) -> f64 {
        [self.log_partition, self.dim_log_pmf, self.inclusion, self.mean, self.cdf, self.median]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

/// `|a − b| / max(|b|, floor)`.
pub fn rel_err(a: f64, b: f64, floor: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs().max(floor)
    }
}

/// Relative-error floor for quantities that can be exactly zero.
pub const REL_FLOOR: f64 = 1e-6;

#[allow(clippy::needless_range_loop)]
pub fn compare_case(case: &SmallCase) -> Disagreement {
    use spikeslab::{FitConfig, ObservationVector, Posterior};
    let obs = ObservationVector::new(case.x.clone()).unwrap();
    let post = Posterior::fit(&obs, &case.prior, &case.slab, FitConfig::default()).unwrap();
    let truth = enumerate(&case.x, &case.oracle_prior, &case.oracle_slab);
    let mean = post.mean();
    let mut d = Disagreement {
        log_partition: rel_err(post.log_partition(), truth.log_partition, 1.0),
        ..Default::default()
    };
    // log-domain comparison of the dimension pmf, skipping entries the oracle underflows
    for (lp, p) in post.dim_log_pmf().iter().zip(&truth.dim_pmf) {
        if *p > 1e-250 {
            d.dim_log_pmf = d.dim_log_pmf.max(rel_err(*lp, p.ln(), 1.0));
        }
    }
    for i in 0..case.x.len() {
        d.inclusion = d.inclusion.max(rel_err(post.inclusion_prob()[i], truth.inclusion[i], REL_FLOOR));
        d.inclusion = d.inclusion.max(rel_err(post.exclusion_prob()[i], truth.exclusion[i], REL_FLOOR));
        d.mean = d.mean.max(rel_err(mean[i], truth.mean[i], REL_FLOOR));
        let xi = case.x[i];
        for u in [-2.0, -0.5, 0.0, 0.7, xi, xi - 1.0] {
            d.cdf = d.cdf.max(rel_err(post.marginal_cdf(i, u).unwrap(), truth.cdf(i, u), REL_FLOOR));
        }
        d.median = d.median.max(rel_err(post.coordinatewise_median(i).unwrap(), truth.median(i), 1.0));
    }
    d
}
