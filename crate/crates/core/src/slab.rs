//! Slab densities for the nonzero coordinates and the convolution functionals
//! the posterior engine consumes:
//!
//! * `ψ(x) = ∫ φ(x − t) g(t) dt`, the marginal density of an observation whose mean is drawn from the slab;
//! * `ψ(x, u) = ∫_{−∞}^{u} φ(x − t) g(t) dt`;
//! * `ζ(x) = ∫ t φ(x − t) g(t) dt`.
//!
//! Laplace and Gaussian slabs use closed forms evaluated on the log scale; Student
//! and exponential-power slabs fall back to adaptive quadrature with the integrand
//! rescaled by its maximum.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{invalid, Error, Result};
use crate::quadrature::{integrate_pieces, QuadConfig};
use crate::special::{log_add_exp, log_ndtr, log_ndtr_diff, log_norm_pdf, LN_SQRT_2PI};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SlabFamily {
    /// `g(t) = (a/2) e^{−a|t|}`; `scale` holds the rate `a`.
    Laplace,
    /// Centered normal; `scale` is the standard deviation.
    Gaussian,
    /// Student t; `scale` is the scale, `shape` the degrees of freedom (> 2).
    Student,
    /// `g(t) ∝ e^{−|t/scale|^α}`; `shape` is `α ∈ (0, 2]`.
    ExpPower,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlabPrior {
    family: SlabFamily,
    scale: f64,
    shape: f64,
    quadrature_tol: f64,
    log_norm: f64,
}

const DEFAULT_QUAD_TOL: f64 = 1e-10;

fn check_positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(invalid(name, format!("must be positive and finite, got {v}")))
    }
}

fn check_finite(what: &'static str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

impl SlabPrior {
    /// Laplace slab with rate `a`.
    pub fn laplace(a: f64) -> Result<Self> {
        check_positive("laplace rate", a)?;
        Ok(Self {
            family: SlabFamily::Laplace,
            scale: a,
            shape: 1.0,
            quadrature_tol: DEFAULT_QUAD_TOL,
            log_norm: (0.5 * a).ln(),
        })
    }

    pub fn gaussian(sd: f64) -> Result<Self> {
        check_positive("gaussian sd", sd)?;
        Ok(Self {
            family: SlabFamily::Gaussian,
            scale: sd,
            shape: 2.0,
            quadrature_tol: DEFAULT_QUAD_TOL,
            log_norm: -LN_SQRT_2PI - sd.ln(),
        })
    }

    pub fn student(df: f64, scale: f64) -> Result<Self> {
        check_positive("student scale", scale)?;
        if !(df.is_finite() && df > 2.0) {
            return Err(invalid("student df", format!("must exceed 2, got {df}")));
        }
        let log_norm = ln_gamma(0.5 * (df + 1.0))
            - ln_gamma(0.5 * df)
            - 0.5 * (df * std::f64::consts::PI).ln()
            - scale.ln();
        Ok(Self {
            family: SlabFamily::Student,
            scale,
            shape: df,
            quadrature_tol: DEFAULT_QUAD_TOL,
            log_norm,
        })
    }

    /// Exponential-power slab `c_α e^{−|t/scale|^α}` with `c_α = α / (2 scale Γ(1/α))`.
    pub fn exp_power(alpha: f64, scale: f64) -> Result<Self> {
        check_positive("exp-power scale", scale)?;
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(invalid("exp-power alpha", format!("must lie in (0, 2], got {alpha}")));
        }
        let log_norm = alpha.ln() - std::f64::consts::LN_2 - scale.ln() - ln_gamma(1.0 / alpha);
        Ok(Self {
            family: SlabFamily::ExpPower,
            scale,
            shape: alpha,
            quadrature_tol: DEFAULT_QUAD_TOL,
            log_norm,
        })
    }

    pub fn with_quadrature_tol(mut self, tol: f64) -> Result<Self> {
        check_positive("quadrature_tol", tol)?;
        self.quadrature_tol = tol;
        Ok(self)
    }

    pub fn family(&self) -> SlabFamily {
        self.family
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    pub fn quadrature_tol(&self) -> f64 {
        self.quadrature_tol
    }

    /// Whether `ψ`, `ψ(·, u)` and `ζ` are evaluated in closed form.
    pub fn has_closed_form(&self) -> bool {
        matches!(self.family, SlabFamily::Laplace | SlabFamily::Gaussian)
    }

    #[inline]
    fn log_density_unchecked(&self, t: f64) -> f64 {
        match self.family {
            SlabFamily::Laplace => self.log_norm - self.scale * t.abs(),
            SlabFamily::Gaussian => {
                let z = t / self.scale;
                self.log_norm - 0.5 * z * z
            }
            SlabFamily::Student => {
                let z = t / self.scale;
                self.log_norm - 0.5 * (self.shape + 1.0) * (z * z / self.shape).ln_1p()
            }
            SlabFamily::ExpPower => self.log_norm - (t.abs() / self.scale).powf(self.shape),
        }
    }

    /// `log g(t)`.
    pub fn log_g(&self, t: f64) -> Result<f64> {
        check_finite("slab density argument", t)?;
        Ok(self.log_density_unchecked(t))
    }

    /// `log ψ(x)`.
    pub fn log_psi(&self, x: f64) -> Result<f64> {
        check_finite("log_psi argument", x)?;
        match self.family {
            SlabFamily::Laplace => Ok(self.laplace_log_psi(x)),
            SlabFamily::Gaussian => Ok(self.gaussian_log_psi(x)),
            _ => self.log_psi_by_quadrature(x),
        }
    }

    /// `log ψ(x, u)`; `u = +∞` gives `log ψ(x)` and `u = −∞` gives `−∞`.
    pub fn log_psi_partial(&self, x: f64, u: f64) -> Result<f64> {
        check_finite("log_psi_partial argument", x)?;
        if u.is_nan() {
            return Err(Error::NonFinite("log_psi_partial bound"));
        }
        if u == f64::INFINITY {
            return self.log_psi(x);
        }
        if u == f64::NEG_INFINITY {
            return Ok(f64::NEG_INFINITY);
        }
        match self.family {
            SlabFamily::Laplace => Ok(self.laplace_log_psi_partial(x, u)),
            SlabFamily::Gaussian => {
                let (mean, sd) = self.gaussian_posterior(x);
                Ok(self.gaussian_log_psi(x) + log_ndtr((u - mean) / sd))
            }
            _ => self.log_psi_partial_by_quadrature(x, u),
        }
    }

    /// `ζ(x)` in the linear domain; underflows to zero where `ψ(x)` does.
    pub fn zeta(&self, x: f64) -> Result<f64> {
        Ok(self.slab_mean(x)? * self.log_psi(x)?.exp())
    }

    /// `ζ(x)/ψ(x)`: the posterior mean of a coordinate known to be drawn from the slab.
    pub fn slab_mean(&self, x: f64) -> Result<f64> {
        check_finite("slab_mean argument", x)?;
        match self.family {
            SlabFamily::Laplace => Ok(self.laplace_moments(x).0),
            SlabFamily::Gaussian => Ok(self.gaussian_posterior(x).0),
            _ => {
                let (m0, m1, _) = self.scaled_moments_by_quadrature(x, true, false)?;
                Ok(m1 / m0)
            }
        }
    }

    /// Second moment `∫ t² φ(x − t) g(t) dt / ψ(x)` of the slab-conditional posterior.
    pub fn slab_second_moment(&self, x: f64) -> Result<f64> {
        check_finite("slab_second_moment argument", x)?;
        match self.family {
            SlabFamily::Laplace => Ok(self.laplace_moments(x).1),
            SlabFamily::Gaussian => {
                let (m, s) = self.gaussian_posterior(x);
                Ok(m * m + s * s)
            }
            _ => {
                let (m0, _, m2) = self.scaled_moments_by_quadrature(x, false, true)?;
                Ok(m2 / m0)
            }
        }
    }

    // ---- Laplace closed forms -------------------------------------------------
    //
    // Splitting the convolution at t = 0 and completing the square gives
    //   ψ(x) = (a/2) [ e^{a²/2 − a x} Φ(x − a) + e^{a²/2 + a x} Φ(−x − a) ],
    // i.e. a two-component mixture of normals N(x − a, 1) truncated to (0, ∞)
    // and N(x + a, 1) truncated to (−∞, 0).

    /// Log mixture weights (positive part, negative part), without the `a/2` factor.
    #[inline]
    fn laplace_log_parts(&self, x: f64) -> (f64, f64) {
        let a = self.scale;
        let half_a2 = 0.5 * a * a;
        (
            half_a2 - a * x + log_ndtr(x - a),
            half_a2 + a * x + log_ndtr(-x - a),
        )
    }

    fn laplace_log_psi(&self, x: f64) -> f64 {
        let (pos, neg) = self.laplace_log_parts(x);
        self.log_norm + log_add_exp(pos, neg)
    }

    fn laplace_log_psi_partial(&self, x: f64, u: f64) -> f64 {
        let a = self.scale;
        let half_a2 = 0.5 * a * a;
        if u <= 0.0 {
            self.log_norm + half_a2 + a * x + log_ndtr(u - x - a)
        } else {
            let (_, neg) = self.laplace_log_parts(x);
            let pos = half_a2 - a * x + log_ndtr_diff(a - x, u - x + a);
            self.log_norm + log_add_exp(pos, neg)
        }
    }

    /// First and second moments of the slab-conditional posterior.
    fn laplace_moments(&self, x: f64) -> (f64, f64) {
        let a = self.scale;
        let (pos, neg) = self.laplace_log_parts(x);
        let total = log_add_exp(pos, neg);
        let w_pos = (pos - total).exp();
        let w_neg = (neg - total).exp();
        // N(m, 1) restricted to (0, ∞): mean m + λ, second moment 1 + m² + mλ, λ = φ(m)/Φ(m)
        let m = x - a;
        let lam = (log_norm_pdf(m) - log_ndtr(m)).exp();
        let mean_pos = m + lam;
        let second_pos = 1.0 + m * m + m * lam;
        // N(m', 1) restricted to (−∞, 0): mean m' − λ', second moment 1 + m'² − m'λ'
        let mp = x + a;
        let lamp = (log_norm_pdf(mp) - log_ndtr(-mp)).exp();
        let mean_neg = mp - lamp;
        let second_neg = 1.0 + mp * mp - mp * lamp;
        (
            w_pos * mean_pos + w_neg * mean_neg,
            w_pos * second_pos + w_neg * second_neg,
        )
    }

    // ---- Gaussian closed forms --------------------------------------------------

    fn gaussian_log_psi(&self, x: f64) -> f64 {
        let v = 1.0 + self.scale * self.scale;
        -0.5 * x * x / v - LN_SQRT_2PI - 0.5 * v.ln()
    }

    /// Mean and standard deviation of the slab-conditional posterior.
    fn gaussian_posterior(&self, x: f64) -> (f64, f64) {
        let s2 = self.scale * self.scale;
        let v = 1.0 + s2;
        (x * s2 / v, (s2 / v).sqrt())
    }

    // ---- quadrature route ---------------------------------------------------------

    fn log_integrand(&self, x: f64, t: f64) -> f64 {
        log_norm_pdf(x - t) + self.log_density_unchecked(t)
    }

    fn breakpoints(x: f64) -> Vec<f64> {
        let mut b = vec![0.0, x - 8.0, x, x + 8.0];
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }

    /// Approximate maximum of the log-integrand over `(−∞, upper]`.
    fn log_integrand_peak(&self, x: f64, upper: f64) -> f64 {
        let lo = x.min(0.0) - 10.0;
        let hi = x.max(0.0) + 10.0;
        let mut best = f64::NEG_INFINITY;
        for k in 0..=400 {
            let t = lo + (hi - lo) * k as f64 / 400.0;
            if t > upper {
                break;
            }
            best = best.max(self.log_integrand(x, t));
        }
        if upper.is_finite() {
            best = best.max(self.log_integrand(x, upper));
        }
        best
    }

    fn quad_config(&self) -> QuadConfig {
        QuadConfig::with_rel_tol(self.quadrature_tol)
    }

    /// `log ψ(x)` by adaptive quadrature, valid for every family.
    pub fn log_psi_by_quadrature(&self, x: f64) -> Result<f64> {
        self.log_psi_partial_by_quadrature(x, f64::INFINITY)
    }

    /// `log ψ(x, u)` by adaptive quadrature, valid for every family.
    pub fn log_psi_partial_by_quadrature(&self, x: f64, u: f64) -> Result<f64> {
        check_finite("quadrature argument", x)?;
        if u == f64::NEG_INFINITY {
            return Ok(f64::NEG_INFINITY);
        }
        let peak = self.log_integrand_peak(x, u);
        let r = integrate_pieces(
            |t| (self.log_integrand(x, t) - peak).exp(),
            f64::NEG_INFINITY,
            u,
            &Self::breakpoints(x),
            &self.quad_config(),
        )?;
        Ok(peak + r.value.ln())
    }

    /// `ζ(x)` by adaptive quadrature, valid for every family.
    pub fn zeta_by_quadrature(&self, x: f64) -> Result<f64> {
        let (m0, m1, _) = self.scaled_moments_by_quadrature(x, true, false)?;
        let log_psi = self.log_psi_by_quadrature(x)?;
        Ok(m1 / m0 * log_psi.exp())
    }

    /// Zeroth, first and second moments of `φ(x − t) g(t)`, all scaled by the same factor.
    fn scaled_moments_by_quadrature(&self, x: f64, first: bool, second: bool) -> Result<(f64, f64, f64)> {
        let peak = self.log_integrand_peak(x, f64::INFINITY);
        let cfg = self.quad_config();
        let breaks = Self::breakpoints(x);
        let weight = |t: f64| (self.log_integrand(x, t) - peak).exp();
        let m0 = integrate_pieces(weight, f64::NEG_INFINITY, f64::INFINITY, &breaks, &cfg)?.value;
        let m1 = if first {
            // the odd integrand changes sign; absolute tolerance tied to the total mass
            let cfg1 = QuadConfig {
                abs_tol: self.quadrature_tol * m0 * (1.0 + x.abs()),
                ..cfg
            };
            integrate_pieces(|t| t * weight(t), f64::NEG_INFINITY, f64::INFINITY, &breaks, &cfg1)?.value
        } else {
            0.0
        };
        let m2 = if second {
            integrate_pieces(|t| t * t * weight(t), f64::NEG_INFINITY, f64::INFINITY, &breaks, &cfg)?.value
        } else {
            0.0
        };
        Ok((m0, m1, m2))
    }
}
