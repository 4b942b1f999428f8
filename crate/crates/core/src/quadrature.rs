//! Globally adaptive Gauss–Kronrod (7/15) quadrature with infinite-range support.

#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Tolerances and limits for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 0.0,
            max_subdivisions: 2000,
        }
    }
}

impl QuadConfig {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut err = err.abs();
    if res_asc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / res_asc).powf(1.5);
        err = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    err
}

/// One 15-point Kronrod panel on a finite interval: (estimate, error estimate).
fn kronrod_panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let habs = half.abs();
    let err = rescale_error((res_k - res_g) * half, res_abs * habs, res_asc * habs);
    (res_k * half, err)
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn integrate_finite<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, cfg: &QuadConfig) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            abs_error: 0.0,
        });
    }
    let (value, err) = kronrod_panel(f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, value, err });
    let mut total = value;
    let mut total_err = err;
    let mut splits = 0;
    loop {
        let target = cfg.abs_tol.max(cfg.rel_tol * total.abs());
        if total_err <= target {
            break;
        }
        if splits >= cfg.max_subdivisions {
            return Err(Error::Quadrature {
                estimate: total,
                abs_error: total_err,
            });
        }
        let worst = heap.pop().expect("heap never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a.min(worst.b) && mid < worst.a.max(worst.b)) {
            // interval exhausted at machine precision; accept what we have
            heap.push(worst);
            break;
        }
        let (v1, e1) = kronrod_panel(f, worst.a, mid);
        let (v2, e2) = kronrod_panel(f, mid, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.err;
        heap.push(Panel { a: worst.a, b: mid, value: v1, err: e1 });
        heap.push(Panel { a: mid, b: worst.b, value: v2, err: e2 });
        splits += 1;
    }
    // resum to shed accumulated update round-off
    let value: f64 = heap.iter().map(|p| p.value).sum();
    let abs_error: f64 = heap.iter().map(|p| p.err).sum();
    if !value.is_finite() {
        return Err(Error::Quadrature {
            estimate: value,
            abs_error,
        });
    }
    Ok(QuadResult { value, abs_error })
}

/// Integrate `f` over `[a, b]`; either endpoint may be infinite.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: &QuadConfig) -> Result<QuadResult> {
    integrate_dyn(&f, a, b, cfg)
}

fn integrate_dyn(f: &dyn Fn(f64) -> f64, a: f64, b: f64, cfg: &QuadConfig) -> Result<QuadResult> {
    if a.is_nan() || b.is_nan() {
        return Err(Error::NonFinite("integration bound"));
    }
    if a > b {
        let r = integrate_dyn(f, b, a, cfg)?;
        return Ok(QuadResult {
            value: -r.value,
            abs_error: r.abs_error,
        });
    }
    match (a.is_finite(), b.is_finite()) {
        (true, true) => integrate_finite(&f, a, b, cfg),
        (true, false) => {
            let g = |s: f64| {
                if s >= 1.0 {
                    return 0.0;
                }
                let d = 1.0 - s;
                f(a + s / d) / (d * d)
            };
            integrate_finite(&g, 0.0, 1.0, cfg)
        }
        (false, true) => {
            let g = |s: f64| {
                if s >= 1.0 {
                    return 0.0;
                }
                let d = 1.0 - s;
                f(b - s / d) / (d * d)
            };
            integrate_finite(&g, 0.0, 1.0, cfg)
        }
        (false, false) => {
            let lo = integrate_dyn(f, f64::NEG_INFINITY, 0.0, cfg)?;
            let hi = integrate_dyn(f, 0.0, f64::INFINITY, cfg)?;
            Ok(QuadResult {
                value: lo.value + hi.value,
                abs_error: lo.abs_error + hi.abs_error,
            })
        }
    }
}

/// Integrate over consecutive pieces split at `breaks` (sorted, inside `[a, b]`).
pub fn integrate_pieces<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    let mut points = vec![a];
    points.extend(breaks.iter().copied().filter(|&p| p > a && p < b));
    points.push(b);
    points.dedup();
    let mut out = QuadResult {
        value: 0.0,
        abs_error: 0.0,
    };
    for w in points.windows(2) {
        let r = integrate_dyn(&f, w[0], w[1], cfg)?;
        out.value += r.value;
        out.abs_error += r.abs_error;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_rule_is_exact_for_degree_23() {
        let (v, _) = kronrod_panel(&|x: f64| x.powi(22) + x.powi(23), -1.0, 1.0);
        assert!((v - 2.0 / 23.0).abs() < 1e-15, "{v}");
    }

    #[test]
    fn gauss_weights_sum_to_two() {
        let s = WG[3] + 2.0 * (WG[0] + WG[1] + WG[2]);
        assert!((s - 2.0).abs() < 1e-15);
        let s = WGK[7] + 2.0 * WGK[..7].iter().sum::<f64>();
        assert!((s - 2.0).abs() < 1e-15);
    }

    #[test]
    fn gaussian_over_real_line() {
        let r = integrate(
            |x: f64| (-0.5 * x * x).exp(),
            f64::NEG_INFINITY,
            f64::INFINITY,
            &QuadConfig::default(),
        )
        .unwrap();
        let want = (2.0 * std::f64::consts::PI).sqrt();
        assert!((r.value - want).abs() / want < 1e-12);
    }

    #[test]
    fn kink_handled_with_breakpoint() {
        let r = integrate_pieces(|x: f64| (-x.abs()).exp(), -30.0, 30.0, &[0.0], &QuadConfig::default())
            .unwrap();
        let want = 2.0 * (1.0 - (-30f64).exp());
        assert!((r.value - want).abs() < 1e-12);
    }

    #[test]
    fn reversed_bounds_negate() {
        let cfg = QuadConfig::default();
        let a = integrate(|x: f64| x.sin(), 0.0, 2.0, &cfg).unwrap().value;
        let b = integrate(|x: f64| x.sin(), 2.0, 0.0, &cfg).unwrap().value;
        assert_eq!(a, -b);
        assert!((a - (1.0 - 2f64.cos())).abs() < 1e-14);
    }

    #[test]
    fn nonconvergence_reports_estimate() {
        let cfg = QuadConfig {
            rel_tol: 1e-14,
            abs_tol: 0.0,
            max_subdivisions: 3,
        };
        let err = integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, &cfg).unwrap_err();
        match err {
            Error::Quadrature { estimate, abs_error } => {
                assert!(estimate.is_finite() && abs_error > 0.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
