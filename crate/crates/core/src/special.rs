//! Normal-distribution special functions on the log scale and log-sum-exp helpers.

use libm::erfc;

pub const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Below this argument `log_ndtr` switches from `erfc` to the Mills-ratio continued fraction.
const LOWER_TAIL_SWITCH: f64 = -20.0;

/// Log of the standard normal density.
#[inline]
pub fn log_norm_pdf(x: f64) -> f64 {
    -0.5 * x * x - LN_SQRT_2PI
}

#[inline]
pub fn norm_pdf(x: f64) -> f64 {
    log_norm_pdf(x).exp()
}

/// Standard normal distribution function.
pub fn ndtr(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// Mills ratio `(1 - Φ(z)) / φ(z)` for `z >= 5`, by backward evaluation of the
/// continued fraction `1/(z+1/(z+2/(z+3/(z+...))))`.
fn mills_ratio_tail(z: f64) -> f64 {
    let mut acc = 0.0;
    for k in (1..=120).rev() {
        acc = k as f64 / (z + acc);
    }
    1.0 / (z + acc)
}

/// `log Φ(x)`, accurate in both tails.
pub fn log_ndtr(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x == f64::INFINITY {
        return 0.0;
    }
    if x == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if x > 5.0 {
        (-0.5 * erfc(x * FRAC_1_SQRT_2)).ln_1p()
    } else if x >= LOWER_TAIL_SWITCH {
        (0.5 * erfc(-x * FRAC_1_SQRT_2)).ln()
    } else {
        log_norm_pdf(x) + mills_ratio_tail(-x).ln()
    }
}

/// `log(Φ(hi) - Φ(lo))` for `lo <= hi`, without cancellation in either tail.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn log_ndtr_diff(lo: f64, hi: f64) -> f64 {
    if !(hi > lo) {
        return f64::NEG_INFINITY;
    }
    if lo >= 0.0 {
        // both in the upper tail: Φ(hi) - Φ(lo) = Φ(-lo) - Φ(-hi)
        let a = log_ndtr(-lo);
        let b = log_ndtr(-hi);
        a + log1m_exp(b - a)
    } else if hi <= 0.0 {
        let a = log_ndtr(hi);
        let b = log_ndtr(lo);
        a + log1m_exp(b - a)
    } else {
        // straddles zero: the mass is at least Φ(hi) - 1/2, no cancellation
        (1.0 - ndtr(lo) - ndtr(-hi)).ln()
    }
}

/// `log(1 - exp(d))` for `d <= 0`.
#[inline]
pub fn log1m_exp(d: f64) -> f64 {
    if d > -std::f64::consts::LN_2 {
        (-d.exp_m1()).ln()
    } else {
        (-d.exp()).ln_1p()
    }
}

/// `log(exp(a) + exp(b))`.
#[inline]
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if hi == f64::INFINITY {
        return f64::INFINITY;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// Log-sum-exp over a slice; `-inf` for an empty slice or all `-inf` entries.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    log_sum_exp_iter(values.iter().copied())
}

/// Log-sum-exp over a cloneable iterator (two passes: max, then scaled sum).
pub fn log_sum_exp_iter<I>(values: I) -> f64
where
    I: Iterator<Item = f64> + Clone,
{
    let max = values.clone().fold(f64::NEG_INFINITY, f64::max);
    if max.is_infinite() {
        return max;
    }
    let sum: f64 = values.map(|v| (v - max).exp()).sum();
    max + sum.ln()
}

/// `ln C(n, k)` via log-gamma.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    use statrs::function::gamma::ln_gamma;
    debug_assert!(k <= n);
    if k == 0 || k == n {
        return 0.0;
    }
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}
