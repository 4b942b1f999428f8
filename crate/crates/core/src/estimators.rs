//! Thresholding comparators and `d_q` losses.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// `d_q(a, b) = Σ |a_i − b_i|^q` (no q-th root), for `q ∈ (0, 2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossSpec {
    q: f64,
}

impl LossSpec {
    pub fn new(q: f64) -> Result<Self> {
        if q > 0.0 && q <= 2.0 {
            Ok(Self { q })
        } else {
            Err(invalid("q", format!("must lie in (0, 2], got {q}")))
        }
    }

    pub fn squared() -> Self {
        Self { q: 2.0 }
    }

    pub fn absolute() -> Self {
        Self { q: 1.0 }
    }

    pub fn q(&self) -> f64 {
        self.q
    }
}

pub fn dq_loss(a: &[f64], b: &[f64], spec: LossSpec) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    let q = spec.q;
    Ok(a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = (x - y).abs();
            if q == 2.0 {
                d * d
            } else if q == 1.0 {
                d
            } else {
                d.powf(q)
            }
        })
        .sum())
}

/// Keep entries with `|x_i| > threshold`, zero the rest.
pub fn threshold(x: &[f64], threshold: f64) -> Vec<f64> {
    x.iter()
        .map(|&v| if v.abs() > threshold { v } else { 0.0 })
        .collect()
}

/// Universal threshold `√(2 log n)`.
pub fn universal_threshold(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(invalid("n", "hard thresholding needs n >= 2"));
    }
    Ok((2.0 * (n as f64).ln()).sqrt())
}

/// Oracle threshold `√(2 log(n/p_n))`.
pub fn oracle_threshold(n: usize, p_n: usize) -> Result<f64> {
    if p_n == 0 || p_n >= n {
        return Err(invalid("p_n", format!("must satisfy 1 <= p_n < n = {n}, got {p_n}")));
    }
    Ok((2.0 * (n as f64 / p_n as f64).ln()).sqrt())
}

pub fn hard_threshold(x: &[f64]) -> Result<Vec<f64>> {
    Ok(threshold(x, universal_threshold(x.len())?))
}

pub fn hard_threshold_oracle(x: &[f64], p_n: usize) -> Result<Vec<f64>> {
    Ok(threshold(x, oracle_threshold(x.len(), p_n)?))
}
