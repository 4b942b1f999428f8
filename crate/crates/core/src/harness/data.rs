//! Synthetic signals and reproducible noise.
//!
//! Each replication draws from a ChaCha8 stream selected by `(cell, rep)` under
//! a key derived from the experiment seed, so any replication can be regenerated
//! on its own, in any order, on any worker.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::posterior::ObservationVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Placement {
    /// The last `p_n` coordinates carry the signal.
    #[default]
    Tail,
    RandomSupport,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignalSpec {
    pub n: usize,
    pub p_n: usize,
    pub amplitude: f64,
    pub placement: Placement,
    /// Standard deviation of the noise; 1 under the model, 0 for noiseless checks.
    pub noise_sd: f64,
}

impl SignalSpec {
    pub fn new(n: usize, p_n: usize, amplitude: f64) -> Result<Self> {
        let spec = Self {
            n,
            p_n,
            amplitude,
            placement: Placement::Tail,
            noise_sd: 1.0,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_placement(mut self, placement: Placement) -> Self {
        self.placement = placement;
        self
    }

    pub fn with_noise_sd(mut self, sd: f64) -> Result<Self> {
        if !(sd >= 0.0 && sd.is_finite()) {
            return Err(invalid("noise_sd", format!("must be finite and nonnegative, got {sd}")));
        }
        self.noise_sd = sd;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(invalid("n", "must be at least 1"));
        }
        if self.p_n > self.n {
            return Err(invalid("p_n", format!("must not exceed n = {}, got {}", self.n, self.p_n)));
        }
        if !self.amplitude.is_finite() {
            return Err(invalid("amplitude", "must be finite"));
        }
        Ok(())
    }

    /// The true mean vector (deterministic for `Tail` placement).
    fn theta(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let mut theta = vec![0.0; self.n];
        match self.placement {
            Placement::Tail => theta[self.n - self.p_n..].fill(self.amplitude),
            Placement::RandomSupport => {
                for i in sample(rng, self.n, self.p_n) {
                    theta[i] = self.amplitude;
                }
            }
        }
        theta
    }
}

/// Identifies one replication's random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ReplicationKey {
    pub seed: u64,
    pub cell: u32,
    pub rep: u32,
}

impl ReplicationKey {
    pub fn new(seed: u64, cell: u32, rep: u32) -> Self {
        Self { seed, cell, rep }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(((self.cell as u64) << 32) | self.rep as u64);
        rng
    }
}

/// Draw `(θ₀, X)` with `X = θ₀ + noise`.
pub fn generate_data(spec: &SignalSpec, key: ReplicationKey) -> Result<(Vec<f64>, ObservationVector)> {
    spec.validate()?;
    let mut rng = key.rng();
    let theta = spec.theta(&mut rng);
    let x = theta
        .iter()
        .map(|t| {
            let z: f64 = StandardNormal.sample(&mut rng);
            t + spec.noise_sd * z
        })
        .collect();
    Ok((theta, ObservationVector::new(x)?))
}
