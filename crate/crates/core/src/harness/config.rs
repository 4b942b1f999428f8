//! Serializable descriptions of priors, used by the experiment drivers and the CLI.

use serde::{Deserialize, Serialize};

use crate::dimension::DimensionPrior;
use crate::error::Result;
use crate::slab::{SlabFamily, SlabPrior};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PriorKind {
    /// `π_n(p) ∝ exp(−κ p log(b n / p))`
    Complexity,
    /// `π_n(p) ∝ C(2n − p, n)^κ`
    Betabin,
    Binomial,
    Poisson,
    Geometric,
}

/// Dimension prior family and parameters, independent of `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriorSpec {
    pub kind: PriorKind,
    pub kappa: f64,
    pub b: f64,
    /// Binomial weight, Poisson rate or geometric success probability.
    pub alpha: f64,
}

impl PriorSpec {
    pub fn complexity(kappa: f64) -> Self {
        Self {
            kind: PriorKind::Complexity,
            kappa,
            b: 3.0,
            alpha: 0.5,
        }
    }

    pub fn betabin(kappa: f64) -> Self {
        Self {
            kind: PriorKind::Betabin,
            kappa,
            b: 3.0,
            alpha: 0.5,
        }
    }

    pub fn build(&self, n: usize) -> Result<DimensionPrior> {
        match self.kind {
            PriorKind::Complexity => DimensionPrior::complexity(n, self.kappa, self.b),
            PriorKind::Betabin => DimensionPrior::betabin_power(n, self.kappa),
            PriorKind::Binomial => DimensionPrior::binomial(n, self.alpha),
            PriorKind::Poisson => DimensionPrior::poisson(n, self.alpha),
            PriorKind::Geometric => DimensionPrior::geometric(n, self.alpha),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlabSpec {
    pub family: SlabFamily,
    /// Laplace rate, Gaussian sd, or Student / exp-power scale.
    pub scale: f64,
    /// Student degrees of freedom or exp-power exponent; ignored otherwise.
    pub shape: f64,
}

impl SlabSpec {
    pub fn laplace(a: f64) -> Self {
        Self {
            family: SlabFamily::Laplace,
            scale: a,
            shape: 1.0,
        }
    }

    pub fn gaussian(sd: f64) -> Self {
        Self {
            family: SlabFamily::Gaussian,
            scale: sd,
            shape: 2.0,
        }
    }

    pub fn build(&self) -> Result<SlabPrior> {
        match self.family {
            SlabFamily::Laplace => SlabPrior::laplace(self.scale),
            SlabFamily::Gaussian => SlabPrior::gaussian(self.scale),
            SlabFamily::Student => SlabPrior::student(self.shape, self.scale),
            SlabFamily::ExpPower => SlabPrior::exp_power(self.shape, self.scale),
        }
    }
}

impl Default for SlabSpec {
    fn default() -> Self {
        Self::laplace(1.0)
    }
}
