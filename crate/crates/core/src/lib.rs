pub mod dimension;
pub mod error;
pub mod estimators;
pub mod harness;
pub mod logpoly;
pub mod posterior;
pub mod quadrature;
pub mod slab;
pub mod special;

pub use dimension::{DimensionFamily, DimensionPrior};
pub use error::{Error, Result};
pub use estimators::{dq_loss, hard_threshold, hard_threshold_oracle, LossSpec};
pub use logpoly::{leave_one_out_table, product_of_linear_factors, LeaveOneOut, LogPoly, ProductStrategy};
pub use posterior::{eb_binomial_weight, fit, FitConfig, Marginal, ObservationVector, Posterior, PosteriorSummary};
pub use slab::{SlabFamily, SlabPrior};
