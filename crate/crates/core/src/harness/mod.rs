//! Simulation drivers: data generation, estimator tables and diagnostic checks.

pub mod checks;
pub mod config;
pub mod data;
pub mod io;
pub mod table;

pub use checks::{
    posterior_risk, run_contraction_check, run_dimension_check, run_shrinkage_demo, ContractionReport,
    DimensionReport, ShrinkageConfig, ShrinkageReport,
};
pub use config::{PriorKind, PriorSpec, SlabSpec};
pub use data::{generate_data, Placement, ReplicationKey, SignalSpec};
pub use io::{
    emit_interval_data, interval_records, parse_observations, read_observations, IntervalRecord, OutputFormat,
    write_records,
};
pub use table::{run_table, Estimator, ExperimentConfig, IdentityAudit, ResultCell, ResultTable};
