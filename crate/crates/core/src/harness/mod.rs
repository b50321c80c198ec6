//! The reproducibility surface: config parsing/serialization, experiment
//! sweeps, run metrics, CSV/JSON output, and the trust estimators behind the
//! `estimate` CLI command.

pub mod config;
pub mod estimate;
pub mod experiment;
pub mod metrics;
pub mod output;

pub use config::{parse_config, serialize_config, ExperimentSpec, ParsedConfig};
pub use estimate::{estimate_trust, parse_history, Estimate, EstimateMethod, EstimateOptions};
pub use experiment::{run_experiment, MetricsRow};
pub use metrics::{compute_metrics, gini, MetricsReport};
