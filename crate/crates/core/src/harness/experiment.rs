//! Experiment sweeps: (sweep value x seed) grids of simulation runs.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::rng;
use crate::sim::{run_simulation, SimConfig};

use super::config::{set_sweep_param, ExperimentSpec};
use super::metrics::{compute_metrics, MetricsReport};
use super::output::{fmt_f64, metrics_row, write_run_outputs, METRICS_HEADER};

/// One row of the combined metrics table.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub sweep_value: Option<f64>,
    pub seed: u64,
    pub report: MetricsReport,
}

fn cell_dir(dir: &Path, param: Option<&str>, value: Option<f64>, seed: u64) -> std::path::PathBuf {
    match (param, value) {
        (Some(p), Some(v)) => dir.join(format!("{}_{}_seed_{}", p.replace('.', "_"), fmt_f64(v), seed)),
        _ => dir.join(format!("seed_{seed}")),
    }
}

/// Runs every cell of the grid, writes each run's CSVs into its own
/// subdirectory of `spec.output_dir`, writes the combined `metrics.csv`,
/// and returns the rows in deterministic (value, seed) order.
///
/// Each cell's stream seed is a SplitMix64 hash of
/// `(base seed, value index, seed entry)`, so cells are independent of
/// execution order and of each other.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<MetricsRow>> {
    spec.validate()?;
    fs::create_dir_all(&spec.output_dir).map_err(|e| Error::io(&spec.output_dir, e))?;

    // A sweep without a parameter is plain seed replication.
    let values: Vec<Option<f64>> = match &spec.sweep_param {
        Some(_) => spec.sweep_values.iter().copied().map(Some).collect(),
        None => vec![None],
    };

    let mut rows = Vec::with_capacity(values.len() * spec.seeds.len());
    let mut table = String::from(METRICS_HEADER);

    for (value_index, &value) in values.iter().enumerate() {
        let mut config: SimConfig = spec.base.clone();
        if let (Some(path), Some(v)) = (&spec.sweep_param, value) {
            set_sweep_param(&mut config, path, v)?;
        }
        for &seed_entry in &spec.seeds {
            let mut cell = config.clone();
            cell.seed = rng::mix_seed(&[spec.base.seed, value_index as u64, seed_entry]);
            let result = run_simulation(&cell)?;
            let report = compute_metrics(&cell, &result);

            let dir = cell_dir(
                &spec.output_dir,
                spec.sweep_param.as_deref(),
                value,
                seed_entry,
            );
            write_run_outputs(&cell, &result, &report, value, seed_entry, &dir)?;

            table.push_str(&metrics_row(value, seed_entry, &report));
            rows.push(MetricsRow {
                sweep_value: value,
                seed: seed_entry,
                report,
            });
        }
    }

    let table_path = spec.output_dir.join("metrics.csv");
    fs::write(&table_path, table).map_err(|e| Error::io(&table_path, e))?;
    Ok(rows)
}

/// Convenience wrapper for a single `simulate` invocation: runs the config
/// and writes all four CSVs into `out_dir`.
pub fn run_single(config: &SimConfig, out_dir: &Path) -> Result<MetricsReport> {
    let result = run_simulation(config)?;
    let report = compute_metrics(config, &result);
    write_run_outputs(config, &result, &report, None, config.seed, out_dir)?;
    Ok(report)
}
