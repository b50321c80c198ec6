//! CSV writers with deterministic formatting.
//!
//! All floats are written with 12 significant digits via [`fmt_f64`], so
//! repeated runs of the same spec produce byte-identical files.
//!
//! Schemas:
//! - `rounds.csv`: round, creator_id, is_lottery, ground_truth_valid,
//!   accepted, committee, votes (committee/votes semicolon-joined)
//! - `trust.csv`: round, node_id, trust_value
//! - `summary.csv`: node_id, power, honesty, blocks_created, blocks_accepted,
//!   reward, final_trust
//! - `metrics.csv`: sweep_value, seed, gini, low_power_share,
//!   acceptance_rate, trust_mae (one row per run; empty cells for
//!   undefined metrics)

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::mcmc::{Chain, ChainSamples};
use crate::sim::{SimConfig, SimResult};

use super::metrics::MetricsReport;

/// Formats a float with 12 significant digits in plain decimal notation,
/// trailing zeros trimmed. `0.5` stays `0.5`, `1/3` becomes
/// `0.333333333333`. Extreme magnitudes (|exponent| > 15) keep scientific
/// notation.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.11e}"); // 12 significant digits
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("valid exponent");
    if exp.abs() > 15 {
        return sci;
    }
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    debug_assert_eq!(digits.len(), 12);

    // Value = digits[0].digits[1..] * 10^exp; place the decimal point.
    let point = exp + 1; // digits before the point
    let mut body = if point <= 0 {
        format!("0.{}{}", "0".repeat(-point as usize), digits)
    } else if (point as usize) < digits.len() {
        format!("{}.{}", &digits[..point as usize], &digits[point as usize..])
    } else {
        format!("{}{}", digits, "0".repeat(point as usize - digits.len()))
    };
    if body.contains('.') {
        body = body.trim_end_matches('0').trim_end_matches('.').to_string();
    }
    if negative {
        format!("-{body}")
    } else {
        body
    }
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    fs::write(path, content).map_err(|e| Error::io(path, e))
}

fn join_semicolon<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items
        .into_iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join(";")
}

pub fn rounds_csv(result: &SimResult) -> String {
    let mut out = String::from(
        "round,creator_id,is_lottery,ground_truth_valid,accepted,committee,votes\n",
    );
    for o in &result.outcomes {
        let committee = join_semicolon(o.events.iter().map(|e| e.validator));
        let votes = join_semicolon(o.events.iter().map(|e| e.vote));
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            o.block.round,
            o.block.creator,
            o.block.is_lottery,
            o.block.ground_truth_valid,
            o.accepted,
            committee,
            votes
        ));
    }
    out
}

pub fn trust_csv(config: &SimConfig, result: &SimResult) -> String {
    let mut out = String::from("round,node_id,trust_value\n");
    for round in 0..result.outcomes.len() {
        for (i, n) in config.nodes.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{}\n",
                round,
                n.id,
                fmt_f64(result.trust_trajectories[i][round])
            ));
        }
    }
    out
}

pub fn summary_csv(config: &SimConfig, result: &SimResult) -> String {
    let mut out = String::from(
        "node_id,power,honesty,blocks_created,blocks_accepted,reward,final_trust\n",
    );
    for (i, n) in config.nodes.iter().enumerate() {
        let created = result
            .outcomes
            .iter()
            .filter(|o| o.block.creator == n.id)
            .count();
        let accepted = result
            .outcomes
            .iter()
            .filter(|o| o.block.creator == n.id && o.accepted)
            .count();
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            n.id,
            fmt_f64(n.power),
            fmt_f64(n.honesty),
            created,
            accepted,
            fmt_f64(result.rewards[i]),
            fmt_f64(result.final_states[i].effective_trust(config.decay.mode)),
        ));
    }
    out
}

fn opt_cell(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

pub const METRICS_HEADER: &str = "sweep_value,seed,gini,low_power_share,acceptance_rate,trust_mae\n";

pub fn metrics_row(sweep_value: Option<f64>, seed: u64, report: &MetricsReport) -> String {
    format!(
        "{},{},{},{},{},{}\n",
        opt_cell(sweep_value),
        seed,
        opt_cell(report.gini),
        fmt_f64(report.low_power_share),
        fmt_f64(report.acceptance_rate),
        opt_cell(report.trust_mae),
    )
}

/// Writes the four per-run CSVs into `dir` (created if missing).
pub fn write_run_outputs(
    config: &SimConfig,
    result: &SimResult,
    report: &MetricsReport,
    sweep_value: Option<f64>,
    seed: u64,
    dir: &Path,
) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_file(&dir.join("rounds.csv"), &rounds_csv(result))?;
    write_file(&dir.join("trust.csv"), &trust_csv(config, result))?;
    write_file(&dir.join("summary.csv"), &summary_csv(config, result))?;
    let metrics = format!("{METRICS_HEADER}{}", metrics_row(sweep_value, seed, report));
    write_file(&dir.join("metrics.csv"), &metrics)
}

/// Chain export: `step,value` for scalar chains, `step,value,sigma2` for
/// Gaussian-model chains.
pub fn chain_csv(chain: &Chain) -> String {
    match &chain.samples {
        ChainSamples::Scalar(values) => {
            let mut out = String::from("step,value\n");
            for (i, v) in values.iter().enumerate() {
                out.push_str(&format!("{},{}\n", i, fmt_f64(*v)));
            }
            out
        }
        ChainSamples::Pairs(pairs) => {
            let mut out = String::from("step,value,sigma2\n");
            for (i, (mu, s2)) in pairs.iter().enumerate() {
                out.push_str(&format!("{},{},{}\n", i, fmt_f64(*mu), fmt_f64(*s2)));
            }
            out
        }
    }
}

pub fn write_chain_csv(chain: &Chain, path: &Path) -> Result<()> {
    write_file(path, &chain_csv(chain))
}
