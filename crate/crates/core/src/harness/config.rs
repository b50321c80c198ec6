//! Flat key-value config format with dotted keys for nesting.
//!
//! ```text
//! # comments start with '#'
//! alpha = 0.5
//! rounds = 1000
//! node.0.power = 2.0
//! node.0.honesty = 0.9
//! lottery.enabled = true
//! ```
//!
//! Parsing is strict: unknown keys and duplicate keys are errors, and every
//! value is validated against its documented constraint with a message that
//! names the offending key. Serialization emits keys in a fixed order with
//! round-trip-exact float formatting, so `parse(serialize(c)) == c`.
//!
//! An optional `sweep.*` section turns the file into an experiment
//! specification (parameter path, values, seeds, output directory).

use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::consensus::{LotteryConfig, NodeDescriptor, NodeId};
use crate::error::{Error, Result};
use crate::sim::{BehaviorMode, SimConfig, TruthMode};
use crate::trust::{BetaPrior, DecayMode, DecayParams};

/// Result of parsing a config file: a plain simulation config, or an
/// experiment when the file carries a `sweep.*` section.
#[derive(Debug, Clone, PartialEq)]
pub enum ParsedConfig {
    Sim(SimConfig),
    Experiment(ExperimentSpec),
}

impl ParsedConfig {
    /// The simulation config either way (an experiment's base).
    pub fn base(&self) -> &SimConfig {
        match self {
            ParsedConfig::Sim(c) => c,
            ParsedConfig::Experiment(e) => &e.base,
        }
    }
}

/// A sweep: one optional parameter path crossed with a list of values and a
/// list of seeds, run cell by cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub base: SimConfig,
    /// Dotted path of the swept parameter (e.g. `alpha`,
    /// `lottery.nb_success_prob`). Absent for pure seed replication.
    pub sweep_param: Option<String>,
    pub sweep_values: Vec<f64>,
    pub seeds: Vec<u64>,
    pub output_dir: PathBuf,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if self.sweep_param.is_some() && self.sweep_values.is_empty() {
            return Err(Error::param(
                "sweep.values",
                "must be non-empty when sweep.param is set",
            ));
        }
        if self.seeds.is_empty() {
            return Err(Error::param("sweep.seeds", "must be non-empty"));
        }
        if let Some(path) = &self.sweep_param {
            // Reject unknown paths before any cell runs.
            let mut probe = self.base.clone();
            set_sweep_param(&mut probe, path, self.sweep_values[0])?;
        }
        Ok(())
    }
}

fn parse_f64(key: &str, value: &str) -> Result<f64> {
    value
        .parse::<f64>()
        .map_err(|_| Error::param(key, format!("expected a number (got '{value}')")))
}

fn parse_u64(key: &str, value: &str) -> Result<u64> {
    value
        .parse::<u64>()
        .map_err(|_| Error::param(key, format!("expected a non-negative integer (got '{value}')")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(Error::param(
            key,
            format!("expected true or false (got '{value}')"),
        )),
    }
}

#[derive(Default)]
struct NodeEntry {
    power: Option<f64>,
    honesty: Option<f64>,
}

/// Parses config text into a [`SimConfig`] (or an [`ExperimentSpec`] when a
/// `sweep.*` section is present), applying documented defaults and
/// validating every constraint.
pub fn parse_config(text: &str) -> Result<ParsedConfig> {
    let mut config = default_config();
    let mut nodes: BTreeMap<u32, NodeEntry> = BTreeMap::new();
    let mut seen: Vec<String> = Vec::new();

    let mut sweep_param: Option<String> = None;
    let mut sweep_values: Option<Vec<f64>> = None;
    let mut sweep_seeds: Option<Vec<u64>> = None;
    let mut sweep_out: Option<PathBuf> = None;
    let mut has_sweep = false;

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!("line {}: expected 'key = value'", lineno + 1))
        })?;
        let key = key.trim();
        let value = value.trim();

        if seen.iter().any(|k| k == key) {
            return Err(Error::Config(format!("duplicate key: {key}")));
        }
        seen.push(key.to_string());

        match key {
            "alpha" => config.alpha = parse_f64(key, value)?,
            "rounds" => config.rounds = parse_u64(key, value)?,
            "seed" => config.seed = parse_u64(key, value)?,
            "committee_size" => config.committee_size = parse_u64(key, value)? as usize,
            "block_reward" => config.block_reward = parse_f64(key, value)?,
            "truth_mode" => {
                config.truth_mode = match value {
                    "oracle" => TruthMode::Oracle,
                    "majority" => TruthMode::Majority,
                    _ => {
                        return Err(Error::param(
                            key,
                            format!("expected oracle or majority (got '{value}')"),
                        ))
                    }
                }
            }
            "behavior_mode" => {
                config.behavior_mode = match value {
                    "independent_honesty" => BehaviorMode::IndependentHonesty,
                    "power_as_honesty" => BehaviorMode::PowerAsHonesty,
                    _ => {
                        return Err(Error::param(
                            key,
                            format!(
                                "expected independent_honesty or power_as_honesty (got '{value}')"
                            ),
                        ))
                    }
                }
            }
            "prior.a" => config.prior.a = parse_f64(key, value)?,
            "prior.b" => config.prior.b = parse_f64(key, value)?,
            "decay.mode" => {
                config.decay.mode = match value {
                    "none" => DecayMode::None,
                    "ema" => DecayMode::Ema,
                    "decayed_counts" => DecayMode::DecayedCounts,
                    _ => {
                        return Err(Error::param(
                            key,
                            format!("expected none, ema or decayed_counts (got '{value}')"),
                        ))
                    }
                }
            }
            "decay.lambda" => config.decay.lambda = parse_f64(key, value)?,
            "decay.gamma" => config.decay.gamma = parse_f64(key, value)?,
            "lottery.enabled" => config.lottery.enabled = parse_bool(key, value)?,
            "lottery.low_power_quantile" => {
                config.lottery.low_power_quantile = parse_f64(key, value)?
            }
            "lottery.nb_successes" => {
                config.lottery.nb_successes = parse_u64(key, value)? as u32
            }
            "lottery.nb_success_prob" => {
                config.lottery.nb_success_prob = parse_f64(key, value)?
            }
            "lottery.uniform_low_power" => {
                config.lottery.uniform_low_power = parse_bool(key, value)?
            }
            "sweep.param" => {
                has_sweep = true;
                sweep_param = Some(value.to_string());
            }
            "sweep.values" => {
                has_sweep = true;
                sweep_values = Some(parse_value_list(key, value)?);
            }
            "sweep.seeds" => {
                has_sweep = true;
                sweep_seeds = Some(parse_seed_list(value)?);
            }
            "sweep.output_dir" => {
                has_sweep = true;
                sweep_out = Some(PathBuf::from(value));
            }
            _ => {
                if let Some(rest) = key.strip_prefix("node.") {
                    let (id_str, field) = rest.split_once('.').ok_or_else(|| {
                        Error::Config(format!(
                            "unknown key: {key} (expected node.<id>.power or node.<id>.honesty)"
                        ))
                    })?;
                    let id: u32 = id_str.parse().map_err(|_| {
                        Error::param(key, format!("node id must be an integer (got '{id_str}')"))
                    })?;
                    let entry = nodes.entry(id).or_default();
                    match field {
                        "power" => entry.power = Some(parse_f64(key, value)?),
                        "honesty" => entry.honesty = Some(parse_f64(key, value)?),
                        _ => {
                            return Err(Error::Config(format!(
                                "unknown key: {key} (expected node.<id>.power or node.<id>.honesty)"
                            )))
                        }
                    }
                } else {
                    return Err(Error::Config(format!("unknown key: {key}")));
                }
            }
        }
    }

    config.nodes = Vec::with_capacity(nodes.len());
    for (id, entry) in nodes {
        let power = entry.power.ok_or_else(|| {
            Error::param(format!("node.{id}.power"), "is required for every node")
        })?;
        let honesty = entry.honesty.unwrap_or(1.0);
        config.nodes.push(NodeDescriptor::new(NodeId(id), power, honesty)?);
    }

    config.validate()?;

    if has_sweep {
        let spec = ExperimentSpec {
            base: config,
            sweep_param,
            sweep_values: sweep_values.unwrap_or_default(),
            seeds: sweep_seeds.unwrap_or_default(),
            output_dir: sweep_out
                .ok_or_else(|| Error::param("sweep.output_dir", "is required for a sweep"))?,
        };
        spec.validate()?;
        Ok(ParsedConfig::Experiment(spec))
    } else {
        Ok(ParsedConfig::Sim(config))
    }
}

/// Comma-separated float list, e.g. `0,0.5,1`.
pub fn parse_value_list(key: &str, text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| parse_f64(key, s.trim()))
        .collect()
}

/// Seed list: either a bare count `n` (expands to `0..n`) or a
/// comma-separated list of explicit seed values.
pub fn parse_seed_list(text: &str) -> Result<Vec<u64>> {
    let text = text.trim();
    if !text.contains(',') {
        let n = parse_u64("sweep.seeds", text)?;
        return Ok((0..n).collect());
    }
    text.split(',')
        .map(|s| parse_u64("sweep.seeds", s.trim()))
        .collect()
}

fn default_config() -> SimConfig {
    SimConfig {
        nodes: Vec::new(),
        alpha: 0.5,
        prior: BetaPrior::jeffreys(),
        decay: DecayParams::none(),
        committee_size: 3,
        lottery: LotteryConfig::disabled(),
        truth_mode: TruthMode::Oracle,
        behavior_mode: BehaviorMode::IndependentHonesty,
        rounds: 100,
        block_reward: 1.0,
        seed: 0,
    }
}

/// Emits a config as parseable text, keys in fixed order, floats formatted
/// for exact round-tripping.
pub fn serialize_config(config: &SimConfig) -> String {
    let mut out = String::new();
    let mut push = |k: &str, v: String| {
        out.push_str(k);
        out.push_str(" = ");
        out.push_str(&v);
        out.push('\n');
    };

    push("alpha", config.alpha.to_string());
    push("rounds", config.rounds.to_string());
    push("seed", config.seed.to_string());
    push("committee_size", config.committee_size.to_string());
    push("block_reward", config.block_reward.to_string());
    push(
        "truth_mode",
        match config.truth_mode {
            TruthMode::Oracle => "oracle",
            TruthMode::Majority => "majority",
        }
        .to_string(),
    );
    push(
        "behavior_mode",
        match config.behavior_mode {
            BehaviorMode::IndependentHonesty => "independent_honesty",
            BehaviorMode::PowerAsHonesty => "power_as_honesty",
        }
        .to_string(),
    );
    push("prior.a", config.prior.a.to_string());
    push("prior.b", config.prior.b.to_string());
    push(
        "decay.mode",
        match config.decay.mode {
            DecayMode::None => "none",
            DecayMode::Ema => "ema",
            DecayMode::DecayedCounts => "decayed_counts",
        }
        .to_string(),
    );
    push("decay.lambda", config.decay.lambda.to_string());
    push("decay.gamma", config.decay.gamma.to_string());
    push("lottery.enabled", config.lottery.enabled.to_string());
    push(
        "lottery.low_power_quantile",
        config.lottery.low_power_quantile.to_string(),
    );
    push(
        "lottery.nb_successes",
        config.lottery.nb_successes.to_string(),
    );
    push(
        "lottery.nb_success_prob",
        config.lottery.nb_success_prob.to_string(),
    );
    push(
        "lottery.uniform_low_power",
        config.lottery.uniform_low_power.to_string(),
    );
    for n in &config.nodes {
        push(&format!("node.{}.power", n.id), n.power.to_string());
        push(&format!("node.{}.honesty", n.id), n.honesty.to_string());
    }
    out
}

/// Sets one numeric parameter by its dotted path. Integer-valued paths
/// reject fractional values.
pub fn set_sweep_param(config: &mut SimConfig, path: &str, value: f64) -> Result<()> {
    let as_integer = |name: &str| -> Result<u64> {
        if value.fract() != 0.0 || value < 0.0 {
            return Err(Error::param(
                name,
                format!("sweep value must be a non-negative integer (got {value})"),
            ));
        }
        Ok(value as u64)
    };
    match path {
        "alpha" => config.alpha = value,
        "block_reward" => config.block_reward = value,
        "prior.a" => config.prior.a = value,
        "prior.b" => config.prior.b = value,
        "decay.lambda" => config.decay.lambda = value,
        "decay.gamma" => config.decay.gamma = value,
        "lottery.low_power_quantile" => config.lottery.low_power_quantile = value,
        "lottery.nb_success_prob" => config.lottery.nb_success_prob = value,
        "committee_size" => config.committee_size = as_integer(path)? as usize,
        "rounds" => config.rounds = as_integer(path)?,
        "lottery.nb_successes" => config.lottery.nb_successes = as_integer(path)? as u32,
        _ => {
            return Err(Error::param(
                "sweep.param",
                format!("'{path}' is not a sweepable parameter"),
            ))
        }
    }
    Ok(())
}
