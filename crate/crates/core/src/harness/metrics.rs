//! Per-run summary metrics.

use serde::{Deserialize, Serialize};

use crate::consensus::low_power_indices;
use crate::error::{Error, Result};
use crate::sim::{SimConfig, SimResult, TruthMode};

/// Quantifies a run: reward inequality, how many blocks the low-power set
/// produced, how many blocks were accepted, and (oracle mode) how close the
/// final trust scores came to the nodes' true correctness probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    /// Gini coefficient of cumulative rewards. Undefined (None) when no
    /// rewards were paid at all.
    pub gini: Option<f64>,
    /// Fraction of blocks created by the low-power set (power at or below
    /// the configured low-power quantile, whether or not the lottery ran).
    pub low_power_share: f64,
    /// Fraction of rounds whose block was accepted.
    pub acceptance_rate: f64,
    /// Oracle mode only: mean |final trust - correctness probability|.
    pub trust_mae: Option<f64>,
}

/// Standard Gini coefficient of a non-negative vector. 0 for perfect
/// equality, (n-1)/n when a single holder owns everything.
pub fn gini(rewards: &[f64]) -> Result<f64> {
    if rewards.is_empty() {
        return Err(Error::Empty("rewards"));
    }
    for (i, &r) in rewards.iter().enumerate() {
        if !(r.is_finite() && r >= 0.0) {
            return Err(Error::param(
                format!("rewards[{i}]"),
                format!("must be >= 0 (got {r})"),
            ));
        }
    }
    let total: f64 = rewards.iter().sum();
    if total <= 0.0 {
        return Err(Error::param("rewards", "must not be all zero"));
    }
    let mut sorted = rewards.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite rewards"));
    let n = sorted.len() as f64;
    let weighted: f64 = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| (i as f64 + 1.0) * x)
        .sum();
    Ok(2.0 * weighted / (n * total) - (n + 1.0) / n)
}

/// Computes the report for one finished run.
pub fn compute_metrics(config: &SimConfig, result: &SimResult) -> MetricsReport {
    let rounds = result.outcomes.len() as f64;

    let powers: Vec<f64> = config.nodes.iter().map(|n| n.power).collect();
    let low = low_power_indices(&powers, config.lottery.low_power_quantile);
    let low_ids: Vec<_> = low.iter().map(|&i| config.nodes[i].id).collect();
    let low_blocks = result
        .outcomes
        .iter()
        .filter(|o| low_ids.contains(&o.block.creator))
        .count();
    let accepted = result.outcomes.iter().filter(|o| o.accepted).count();

    let trust_mae = match config.truth_mode {
        TruthMode::Oracle => {
            let total: f64 = config
                .nodes
                .iter()
                .enumerate()
                .map(|(i, n)| {
                    let target = config.correctness_prob(n);
                    let trust = result.final_states[i].effective_trust(config.decay.mode);
                    (trust - target).abs()
                })
                .sum();
            Some(total / config.nodes.len() as f64)
        }
        TruthMode::Majority => None,
    };

    MetricsReport {
        gini: gini(&result.rewards).ok(),
        low_power_share: low_blocks as f64 / rounds,
        acceptance_rate: accepted as f64 / rounds,
        trust_mae,
    }
}
