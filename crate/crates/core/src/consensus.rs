//! Election mechanics.
//!
//! Creation chances come straight from relative computing power,
//! `C_i = P_i / P_total`. The election distribution mixes power with trust,
//! `alpha * C_i + (1 - alpha) * T_i`, normalized across nodes so it can be
//! sampled. Validator committees are drawn without replacement, weighted by
//! power, excluding the creator.
//!
//! The lottery is a renewal process: draw `K ~ NegativeBinomial(r, p)`
//! (failures before the r-th success); after `K` ordinary blocks the next
//! block's creator is drawn from the low-power set, then `K` is redrawn.
//! Long-run, low-power nodes create `1 / (1 + E[K])` of all blocks.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SimRng;

/// Node identifier, unique within a network.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
pub struct NodeId(pub u32);

impl std::fmt::Display for NodeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// A network participant: identity, computing power, and the ground-truth
/// probability of acting correctly (simulator-side behavior parameter).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodeDescriptor {
    pub id: NodeId,
    pub power: f64,
    pub honesty: f64,
}

impl NodeDescriptor {
    pub fn new(id: NodeId, power: f64, honesty: f64) -> Result<Self> {
        if !(power.is_finite() && power > 0.0) {
            return Err(Error::param(
                format!("node.{id}.power"),
                format!("must be > 0 (got {power})"),
            ));
        }
        if !(honesty.is_finite() && (0.0..=1.0).contains(&honesty)) {
            return Err(Error::param(
                format!("node.{id}.honesty"),
                format!("must lie in [0, 1] (got {honesty})"),
            ));
        }
        Ok(NodeDescriptor { id, power, honesty })
    }
}

/// Per-round election weights: raw creation chances, the power/trust mix,
/// and the normalized distribution actually sampled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionWeights {
    /// `C_i = P_i / P_total`; sums to 1.
    pub creation: Vec<f64>,
    /// `alpha * C_i + (1 - alpha) * T_i`, before normalization.
    pub combined_raw: Vec<f64>,
    /// Normalized election probabilities; sums to 1.
    pub distribution: Vec<f64>,
    pub alpha: f64,
}

/// Lottery configuration. `low_power_quantile` selects which nodes count as
/// low-power: those with power at or below the nearest-rank empirical
/// quantile of all powers (ties included).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LotteryConfig {
    pub enabled: bool,
    pub low_power_quantile: f64,
    /// Negative-binomial success count r.
    pub nb_successes: u32,
    /// Negative-binomial success probability p, in (0, 1].
    pub nb_success_prob: f64,
    /// When set, lottery blocks pick uniformly among low-power nodes instead
    /// of reusing their (renormalized) election weights.
    pub uniform_low_power: bool,
}

impl LotteryConfig {
    pub fn disabled() -> Self {
        LotteryConfig {
            enabled: false,
            low_power_quantile: 0.5,
            nb_successes: 1,
            nb_success_prob: 0.5,
            uniform_low_power: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.low_power_quantile.is_finite()
            && self.low_power_quantile > 0.0
            && self.low_power_quantile < 1.0)
        {
            return Err(Error::param(
                "lottery.low_power_quantile",
                format!("must lie in (0, 1) (got {})", self.low_power_quantile),
            ));
        }
        if self.nb_successes == 0 {
            return Err(Error::param("lottery.nb_successes", "must be >= 1 (got 0)"));
        }
        if !(self.nb_success_prob.is_finite()
            && self.nb_success_prob > 0.0
            && self.nb_success_prob <= 1.0)
        {
            return Err(Error::param(
                "lottery.nb_success_prob",
                format!("must lie in (0, 1] (got {})", self.nb_success_prob),
            ));
        }
        Ok(())
    }
}

impl Default for LotteryConfig {
    fn default() -> Self {
        LotteryConfig::disabled()
    }
}

/// Counts ordinary blocks until the next lottery block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LotteryState {
    pub failures_remaining: u64,
}

impl LotteryState {
    /// Starting state: the first gap is drawn up front when the lottery is
    /// enabled, zero otherwise.
    pub fn initial(cfg: &LotteryConfig, rng: &mut SimRng) -> Result<Self> {
        let failures_remaining = if cfg.enabled {
            draw_lottery_gap(cfg, rng)?
        } else {
            0
        };
        Ok(LotteryState { failures_remaining })
    }
}

/// `C_i = P_i / P_total` for every node. Errors on an empty vector or any
/// non-positive power.
pub fn creation_chance(powers: &[f64]) -> Result<Vec<f64>> {
    if powers.is_empty() {
        return Err(Error::Empty("powers"));
    }
    for (i, &p) in powers.iter().enumerate() {
        if !(p.is_finite() && p > 0.0) {
            return Err(Error::param(
                format!("powers[{i}]"),
                format!("must be > 0 (got {p})"),
            ));
        }
    }
    let total: f64 = powers.iter().sum();
    Ok(powers.iter().map(|p| p / total).collect())
}

/// Mixes creation chances with trust scores and normalizes into an election
/// distribution. The raw mix `alpha * C_i + (1 - alpha) * T_i` need not sum
/// to 1 (trust scores are unnormalized), so the sampled distribution is the
/// raw mix divided by its total.
pub fn combined_chance(creation: &[f64], trust: &[f64], alpha: f64) -> Result<SelectionWeights> {
    if creation.is_empty() {
        return Err(Error::Empty("creation"));
    }
    if creation.len() != trust.len() {
        return Err(Error::param(
            "trust",
            format!(
                "length {} does not match creation length {}",
                trust.len(),
                creation.len()
            ),
        ));
    }
    if !(alpha.is_finite() && (0.0..=1.0).contains(&alpha)) {
        return Err(Error::param(
            "alpha",
            format!("must lie in [0, 1] (got {alpha})"),
        ));
    }
    let creation_sum: f64 = creation.iter().sum();
    if (creation_sum - 1.0).abs() > 1e-9 {
        return Err(Error::param(
            "creation",
            format!("must sum to 1 (got {creation_sum})"),
        ));
    }
    for (i, &t) in trust.iter().enumerate() {
        if !(t.is_finite() && (0.0..=1.0).contains(&t)) {
            return Err(Error::param(
                format!("trust[{i}]"),
                format!("must lie in [0, 1] (got {t})"),
            ));
        }
    }

    let combined_raw: Vec<f64> = creation
        .iter()
        .zip(trust)
        .map(|(&c, &t)| alpha * c + (1.0 - alpha) * t)
        .collect();
    let total: f64 = combined_raw.iter().sum();
    if total <= 0.0 {
        return Err(Error::param(
            "combined_raw",
            "election weights sum to zero; no node is electable",
        ));
    }
    let distribution = combined_raw.iter().map(|w| w / total).collect();

    Ok(SelectionWeights {
        creation: creation.to_vec(),
        combined_raw,
        distribution,
        alpha,
    })
}

/// One weighted draw over non-negative weights. Used for both creator
/// election and committee sampling.
fn weighted_index(weights: &[f64], rng: &mut SimRng) -> Result<usize> {
    if weights.is_empty() {
        return Err(Error::Empty("weights"));
    }
    let total: f64 = weights.iter().sum();
    if !(total.is_finite() && total > 0.0) {
        return Err(Error::param(
            "weights",
            format!("must have positive finite total (got {total})"),
        ));
    }
    let u: f64 = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last_positive = None;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            acc += w;
            last_positive = Some(i);
            if u < acc {
                return Ok(i);
            }
        }
    }
    // Floating-point edge: u landed at the very top of the accumulator.
    Ok(last_positive.expect("positive total implies a positive weight"))
}

/// Draws the round's block creator: index `i` with probability
/// `distribution[i]`.
pub fn select_creator(weights: &SelectionWeights, rng: &mut SimRng) -> Result<usize> {
    weighted_index(&weights.distribution, rng)
}

/// Samples the validator committee: up to `k` distinct nodes, never the
/// creator, drawn sequentially without replacement with probability
/// proportional to computing power. With fewer than `k` candidates the whole
/// candidate set is returned.
pub fn select_validators(
    nodes: &[NodeDescriptor],
    creator: NodeId,
    k: usize,
    rng: &mut SimRng,
) -> Result<Vec<NodeId>> {
    if k == 0 {
        return Err(Error::param("committee_size", "must be >= 1 (got 0)"));
    }
    if nodes.len() < 2 {
        return Err(Error::param(
            "nodes",
            format!("need at least 2 nodes to form a committee (got {})", nodes.len()),
        ));
    }

    let mut candidates: Vec<&NodeDescriptor> = nodes.iter().filter(|n| n.id != creator).collect();
    let size = k.min(candidates.len());
    let mut committee = Vec::with_capacity(size);
    for _ in 0..size {
        let weights: Vec<f64> = candidates.iter().map(|n| n.power).collect();
        let pick = weighted_index(&weights, rng)?;
        committee.push(candidates.swap_remove(pick).id);
    }
    Ok(committee)
}

/// Failures before the first success with success probability `p`, by
/// inversion: `floor(ln(1 - u) / ln(1 - p))`.
fn geometric_failures(p: f64, rng: &mut SimRng) -> u64 {
    if p >= 1.0 {
        return 0;
    }
    let u: f64 = rng.random(); // in [0, 1), so 1 - u is in (0, 1]
    ((1.0 - u).ln() / (1.0 - p).ln()).floor() as u64
}

/// Samples `K ~ NegativeBinomial(r, p)`: the number of failures before the
/// r-th success, as the sum of r geometric draws. `K` becomes the number of
/// ordinary blocks until the next lottery block.
pub fn draw_lottery_gap(cfg: &LotteryConfig, rng: &mut SimRng) -> Result<u64> {
    cfg.validate()?;
    let mut failures = 0u64;
    for _ in 0..cfg.nb_successes {
        failures += geometric_failures(cfg.nb_success_prob, rng);
    }
    Ok(failures)
}

/// Indices of the low-power set: nodes with power at or below the
/// nearest-rank `quantile` of all powers. Non-empty whenever `powers` is.
pub fn low_power_indices(powers: &[f64], quantile: f64) -> Vec<usize> {
    if powers.is_empty() {
        return Vec::new();
    }
    let mut sorted: Vec<f64> = powers.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite powers"));
    let rank = ((quantile * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    let threshold = sorted[rank - 1];
    powers
        .iter()
        .enumerate()
        .filter(|(_, &p)| p <= threshold)
        .map(|(i, _)| i)
        .collect()
}

/// Elects the round's creator, honoring the lottery schedule.
///
/// When the lottery is enabled and the failure counter has run out, the
/// creator comes from the low-power set — weighted by the nodes' election
/// distribution entries (renormalized), or uniformly when
/// `uniform_low_power` is set — and the counter is redrawn. Otherwise the
/// creator is a plain [`select_creator`] draw and the counter ticks down.
///
/// Returns the creator's index and whether this is a lottery block.
pub fn next_creator(
    weights: &SelectionWeights,
    nodes: &[NodeDescriptor],
    cfg: &LotteryConfig,
    state: &mut LotteryState,
    rng: &mut SimRng,
) -> Result<(usize, bool)> {
    if !cfg.enabled {
        return Ok((select_creator(weights, rng)?, false));
    }
    if state.failures_remaining > 0 {
        state.failures_remaining -= 1;
        return Ok((select_creator(weights, rng)?, false));
    }

    let powers: Vec<f64> = nodes.iter().map(|n| n.power).collect();
    let low = low_power_indices(&powers, cfg.low_power_quantile);
    if low.is_empty() {
        return Err(Error::param(
            "lottery.low_power_quantile",
            "low-power set is empty",
        ));
    }
    let low_weights: Vec<f64> = if cfg.uniform_low_power {
        vec![1.0; low.len()]
    } else {
        low.iter().map(|&i| weights.distribution[i]).collect()
    };
    let pick = weighted_index(&low_weights, rng)?;
    state.failures_remaining = draw_lottery_gap(cfg, rng)?;
    Ok((low[pick], true))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn make_nodes(powers: &[f64]) -> Vec<NodeDescriptor> {
        powers
            .iter()
            .enumerate()
            .map(|(i, &p)| NodeDescriptor::new(NodeId(i as u32), p, 1.0).unwrap())
            .collect()
    }

    #[test]
    fn creation_chance_examples() {
        let c = creation_chance(&[2.0, 3.0, 5.0]).unwrap();
        assert_eq!(c, vec![0.2, 0.3, 0.5]);
        assert_eq!(creation_chance(&[7.0]).unwrap(), vec![1.0]);
        assert_eq!(
            creation_chance(&[1.0, 1.0, 1.0, 1.0]).unwrap(),
            vec![0.25; 4]
        );
    }

    #[test]
    fn creation_chance_rejects_bad_input() {
        assert!(creation_chance(&[]).is_err());
        assert!(creation_chance(&[1.0, 0.0]).is_err());
        assert!(creation_chance(&[1.0, -2.0]).is_err());
        assert!(creation_chance(&[1.0, f64::INFINITY]).is_err());
    }

    #[test]
    fn combined_chance_alpha_one_returns_creation() {
        let creation = creation_chance(&[1.0, 2.0, 7.0]).unwrap();
        let w = combined_chance(&creation, &[0.9, 0.1, 0.5], 1.0).unwrap();
        for (d, c) in w.distribution.iter().zip(&creation) {
            assert_abs_diff_eq!(d, c, epsilon = 1e-12);
        }
    }

    #[test]
    fn combined_chance_alpha_zero_equal_trust_is_uniform() {
        let creation = creation_chance(&[1.0, 9.0]).unwrap();
        let w = combined_chance(&creation, &[0.5, 0.5], 0.0).unwrap();
        assert_abs_diff_eq!(w.distribution[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(w.distribution[1], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn combined_chance_mixed_example() {
        let w = combined_chance(&[0.2, 0.8], &[0.9, 0.1], 0.5).unwrap();
        assert_abs_diff_eq!(w.combined_raw[0], 0.55, epsilon = 1e-12);
        assert_abs_diff_eq!(w.combined_raw[1], 0.45, epsilon = 1e-12);
        assert_abs_diff_eq!(w.distribution[0], 0.55, epsilon = 1e-12);
        assert_abs_diff_eq!(w.distribution[1], 0.45, epsilon = 1e-12);
    }

    #[test]
    fn combined_chance_normalizes_general_case() {
        // Trust does not sum to 1 here, so normalization must happen.
        let creation = creation_chance(&[3.0, 1.0, 1.0]).unwrap();
        let trust = [0.9, 0.8, 0.7];
        let alpha = 0.3;
        let w = combined_chance(&creation, &trust, alpha).unwrap();
        // Brute-force recomputation.
        let raw: Vec<f64> = creation
            .iter()
            .zip(&trust)
            .map(|(&c, &t)| alpha * c + (1.0 - alpha) * t)
            .collect();
        let total: f64 = raw.iter().sum();
        for (i, &r) in raw.iter().enumerate() {
            assert_abs_diff_eq!(w.combined_raw[i], r, epsilon = 1e-12);
            assert_abs_diff_eq!(w.distribution[i], r / total, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(w.distribution.iter().sum::<f64>(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn combined_chance_input_validation() {
        assert!(combined_chance(&[], &[], 0.5).is_err());
        assert!(combined_chance(&[0.5, 0.5], &[0.5], 0.5).is_err());
        assert!(combined_chance(&[0.5, 0.5], &[0.5, 0.5], 1.5).is_err());
        assert!(combined_chance(&[0.7, 0.7], &[0.5, 0.5], 0.5).is_err()); // not a distribution
        assert!(combined_chance(&[0.5, 0.5], &[0.5, 1.5], 0.5).is_err());
    }

    #[test]
    fn select_creator_degenerate_distribution() {
        let w = SelectionWeights {
            creation: vec![1.0, 0.0, 0.0],
            combined_raw: vec![1.0, 0.0, 0.0],
            distribution: vec![1.0, 0.0, 0.0],
            alpha: 1.0,
        };
        let mut rng = stream(3);
        for _ in 0..100 {
            assert_eq!(select_creator(&w, &mut rng).unwrap(), 0);
        }
    }

    #[test]
    fn select_creator_empty_distribution_errors() {
        let w = SelectionWeights {
            creation: vec![],
            combined_raw: vec![],
            distribution: vec![],
            alpha: 1.0,
        };
        assert!(select_creator(&w, &mut stream(0)).is_err());
    }

    #[test]
    fn select_creator_frequencies_match_distribution() {
        let creation = creation_chance(&[2.0, 3.0, 5.0]).unwrap();
        let w = combined_chance(&creation, &[0.5, 0.5, 0.5], 1.0).unwrap();
        let mut rng = stream(41);
        let draws = 1_000_000usize;
        let mut counts = [0usize; 3];
        for _ in 0..draws {
            counts[select_creator(&w, &mut rng).unwrap()] += 1;
        }
        for (i, &expected) in [0.2, 0.3, 0.5].iter().enumerate() {
            let freq = counts[i] as f64 / draws as f64;
            assert!(
                (freq - expected).abs() < 0.005,
                "node {i}: freq {freq} vs {expected}"
            );
        }
    }

    #[test]
    fn committee_clamps_to_available_candidates() {
        let nodes = make_nodes(&[1.0, 2.0]);
        let committee = select_validators(&nodes, NodeId(0), 3, &mut stream(5)).unwrap();
        assert_eq!(committee, vec![NodeId(1)]);
    }

    #[test]
    fn committee_excludes_creator_and_has_no_duplicates() {
        let nodes = make_nodes(&[1.0, 5.0, 2.0, 9.0, 4.0]);
        let mut rng = stream(6);
        for _ in 0..500 {
            let committee = select_validators(&nodes, NodeId(3), 3, &mut rng).unwrap();
            assert_eq!(committee.len(), 3);
            assert!(!committee.contains(&NodeId(3)));
            let mut unique = committee.clone();
            unique.sort();
            unique.dedup();
            assert_eq!(unique.len(), committee.len());
        }
    }

    #[test]
    fn committee_draw_renormalizes_after_exclusion() {
        // Creator holds nearly all power; remaining nodes are symmetric.
        let nodes = make_nodes(&[1.0, 1.0, 1.0, 97.0]);
        let mut rng = stream(7);
        let draws = 100_000usize;
        let mut counts = [0usize; 3];
        for _ in 0..draws {
            let committee = select_validators(&nodes, NodeId(3), 1, &mut rng).unwrap();
            counts[committee[0].0 as usize] += 1;
        }
        for (i, &c) in counts.iter().enumerate() {
            let freq = c as f64 / draws as f64;
            assert!(
                (freq - 1.0 / 3.0).abs() < 0.01,
                "node {i}: freq {freq} vs 1/3"
            );
        }
    }

    #[test]
    fn committee_input_validation() {
        let nodes = make_nodes(&[1.0, 2.0, 3.0]);
        assert!(select_validators(&nodes, NodeId(0), 0, &mut stream(0)).is_err());
        let lone = make_nodes(&[1.0]);
        assert!(select_validators(&lone, NodeId(0), 1, &mut stream(0)).is_err());
    }

    #[test]
    fn lottery_gap_certain_success_is_zero() {
        let cfg = LotteryConfig {
            enabled: true,
            nb_successes: 1,
            nb_success_prob: 1.0,
            ..LotteryConfig::disabled()
        };
        let mut rng = stream(8);
        for _ in 0..100 {
            assert_eq!(draw_lottery_gap(&cfg, &mut rng).unwrap(), 0);
        }
    }

    #[test]
    fn lottery_gap_mean_matches_negative_binomial() {
        // E[K] = r (1 - p) / p, checked to 2% relative over 1e5 draws.
        for &(r, p, expected) in &[(1u32, 0.5, 1.0), (3, 0.25, 9.0)] {
            let cfg = LotteryConfig {
                enabled: true,
                nb_successes: r,
                nb_success_prob: p,
                ..LotteryConfig::disabled()
            };
            let mut rng = stream(9_000 + r as u64);
            let draws = 100_000usize;
            let total: u64 = (0..draws)
                .map(|_| draw_lottery_gap(&cfg, &mut rng).unwrap())
                .sum();
            let mean = total as f64 / draws as f64;
            assert!(
                (mean - expected).abs() / expected < 0.02,
                "r={r} p={p}: mean {mean} vs {expected}"
            );
        }
    }

    #[test]
    fn lottery_gap_rejects_bad_probability() {
        let mut cfg = LotteryConfig::disabled();
        cfg.enabled = true;
        cfg.nb_success_prob = 0.0;
        assert!(draw_lottery_gap(&cfg, &mut stream(0)).is_err());
        cfg.nb_success_prob = 1.5;
        assert!(draw_lottery_gap(&cfg, &mut stream(0)).is_err());
    }

    #[test]
    fn low_power_set_uses_nearest_rank_quantile_with_ties() {
        // Median of [1, 1, 5, 9]: rank ceil(0.5 * 4) = 2 -> threshold 1.
        assert_eq!(low_power_indices(&[1.0, 1.0, 5.0, 9.0], 0.5), vec![0, 1]);
        // Ties at the threshold are all included.
        assert_eq!(
            low_power_indices(&[2.0, 2.0, 2.0, 9.0], 0.5),
            vec![0, 1, 2]
        );
        assert_eq!(low_power_indices(&[4.0], 0.5), vec![0]);
    }

    #[test]
    fn next_creator_disabled_is_plain_selection() {
        let nodes = make_nodes(&[1.0, 2.0, 7.0]);
        let creation = creation_chance(&[1.0, 2.0, 7.0]).unwrap();
        let w = combined_chance(&creation, &[0.5; 3], 1.0).unwrap();
        let cfg = LotteryConfig::disabled();

        let mut rng_a = stream(77);
        let mut rng_b = stream(77);
        let mut state = LotteryState::initial(&cfg, &mut rng_a).unwrap();
        for _ in 0..200 {
            let (idx, is_lottery) =
                next_creator(&w, &nodes, &cfg, &mut state, &mut rng_a).unwrap();
            assert!(!is_lottery);
            assert_eq!(idx, select_creator(&w, &mut rng_b).unwrap());
        }
    }

    #[test]
    fn next_creator_forced_lottery_choice() {
        // Only node 2 is low-power (quantile keeps the bottom third).
        let nodes = make_nodes(&[10.0, 20.0, 1.0]);
        let creation = creation_chance(&[10.0, 20.0, 1.0]).unwrap();
        let w = combined_chance(&creation, &[0.5; 3], 0.5).unwrap();
        let cfg = LotteryConfig {
            enabled: true,
            low_power_quantile: 0.2,
            nb_successes: 1,
            nb_success_prob: 0.5,
            uniform_low_power: false,
        };
        let mut rng = stream(13);
        let mut state = LotteryState {
            failures_remaining: 0,
        };
        let (idx, is_lottery) = next_creator(&w, &nodes, &cfg, &mut state, &mut rng).unwrap();
        assert_eq!(idx, 2);
        assert!(is_lottery);
    }

    #[test]
    fn lottery_long_run_share_matches_renewal_rate() {
        // r=1, p=0.5: lottery share = 1 / (1 + E[K]) = 0.5, +/- 10% relative.
        let nodes = make_nodes(&[1.0, 2.0, 3.0, 40.0]);
        let powers: Vec<f64> = nodes.iter().map(|n| n.power).collect();
        let creation = creation_chance(&powers).unwrap();
        let w = combined_chance(&creation, &[0.5; 4], 0.5).unwrap();
        let cfg = LotteryConfig {
            enabled: true,
            low_power_quantile: 0.5,
            nb_successes: 1,
            nb_success_prob: 0.5,
            uniform_low_power: false,
        };
        let mut rng = stream(14);
        let mut state = LotteryState::initial(&cfg, &mut rng).unwrap();
        let blocks = 100_000usize;
        let mut lottery_blocks = 0usize;
        for _ in 0..blocks {
            let (_, is_lottery) = next_creator(&w, &nodes, &cfg, &mut state, &mut rng).unwrap();
            if is_lottery {
                lottery_blocks += 1;
            }
        }
        let share = lottery_blocks as f64 / blocks as f64;
        assert!(
            (share - 0.5).abs() / 0.5 < 0.10,
            "lottery share {share} vs 0.5"
        );
    }

    #[test]
    fn sybil_split_is_creation_invariant_and_raw_mass_increasing() {
        // Splitting one node of power P into k identities of power P/k:
        // total creation chance is unchanged; with alpha < 1 and fresh trust
        // 0.5, the coalition's raw election mass strictly grows with k.
        let others = [4.0, 6.0];
        let target_power = 10.0;
        let base_creation = creation_chance(&[4.0, 6.0, 10.0]).unwrap();
        let base_coalition_creation = base_creation[2];

        let alpha = 0.5;
        let base_w = combined_chance(&base_creation, &[0.5; 3], alpha).unwrap();
        let mut previous_raw_mass = base_w.combined_raw[2];

        for k in 2..=6usize {
            let mut powers: Vec<f64> = others.to_vec();
            powers.extend(std::iter::repeat_n(target_power / k as f64, k));
            let creation = creation_chance(&powers).unwrap();

            let coalition_creation: f64 = creation[2..].iter().sum();
            assert_abs_diff_eq!(coalition_creation, base_coalition_creation, epsilon = 1e-12);

            let trust = vec![0.5; powers.len()];
            let w = combined_chance(&creation, &trust, alpha).unwrap();
            let raw_mass: f64 = w.combined_raw[2..].iter().sum();
            assert!(
                raw_mass > previous_raw_mass,
                "raw mass must grow with k: {raw_mass} <= {previous_raw_mass} at k={k}"
            );
            previous_raw_mass = raw_mass;
        }
    }

    proptest! {
        #[test]
        fn creation_chance_sums_to_one_and_preserves_order(
            powers in proptest::collection::vec(0.01..1e6f64, 1..40)
        ) {
            let c = creation_chance(&powers).unwrap();
            let sum: f64 = c.iter().sum();
            prop_assert!((sum - 1.0).abs() <= 1e-9);
            for i in 0..powers.len() {
                for j in 0..powers.len() {
                    if powers[i] < powers[j] {
                        prop_assert!(c[i] < c[j] + 1e-15);
                    }
                }
            }
        }

        #[test]
        fn increasing_power_never_decreases_election_entry(
            powers in proptest::collection::vec(0.1..100.0f64, 2..10),
            trust in proptest::collection::vec(0.01..0.99f64, 10),
            alpha in 0.01..=1.0f64,
            bump in 0.1..50.0f64,
        ) {
            let n = powers.len();
            let trust = &trust[..n];
            let before = combined_chance(&creation_chance(&powers).unwrap(), trust, alpha).unwrap();
            let mut bumped = powers.clone();
            bumped[0] += bump;
            let after = combined_chance(&creation_chance(&bumped).unwrap(), trust, alpha).unwrap();
            prop_assert!(after.distribution[0] >= before.distribution[0] - 1e-12);
        }
    }
}
