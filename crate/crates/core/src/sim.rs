//! Discrete-round protocol simulation.
//!
//! Each round: elect a creator (lottery-aware), draw the block's hidden
//! validity from the creator's behavior, sample a power-weighted committee,
//! let each validator vote (correctly with its own behavior probability),
//! adjudicate by strict majority, credit validators, apply trust decay, and
//! pay the block reward iff the block was accepted.
//!
//! Ground truth is explicit: every node carries an honesty parameter, the
//! probability that it acts or votes correctly. Two crediting modes exist —
//! `Oracle` judges votes against the hidden truth, `Majority` against the
//! committee's adjudicated outcome (which can credit a confident mob and
//! punish a truthful dissenter). A behavior switch instead reuses each
//! node's power as its correctness probability; powers then live in (0, 1].
//!
//! A run is strictly single-threaded and deterministic: one seeded stream,
//! fixed draw order. Identical configs produce identical results.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::consensus::{
    self, LotteryConfig, LotteryState, NodeDescriptor, NodeId, SelectionWeights,
};
use crate::error::{Error, Result};
use crate::rng::{self, SimRng};
use crate::trust::{BetaPrior, DecayMode, DecayParams, TrustState, ValidationRecord};

/// How a validator's correctness is judged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TruthMode {
    /// Against the hidden ground truth.
    Oracle,
    /// Against the committee's adjudicated outcome.
    Majority,
}

/// Where a node's acting-correctly probability comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BehaviorMode {
    /// The per-node honesty parameter.
    IndependentHonesty,
    /// The node's power, which must then lie in (0, 1].
    PowerAsHonesty,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub nodes: Vec<NodeDescriptor>,
    /// Power-vs-trust mix weight in the election distribution.
    pub alpha: f64,
    pub prior: BetaPrior,
    pub decay: DecayParams,
    pub committee_size: usize,
    pub lottery: LotteryConfig,
    pub truth_mode: TruthMode,
    pub behavior_mode: BehaviorMode,
    pub rounds: u64,
    pub block_reward: f64,
    pub seed: u64,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.nodes.len() < 2 {
            return Err(Error::param(
                "nodes",
                format!("need at least 2 nodes (got {})", self.nodes.len()),
            ));
        }
        let mut ids: Vec<NodeId> = self.nodes.iter().map(|n| n.id).collect();
        ids.sort();
        ids.dedup();
        if ids.len() != self.nodes.len() {
            return Err(Error::param("nodes", "node ids must be unique"));
        }
        for n in &self.nodes {
            // Re-validate in case the descriptor was built directly.
            NodeDescriptor::new(n.id, n.power, n.honesty)?;
            if self.behavior_mode == BehaviorMode::PowerAsHonesty && n.power > 1.0 {
                return Err(Error::param(
                    format!("node.{}.power", n.id),
                    format!(
                        "must lie in (0, 1] when behavior_mode = power_as_honesty (got {})",
                        n.power
                    ),
                ));
            }
        }
        if !(self.alpha.is_finite() && (0.0..=1.0).contains(&self.alpha)) {
            return Err(Error::param(
                "alpha",
                format!("must lie in [0, 1] (got {})", self.alpha),
            ));
        }
        BetaPrior::new(self.prior.a, self.prior.b)?;
        self.decay.validate()?;
        if self.committee_size == 0 {
            return Err(Error::param("committee_size", "must be >= 1 (got 0)"));
        }
        self.lottery.validate()?;
        if self.rounds == 0 {
            return Err(Error::param("rounds", "must be >= 1 (got 0)"));
        }
        if !(self.block_reward.is_finite() && self.block_reward > 0.0) {
            return Err(Error::param(
                "block_reward",
                format!("must be > 0 (got {})", self.block_reward),
            ));
        }
        Ok(())
    }

    fn index_of(&self, id: NodeId) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }

    /// Probability that a node acts or votes correctly.
    pub fn correctness_prob(&self, node: &NodeDescriptor) -> f64 {
        match self.behavior_mode {
            BehaviorMode::IndependentHonesty => node.honesty,
            BehaviorMode::PowerAsHonesty => node.power,
        }
    }
}

/// One produced block, its content abstracted to a validity bit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub round: u64,
    pub creator: NodeId,
    pub is_lottery: bool,
    pub ground_truth_valid: bool,
}

/// One validator's vote and how it was judged.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidationEvent {
    pub validator: NodeId,
    /// true = voted "valid".
    pub vote: bool,
    pub matched_truth: bool,
    /// Whether the vote was credited as correct under the run's truth mode.
    pub credited_correct: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundOutcome {
    pub block: Block,
    pub events: Vec<ValidationEvent>,
    pub accepted: bool,
    pub reward_paid: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub outcomes: Vec<RoundOutcome>,
    /// `trust_trajectories[node][round]`: effective trust after the round's
    /// updates, in config node order.
    pub trust_trajectories: Vec<Vec<f64>>,
    /// Cumulative reward per node, in config node order.
    pub rewards: Vec<f64>,
    pub final_states: Vec<TrustState>,
}

/// Mutable per-run state threaded through [`run_round`].
#[derive(Debug, Clone)]
pub struct NetworkState {
    pub trust: Vec<TrustState>,
    pub lottery: LotteryState,
}

impl NetworkState {
    pub fn initial(config: &SimConfig, rng: &mut SimRng) -> Result<Self> {
        Ok(NetworkState {
            trust: vec![TrustState::new(config.prior); config.nodes.len()],
            lottery: LotteryState::initial(&config.lottery, rng)?,
        })
    }
}

/// Strict-majority adjudication: accepted iff "valid" votes outnumber
/// "invalid" votes. Ties reject.
pub fn adjudicate(votes: &[bool]) -> Result<bool> {
    if votes.is_empty() {
        return Err(Error::Empty("votes"));
    }
    let valid = votes.iter().filter(|&&v| v).count();
    Ok(2 * valid > votes.len())
}

/// Executes one protocol round, mutating trust and lottery state.
pub fn run_round(
    config: &SimConfig,
    state: &mut NetworkState,
    round: u64,
    rng: &mut SimRng,
) -> Result<RoundOutcome> {
    // 1. Election weights from current powers and trust values.
    let powers: Vec<f64> = config.nodes.iter().map(|n| n.power).collect();
    let trust: Vec<f64> = state
        .trust
        .iter()
        .map(|t| t.effective_trust(config.decay.mode))
        .collect();
    let creation = consensus::creation_chance(&powers)?;
    let weights: SelectionWeights = consensus::combined_chance(&creation, &trust, config.alpha)?;

    // 2. Creator election, lottery-aware.
    let (creator_idx, is_lottery) =
        consensus::next_creator(&weights, &config.nodes, &config.lottery, &mut state.lottery, rng)?;
    let creator = config.nodes[creator_idx];

    // 3. The block's hidden validity comes from the creator's behavior.
    let ground_truth_valid = rng.random::<f64>() < config.correctness_prob(&creator);
    let block = Block {
        round,
        creator: creator.id,
        is_lottery,
        ground_truth_valid,
    };

    // 4. Committee.
    let committee =
        consensus::select_validators(&config.nodes, creator.id, config.committee_size, rng)?;

    // 5. Votes: correct with the validator's own behavior probability.
    let mut votes = Vec::with_capacity(committee.len());
    for &vid in &committee {
        let node = &config.nodes[config.index_of(vid).expect("committee member exists")];
        let matches = rng.random::<f64>() < config.correctness_prob(node);
        votes.push(if matches {
            ground_truth_valid
        } else {
            !ground_truth_valid
        });
    }

    // 6. Adjudication.
    let accepted = adjudicate(&votes)?;

    // 7. Credit validators and apply decay.
    if config.decay.mode == DecayMode::DecayedCounts {
        // Age every node's evidence one round before this round's records land.
        for t in state.trust.iter_mut() {
            t.decay_counts(config.decay.lambda);
        }
    }
    let mut events = Vec::with_capacity(committee.len());
    for (i, &vid) in committee.iter().enumerate() {
        let vote = votes[i];
        let matched_truth = vote == ground_truth_valid;
        let credited_correct = match config.truth_mode {
            TruthMode::Oracle => matched_truth,
            TruthMode::Majority => vote == accepted,
        };
        let idx = config.index_of(vid).expect("committee member exists");
        let rec = ValidationRecord {
            round,
            correct: credited_correct,
            confidence: 1.0,
        };
        state.trust[idx] = state.trust[idx].record_outcome(&rec);
        if config.decay.mode == DecayMode::Ema {
            state.trust[idx].update_ema(
                if credited_correct { 1.0 } else { 0.0 },
                config.decay.lambda,
            );
        }
        events.push(ValidationEvent {
            validator: vid,
            vote,
            matched_truth,
            credited_correct,
        });
    }

    // 8. Creator reward.
    let reward_paid = if accepted { config.block_reward } else { 0.0 };

    Ok(RoundOutcome {
        block,
        events,
        accepted,
        reward_paid,
    })
}

/// Runs the whole configured simulation from a fresh network state.
pub fn run_simulation(config: &SimConfig) -> Result<SimResult> {
    config.validate()?;
    let n = config.nodes.len();
    let mut rng = rng::stream(config.seed);
    let mut state = NetworkState::initial(config, &mut rng)?;

    let mut outcomes = Vec::with_capacity(config.rounds as usize);
    let mut trust_trajectories = vec![Vec::with_capacity(config.rounds as usize); n];
    let mut rewards = vec![0.0; n];

    for round in 0..config.rounds {
        let outcome = run_round(config, &mut state, round, &mut rng)?;
        let creator_idx = config
            .index_of(outcome.block.creator)
            .expect("creator exists");
        rewards[creator_idx] += outcome.reward_paid;
        for (i, t) in state.trust.iter().enumerate() {
            trust_trajectories[i].push(t.effective_trust(config.decay.mode));
        }
        outcomes.push(outcome);
    }

    Ok(SimResult {
        outcomes,
        trust_trajectories,
        rewards,
        final_states: state.trust,
    })
}

/// A Sybil attack configuration plus the attacker's identity set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SybilScenario {
    pub config: SimConfig,
    /// Ids of the k identities replacing the target node.
    pub coalition: Vec<NodeId>,
}

/// Splits `target` into `k_identities` nodes of power `P/k` with the same
/// honesty, inserted at the target's position. The returned coalition ids
/// are fresh (continuing past the current maximum id). Used to measure the
/// coalition's reward share against the unsplit baseline.
pub fn scenario_sybil_split(
    base: &SimConfig,
    target: NodeId,
    k_identities: u32,
) -> Result<SybilScenario> {
    if k_identities < 2 {
        return Err(Error::param(
            "k_identities",
            format!("must be >= 2 (got {k_identities})"),
        ));
    }
    let pos = base
        .index_of(target)
        .ok_or_else(|| Error::param("target", format!("no node with id {target}")))?;
    let victim = base.nodes[pos];
    let next_id = base.nodes.iter().map(|n| n.id.0).max().unwrap_or(0) + 1;

    let mut coalition = Vec::with_capacity(k_identities as usize);
    let mut identities = Vec::with_capacity(k_identities as usize);
    for j in 0..k_identities {
        let id = NodeId(next_id + j);
        coalition.push(id);
        identities.push(NodeDescriptor::new(
            id,
            victim.power / k_identities as f64,
            victim.honesty,
        )?);
    }

    let mut nodes = base.nodes.clone();
    nodes.splice(pos..=pos, identities);

    let config = SimConfig {
        nodes,
        ..base.clone()
    };
    config.validate()?;
    Ok(SybilScenario { config, coalition })
}
