//! Trust-score state and closed-form update rules.
//!
//! A node's trustworthiness is modeled as a Beta-Bernoulli posterior over its
//! probability of validating correctly: `a` and `b` prior pseudo-counts plus
//! observed correct/incorrect validation counts. The point score is the
//! posterior mean `(N + a) / (N + M + a + b)`, which with the Jeffreys prior
//! `a = b = 0.5` reduces to the smoothed counting rule `(N + 0.5)/(N + M + 1)`.
//!
//! Counts are reals, not integers: confidence weighting adds fractional
//! pseudo-counts, and the decayed-counts mechanism shrinks old ones.
//!
//! Two mutually exclusive time-decay mechanisms are provided:
//! - `Ema`: an exponential moving average over raw behavior,
//!   `T(t) = lambda * T(t-1) + (1 - lambda) * B(t)`;
//! - `DecayedCounts`: exponentially down-weighted pseudo-counts feeding the
//!   Beta update, so the Bayesian form is preserved while old evidence fades.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Beta prior over a node's probability of validating correctly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaPrior {
    /// Prior pseudo-count of correct validations. Must be > 0.
    pub a: f64,
    /// Prior pseudo-count of incorrect validations. Must be > 0.
    pub b: f64,
}

impl BetaPrior {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::param("prior.a", format!("must be > 0 (got {a})")));
        }
        if !(b.is_finite() && b > 0.0) {
            return Err(Error::param("prior.b", format!("must be > 0 (got {b})")));
        }
        Ok(BetaPrior { a, b })
    }

    /// Jeffreys prior Beta(0.5, 0.5): the default. Makes the Beta posterior
    /// mean coincide with the smoothed counting rule `(N + 0.5)/(N + M + 1)`.
    pub fn jeffreys() -> Self {
        BetaPrior { a: 0.5, b: 0.5 }
    }

    /// Prior mean `a / (a + b)` — the trust score before any evidence.
    pub fn mean(&self) -> f64 {
        self.a / (self.a + self.b)
    }
}

impl Default for BetaPrior {
    fn default() -> Self {
        BetaPrior::jeffreys()
    }
}

/// Which time-decay mechanism a run uses. The mechanisms are alternatives,
/// not layers; a run picks exactly one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayMode {
    /// Plain cumulative counting; lambda and gamma are inert.
    None,
    /// Exponential moving average over behavior bits.
    Ema,
    /// Exponentially decayed pseudo-counts feeding the Beta update.
    DecayedCounts,
}

/// Decay configuration.
///
/// `lambda` is the per-round retention factor used by both decay mechanisms.
/// `gamma` is the blend weight for one-shot old-vs-new score blending via
/// [`decay_blend`]; it is carried in the config for callers that blend a
/// previous score with a freshly computed one, and is inert inside the
/// round-by-round simulator (which uses `lambda`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayParams {
    pub mode: DecayMode,
    pub lambda: f64,
    pub gamma: f64,
}

impl DecayParams {
    pub fn none() -> Self {
        DecayParams {
            mode: DecayMode::None,
            lambda: 1.0,
            gamma: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda.is_finite() && (0.0..=1.0).contains(&self.lambda)) {
            return Err(Error::param(
                "decay.lambda",
                format!("must lie in [0, 1] (got {})", self.lambda),
            ));
        }
        if !(self.gamma.is_finite() && (0.0..=1.0).contains(&self.gamma)) {
            return Err(Error::param(
                "decay.gamma",
                format!("must lie in [0, 1] (got {})", self.gamma),
            ));
        }
        Ok(())
    }
}

impl Default for DecayParams {
    fn default() -> Self {
        DecayParams::none()
    }
}

/// One observed validation outcome.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidationRecord {
    /// Round index at which the validation happened.
    pub round: u64,
    /// Whether the validation was credited as correct.
    pub correct: bool,
    /// Decision confidence in [0, 1]; 1.0 when unreported.
    pub confidence: f64,
}

impl ValidationRecord {
    pub fn new(round: u64, correct: bool, confidence: f64) -> Result<Self> {
        if !(confidence.is_finite() && (0.0..=1.0).contains(&confidence)) {
            return Err(Error::param(
                "confidence",
                format!("must lie in [0, 1] (got {confidence})"),
            ));
        }
        Ok(ValidationRecord {
            round,
            correct,
            confidence,
        })
    }
}

/// A node's trust state: accumulated pseudo-counts plus the prior, and the
/// running EMA value when the run uses EMA decay.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrustState {
    /// Accumulated correct-validation weight (N). Fractional under confidence
    /// weighting or decayed counts.
    pub n_correct: f64,
    /// Accumulated incorrect-validation weight (M).
    pub m_incorrect: f64,
    pub prior: BetaPrior,
    /// Running EMA trust; engaged only when the decay mode is `Ema`.
    pub ema_value: Option<f64>,
}

impl TrustState {
    /// Fresh state: no observations, trust at the prior mean.
    pub fn new(prior: BetaPrior) -> Self {
        TrustState {
            n_correct: 0.0,
            m_incorrect: 0.0,
            prior,
            ema_value: None,
        }
    }

    pub fn with_counts(n_correct: f64, m_incorrect: f64, prior: BetaPrior) -> Result<Self> {
        if !(n_correct.is_finite() && n_correct >= 0.0) {
            return Err(Error::param(
                "n_correct",
                format!("must be >= 0 (got {n_correct})"),
            ));
        }
        if !(m_incorrect.is_finite() && m_incorrect >= 0.0) {
            return Err(Error::param(
                "m_incorrect",
                format!("must be >= 0 (got {m_incorrect})"),
            ));
        }
        Ok(TrustState {
            n_correct,
            m_incorrect,
            prior,
            ema_value: None,
        })
    }

    /// Posterior-mean trust score `(N + a) / (N + M + a + b)`.
    ///
    /// Strictly inside (0, 1) for every reachable state because a, b > 0.
    pub fn trust_value(&self) -> f64 {
        (self.n_correct + self.prior.a)
            / (self.n_correct + self.m_incorrect + self.prior.a + self.prior.b)
    }

    /// Returns the state after absorbing one validation outcome: the record's
    /// confidence is added to the correct or incorrect count.
    pub fn record_outcome(&self, rec: &ValidationRecord) -> TrustState {
        let mut next = *self;
        if rec.correct {
            next.n_correct += rec.confidence;
        } else {
            next.m_incorrect += rec.confidence;
        }
        next
    }

    /// Shrinks both counts by `lambda`, aging all past evidence one round.
    /// Applying this every round and then adding fresh records reproduces
    /// [`decayed_counts`] incrementally.
    pub fn decay_counts(&mut self, lambda: f64) {
        self.n_correct *= lambda;
        self.m_incorrect *= lambda;
    }

    /// Updates the running EMA with a new behavior value in [0, 1].
    /// Starts from the prior mean on first use.
    pub fn update_ema(&mut self, behavior: f64, lambda: f64) {
        let current = self.ema_value.unwrap_or_else(|| self.prior.mean());
        self.ema_value = Some(decay_blend(current, behavior, lambda));
    }

    /// The trust value a given decay mode reports for this state.
    pub fn effective_trust(&self, mode: DecayMode) -> f64 {
        match mode {
            DecayMode::Ema => self.ema_value.unwrap_or_else(|| self.prior.mean()),
            DecayMode::None | DecayMode::DecayedCounts => self.trust_value(),
        }
    }
}

/// Blends an old score with a new one: `weight * old + (1 - weight) * new`.
///
/// With the new value being a raw behavior bit and the weight being the
/// retention factor, iterating this is exactly the exponential moving
/// average `T(t) = lambda * T(t-1) + (1 - lambda) * B(t)`. The result is
/// clamped to [0, 1] to absorb floating-point drift in long iterations.
pub fn decay_blend(old_value: f64, new_value: f64, weight: f64) -> f64 {
    (weight * old_value + (1.0 - weight) * new_value).clamp(0.0, 1.0)
}

/// Exponentially decayed pseudo-counts over a validation history.
///
/// A record at round `r` contributes `confidence * lambda^(now - r)` to the
/// correct or incorrect total. Feeding the result into the Beta posterior
/// mean gives the time-decayed Bayesian trust score. With `lambda = 1` this
/// is plain counting; with `lambda = 0` only records at `now` survive.
///
/// Records must not be in the future (`round <= now`).
pub fn decayed_counts(history: &[ValidationRecord], lambda: f64, now: u64) -> (f64, f64) {
    let mut n_eff = 0.0;
    let mut m_eff = 0.0;
    for rec in history {
        debug_assert!(rec.round <= now, "record from the future");
        let age = (now - rec.round) as f64;
        // 0^0 = 1: a record at `now` always carries full weight.
        let w = if age == 0.0 { 1.0 } else { lambda.powf(age) };
        if rec.correct {
            n_eff += rec.confidence * w;
        } else {
            m_eff += rec.confidence * w;
        }
    }
    (n_eff, m_eff)
}
