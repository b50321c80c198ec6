//! Trust estimation from a recorded validation history.
//!
//! Three estimators over the same history file:
//! - `counting`: the closed-form Beta posterior mean, optionally with
//!   decayed counts; the reported summary carries the analytic posterior
//!   standard deviation (the point estimate doubles as mean and median).
//! - `mh`: the trust-space Metropolis-Hastings chain over the same counts;
//!   its posterior mean agrees with `counting` up to Monte-Carlo error.
//! - `gibbs`: windowed empirical correctness fractions fed to the
//!   Normal-Inverse-Gamma Gibbs sampler. Binary outcomes have no Gaussian
//!   likelihood, so per-window fractions stand in as the continuous
//!   observations; the reported trust is the posterior mean of mu clamped
//!   to [0, 1].
//!
//! History files are CSV rows `round,correct[,confidence]` with an optional
//! header; `correct` accepts true/false/1/0 and confidence defaults to 1.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mcmc::{
    gibbs_gaussian_chain, mh_trust_chain, summarize, Chain, ChainConfig, GaussianModel,
    PosteriorSummary,
};
use crate::trust::{decayed_counts, BetaPrior, TrustState, ValidationRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateMethod {
    Counting,
    Mh,
    Gibbs,
}

impl std::str::FromStr for EstimateMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "counting" => Ok(EstimateMethod::Counting),
            "mh" => Ok(EstimateMethod::Mh),
            "gibbs" => Ok(EstimateMethod::Gibbs),
            _ => Err(Error::param(
                "method",
                format!("expected counting, mh or gibbs (got '{s}')"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateOptions {
    pub prior: BetaPrior,
    pub chain: ChainConfig,
    /// Round span of one correctness-fraction window (gibbs method).
    pub window: u64,
    /// When set, the counting method uses decayed counts with this retention.
    pub lambda: Option<f64>,
    pub hyper: GaussianModel,
}

impl Default for EstimateOptions {
    /// 55k steps with the standard 10% burn-in, Jeffreys prior, 10-round
    /// windows.
    fn default() -> Self {
        EstimateOptions {
            prior: BetaPrior::jeffreys(),
            chain: ChainConfig {
                steps: 55_000,
                burn_in: 5_500,
                thin: 1,
                proposal_std: 0.1,
                seed: 0,
            },
            window: 10,
            lambda: None,
            hyper: GaussianModel::default(),
        }
    }
}

/// An estimator's output: the point trust value, the posterior summary, and
/// the chain when one was run.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub method: EstimateMethod,
    pub trust: f64,
    pub summary: PosteriorSummary,
    pub chain: Option<Chain>,
}

/// Parses history CSV text into validation records.
pub fn parse_history(text: &str) -> Result<Vec<ValidationRecord>> {
    let mut records = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        // Tolerate a standard header row.
        if lineno == 0 && line.to_ascii_lowercase().starts_with("round,") {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() < 2 || fields.len() > 3 {
            return Err(Error::History {
                line: lineno + 1,
                message: format!(
                    "expected 'round,correct[,confidence]' (got {} fields)",
                    fields.len()
                ),
            });
        }
        let round: u64 = fields[0].parse().map_err(|_| Error::History {
            line: lineno + 1,
            message: format!("round must be a non-negative integer (got '{}')", fields[0]),
        })?;
        let correct = match fields[1] {
            "true" | "1" => true,
            "false" | "0" => false,
            other => {
                return Err(Error::History {
                    line: lineno + 1,
                    message: format!("correct must be true/false/1/0 (got '{other}')"),
                })
            }
        };
        let confidence = if fields.len() == 3 {
            fields[2].parse::<f64>().map_err(|_| Error::History {
                line: lineno + 1,
                message: format!("confidence must be a number (got '{}')", fields[2]),
            })?
        } else {
            1.0
        };
        records.push(
            ValidationRecord::new(round, correct, confidence).map_err(|e| Error::History {
                line: lineno + 1,
                message: e.to_string(),
            })?,
        );
    }
    Ok(records)
}

/// Confidence-weighted correctness fraction per round window of width
/// `window`. Windows without any (positive-confidence) record contribute no
/// observation.
pub fn window_fractions(history: &[ValidationRecord], window: u64) -> Vec<f64> {
    if history.is_empty() {
        return Vec::new();
    }
    let last = history.iter().map(|r| r.round).max().expect("non-empty");
    let bins = (last / window + 1) as usize;
    let mut weight = vec![0.0f64; bins];
    let mut correct = vec![0.0f64; bins];
    for rec in history {
        let bin = (rec.round / window) as usize;
        weight[bin] += rec.confidence;
        if rec.correct {
            correct[bin] += rec.confidence;
        }
    }
    weight
        .iter()
        .zip(&correct)
        .filter(|(&w, _)| w > 0.0)
        .map(|(&w, &c)| c / w)
        .collect()
}

fn plain_counts(history: &[ValidationRecord]) -> (f64, f64) {
    let n = history
        .iter()
        .filter(|r| r.correct)
        .map(|r| r.confidence)
        .sum();
    let m = history
        .iter()
        .filter(|r| !r.correct)
        .map(|r| r.confidence)
        .sum();
    (n, m)
}

/// Runs the chosen estimator over a validation history.
pub fn estimate_trust(
    history: &[ValidationRecord],
    method: EstimateMethod,
    opts: &EstimateOptions,
) -> Result<Estimate> {
    match method {
        EstimateMethod::Counting => {
            let (n, m) = match opts.lambda {
                Some(lambda) => {
                    let now = history.iter().map(|r| r.round).max().unwrap_or(0);
                    decayed_counts(history, lambda, now)
                }
                None => plain_counts(history),
            };
            let state = TrustState::with_counts(n, m, opts.prior)?;
            let trust = state.trust_value();
            // Analytic Beta(n + a, m + b) posterior moments.
            let (pa, pb) = (n + opts.prior.a, m + opts.prior.b);
            let total = pa + pb;
            let std = (pa * pb / (total * total * (total + 1.0))).sqrt();
            Ok(Estimate {
                method,
                trust,
                summary: PosteriorSummary {
                    mean: trust,
                    median: trust,
                    std,
                },
                chain: None,
            })
        }
        EstimateMethod::Mh => {
            let (n, m) = plain_counts(history);
            let chain = mh_trust_chain(n, m, opts.prior, &opts.chain)?;
            let summary = summarize(&chain)?;
            Ok(Estimate {
                method,
                trust: summary.mean,
                summary,
                chain: Some(chain),
            })
        }
        EstimateMethod::Gibbs => {
            if history.is_empty() {
                return Err(Error::DegenerateLikelihood(
                    "gibbs needs a non-empty history".into(),
                ));
            }
            let span = history.iter().map(|r| r.round).max().expect("non-empty") + 1;
            if span < opts.window {
                return Err(Error::DegenerateLikelihood(format!(
                    "history spans {span} rounds, fewer than one window of {}",
                    opts.window
                )));
            }
            let fractions = window_fractions(history, opts.window);
            let chain = gibbs_gaussian_chain(&fractions, &opts.hyper, &opts.chain)?;
            let summary = summarize(&chain)?;
            Ok(Estimate {
                method,
                trust: summary.mean.clamp(0.0, 1.0),
                summary,
                chain: Some(chain),
            })
        }
    }
}
