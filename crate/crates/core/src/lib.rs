//! A deterministic, discrete-round simulator and library for a blockchain
//! consensus mechanism in which block creators are elected by a mix of
//! computing power and a Bayesian, time-decaying trust score.
//!
//! The pieces:
//! - [`trust`]: Beta-Bernoulli trust state and closed-form update rules,
//!   confidence weighting, EMA and decayed-count time decay.
//! - [`mcmc`]: posterior sampling for trust scores — trust-space
//!   Metropolis-Hastings, Gaussian-model Metropolis-Hastings and Gibbs
//!   sampling — plus chain summaries and split-Rhat diagnostics.
//! - [`consensus`]: election mechanics — creation chances from power,
//!   trust-mixed election distributions, weighted creator and committee
//!   selection, and a negative-binomial lottery that grants low-power nodes
//!   block slots.
//! - [`sim`]: the round loop — creation, committee voting against a ground
//!   truth model, adjudication, trust updates, rewards, and the Sybil-split
//!   attack scenario.
//! - [`harness`]: config parsing, experiment sweeps, metrics, CSV/JSON
//!   output, and the trust estimators behind the `estimate` CLI command.
//!
//! Everything stochastic draws from an explicitly seeded ChaCha12 stream
//! ([`rng`]); identical configs produce bit-identical results.

pub mod consensus;
pub mod error;
pub mod harness;
pub mod mcmc;
pub mod rng;
pub mod sim;
pub mod trust;

pub use error::{Error, Result};
