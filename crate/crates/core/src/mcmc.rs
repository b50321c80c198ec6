//! Posterior sampling for trust scores.
//!
//! Three samplers:
//! - [`mh_trust_chain`]: random-walk Metropolis-Hastings directly in trust
//!   space, targeting the Beta-Bernoulli posterior over a node's probability
//!   of validating correctly. The target's mean is exactly the closed-form
//!   counting score, which ties the sampler to an analytic oracle.
//! - [`mh_gaussian_chain`]: joint random-walk Metropolis-Hastings over
//!   `(mu, log sigma)` for the Gaussian observation model, flat priors on
//!   `mu` and `log sigma`. Proposals are symmetric Gaussian steps, so the
//!   proposal-density ratio in the acceptance formula is 1; the acceptance
//!   still evaluates the full ratio shape so asymmetric proposals can be
//!   added without touching the accept/reject logic.
//! - [`gibbs_gaussian_chain`]: Gibbs sampling under a conjugate
//!   Normal-Inverse-Gamma model, alternating exact conditional draws for
//!   `mu | sigma^2` and `sigma^2 | mu`.
//!
//! Chains are deterministic given their seed. Burn-in samples are discarded
//! and the remainder thinned; diagnostics carry the proposal acceptance rate
//! and, when computed across chains, the split-Rhat statistic.

use rand::Rng;
use rand_distr::{Distribution, Gamma, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, SimRng};
use crate::trust::BetaPrior;

/// Sampler run-length and proposal configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainConfig {
    /// Total iterations, including burn-in.
    pub steps: usize,
    /// Iterations discarded from the front.
    pub burn_in: usize,
    /// Keep every `thin`-th post-burn-in sample.
    pub thin: usize,
    /// Standard deviation of the Gaussian random-walk proposal.
    pub proposal_std: f64,
    pub seed: u64,
}

impl ChainConfig {
    pub fn new(steps: usize, burn_in: usize, thin: usize, proposal_std: f64, seed: u64) -> Result<Self> {
        let cfg = ChainConfig {
            steps,
            burn_in,
            thin,
            proposal_std,
            seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps <= self.burn_in {
            return Err(Error::param(
                "steps",
                format!(
                    "must exceed burn_in (steps = {}, burn_in = {})",
                    self.steps, self.burn_in
                ),
            ));
        }
        if self.thin == 0 {
            return Err(Error::param("thin", "must be >= 1 (got 0)"));
        }
        if !(self.proposal_std.is_finite() && self.proposal_std > 0.0) {
            return Err(Error::param(
                "proposal_std",
                format!("must be > 0 (got {})", self.proposal_std),
            ));
        }
        Ok(())
    }

    /// Number of samples a run retains: floor((steps - burn_in) / thin).
    pub fn retained(&self) -> usize {
        (self.steps - self.burn_in) / self.thin
    }
}

/// Conjugate Normal-Inverse-Gamma hyperparameters for the Gaussian trust model:
/// `sigma^2 ~ InvGamma(alpha0, beta0)`, `mu | sigma^2 ~ N(mu0, sigma^2 / kappa0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianModel {
    pub mu0: f64,
    /// Prior pseudo-observation count for the mean.
    pub kappa0: f64,
    pub alpha0: f64,
    pub beta0: f64,
}

impl GaussianModel {
    pub fn new(mu0: f64, kappa0: f64, alpha0: f64, beta0: f64) -> Result<Self> {
        let model = GaussianModel {
            mu0,
            kappa0,
            alpha0,
            beta0,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.mu0.is_finite() {
            return Err(Error::param("mu0", format!("must be finite (got {})", self.mu0)));
        }
        for (name, v) in [
            ("kappa0", self.kappa0),
            ("alpha0", self.alpha0),
            ("beta0", self.beta0),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::param(name, format!("must be > 0 (got {v})")));
            }
        }
        Ok(())
    }
}

impl Default for GaussianModel {
    /// Weakly informative default centered on a neutral trust score:
    /// mu0 = 0.5, kappa0 = 1, sigma^2 ~ InvGamma(2, 0.05) (prior mean 0.05).
    fn default() -> Self {
        GaussianModel {
            mu0: 0.5,
            kappa0: 1.0,
            alpha0: 2.0,
            beta0: 0.05,
        }
    }
}

/// Retained draws: scalar trust values, or `(mu, sigma^2)` pairs for the
/// Gaussian-model chains.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ChainSamples {
    Scalar(Vec<f64>),
    Pairs(Vec<(f64, f64)>),
}

impl ChainSamples {
    pub fn len(&self) -> usize {
        match self {
            ChainSamples::Scalar(v) => v.len(),
            ChainSamples::Pairs(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// First coordinate of every sample: the trust value for scalar chains,
    /// `mu` for Gaussian chains.
    pub fn first_coordinate(&self) -> Vec<f64> {
        match self {
            ChainSamples::Scalar(v) => v.clone(),
            ChainSamples::Pairs(v) => v.iter().map(|&(mu, _)| mu).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainDiagnostics {
    /// Fraction of proposals accepted over the whole run (burn-in included).
    pub acceptance_rate: f64,
    /// Split-Rhat, when computed across multiple chains.
    pub rhat: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chain {
    pub samples: ChainSamples,
    pub diagnostics: ChainDiagnostics,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PosteriorSummary {
    pub mean: f64,
    pub median: f64,
    pub std: f64,
}

/// Decides whether one post-burn-in step's state is retained.
fn keep_sample(step: usize, cfg: &ChainConfig) -> bool {
    step > cfg.burn_in && (step - cfg.burn_in).is_multiple_of(cfg.thin)
}

/// Metropolis acceptance test on log densities. `log_q_ratio` is the log of
/// Q(current | candidate) / Q(candidate | current); zero for the symmetric
/// random-walk proposals used here.
fn metropolis_accept(rng: &mut SimRng, log_target_delta: f64, log_q_ratio: f64) -> bool {
    let log_alpha = (log_target_delta + log_q_ratio).min(0.0);
    if log_alpha == 0.0 {
        return true;
    }
    let u: f64 = rng.random();
    u.ln() < log_alpha
}

/// Random-walk Metropolis-Hastings over the trust score itself.
///
/// Target density on (0, 1), up to a constant:
/// `T^(N + a - 1) * (1 - T)^(M + b - 1)` — the Beta-Bernoulli posterior for
/// `n_correct` correct and `m_incorrect` incorrect validations under a
/// Beta(a, b) prior. Proposals falling outside (0, 1) have zero target
/// density and are rejected. The chain starts at the prior mean.
pub fn mh_trust_chain(
    n_correct: f64,
    m_incorrect: f64,
    prior: BetaPrior,
    cfg: &ChainConfig,
) -> Result<Chain> {
    cfg.validate()?;
    for (name, v) in [("n_correct", n_correct), ("m_incorrect", m_incorrect)] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(Error::param(name, format!("must be >= 0 (got {v})")));
        }
    }

    let exp_n = n_correct + prior.a - 1.0;
    let exp_m = m_incorrect + prior.b - 1.0;
    let log_target = |t: f64| exp_n * t.ln() + exp_m * (1.0 - t).ln();

    let mut rng = rng::stream(cfg.seed);
    let proposal = Normal::new(0.0, cfg.proposal_std).expect("validated proposal std");

    let mut current = prior.mean();
    let mut current_lp = log_target(current);
    let mut accepted = 0usize;
    let mut samples = Vec::with_capacity(cfg.retained());

    for step in 1..=cfg.steps {
        let candidate = current + proposal.sample(&mut rng);
        if candidate > 0.0 && candidate < 1.0 {
            let candidate_lp = log_target(candidate);
            if metropolis_accept(&mut rng, candidate_lp - current_lp, 0.0) {
                current = candidate;
                current_lp = candidate_lp;
                accepted += 1;
            }
        }
        // out-of-support candidates are plain rejections
        if keep_sample(step, cfg) {
            samples.push(current);
        }
    }

    Ok(Chain {
        samples: ChainSamples::Scalar(samples),
        diagnostics: ChainDiagnostics {
            acceptance_rate: accepted as f64 / cfg.steps as f64,
            rhat: None,
        },
    })
}

fn mean_of(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn sample_variance(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let m = mean_of(values);
    values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (values.len() - 1) as f64
}

/// Joint random-walk Metropolis-Hastings over `(mu, log sigma)` for Gaussian
/// observations with flat priors on `mu` and `log sigma`.
///
/// Needs at least two observations with nonzero sample variance; the chain
/// starts at the sample mean and sample standard deviation. Samples are
/// stored as `(mu, sigma^2)` pairs.
pub fn mh_gaussian_chain(observations: &[f64], cfg: &ChainConfig) -> Result<Chain> {
    cfg.validate()?;
    if observations.len() < 2 {
        return Err(Error::DegenerateLikelihood(format!(
            "need at least 2 observations (got {})",
            observations.len()
        )));
    }
    let var = sample_variance(observations);
    if var <= 0.0 || observations.iter().all(|&y| y == observations[0]) {
        return Err(Error::DegenerateLikelihood(
            "observations have zero sample variance".into(),
        ));
    }

    let n = observations.len() as f64;
    // log target over (mu, log sigma): -n*log(sigma) - sum((y - mu)^2) / (2 sigma^2)
    let log_target = |mu: f64, log_sigma: f64| {
        let sigma2 = (2.0 * log_sigma).exp();
        let ss: f64 = observations.iter().map(|y| (y - mu) * (y - mu)).sum();
        -n * log_sigma - ss / (2.0 * sigma2)
    };

    let mut rng = rng::stream(cfg.seed);
    let proposal = Normal::new(0.0, cfg.proposal_std).expect("validated proposal std");

    let mut mu = mean_of(observations);
    let mut log_sigma = var.sqrt().ln();
    let mut current_lp = log_target(mu, log_sigma);
    let mut accepted = 0usize;
    let mut samples = Vec::with_capacity(cfg.retained());

    for step in 1..=cfg.steps {
        let mu_cand = mu + proposal.sample(&mut rng);
        let log_sigma_cand = log_sigma + proposal.sample(&mut rng);
        let cand_lp = log_target(mu_cand, log_sigma_cand);
        if metropolis_accept(&mut rng, cand_lp - current_lp, 0.0) {
            mu = mu_cand;
            log_sigma = log_sigma_cand;
            current_lp = cand_lp;
            accepted += 1;
        }
        if keep_sample(step, cfg) {
            samples.push((mu, (2.0 * log_sigma).exp()));
        }
    }

    Ok(Chain {
        samples: ChainSamples::Pairs(samples),
        diagnostics: ChainDiagnostics {
            acceptance_rate: accepted as f64 / cfg.steps as f64,
            rhat: None,
        },
    })
}

/// Gibbs sampler for the conjugate Normal-Inverse-Gamma trust model.
///
/// Alternates exact conditional draws:
/// - `mu | sigma^2, y ~ N((kappa0*mu0 + n*ybar)/(kappa0 + n), sigma^2/(kappa0 + n))`
/// - `sigma^2 | mu, y ~ InvGamma(alpha0 + (n+1)/2,
///    beta0 + (sum((y - mu)^2) + kappa0*(mu - mu0)^2) / 2)`
///
/// With no observations the chain samples the prior. Every draw is exact,
/// so the recorded acceptance rate is 1.
pub fn gibbs_gaussian_chain(
    observations: &[f64],
    hyper: &GaussianModel,
    cfg: &ChainConfig,
) -> Result<Chain> {
    cfg.validate()?;
    hyper.validate()?;

    let n = observations.len() as f64;
    let ybar = if observations.is_empty() {
        0.0
    } else {
        mean_of(observations)
    };
    let mu_cond_mean = (hyper.kappa0 * hyper.mu0 + n * ybar) / (hyper.kappa0 + n);
    let mu_cond_scale_sq = 1.0 / (hyper.kappa0 + n);
    let shape = hyper.alpha0 + (n + 1.0) / 2.0;

    let mut rng = rng::stream(cfg.seed);

    // Deterministic start. Only sigma^2 needs one: mu is drawn first from
    // its conditional given sigma^2 each iteration.
    let init_var = sample_variance(observations);
    let mut sigma2 = if init_var > 0.0 {
        init_var
    } else {
        hyper.beta0 / (hyper.alpha0 + 1.0) // prior mode, defined for all alpha0 > 0
    };

    let mut samples = Vec::with_capacity(cfg.retained());
    for step in 1..=cfg.steps {
        let mu_std = (sigma2 * mu_cond_scale_sq).sqrt();
        let mu = Normal::new(mu_cond_mean, mu_std)
            .expect("finite conditional parameters")
            .sample(&mut rng);

        let ss: f64 = observations.iter().map(|y| (y - mu) * (y - mu)).sum();
        let rate = hyper.beta0 + (ss + hyper.kappa0 * (mu - hyper.mu0) * (mu - hyper.mu0)) / 2.0;
        // InvGamma(shape, rate) draw via 1 / Gamma(shape, scale = 1/rate)
        let g = Gamma::new(shape, 1.0 / rate)
            .expect("positive shape and scale")
            .sample(&mut rng);
        sigma2 = 1.0 / g;

        if keep_sample(step, cfg) {
            samples.push((mu, sigma2));
        }
    }

    Ok(Chain {
        samples: ChainSamples::Pairs(samples),
        diagnostics: ChainDiagnostics {
            acceptance_rate: 1.0,
            rhat: None,
        },
    })
}

/// Mean, median (midpoint convention for even counts), and sample standard
/// deviation of a chain's retained draws. Multivariate chains are summarized
/// on their first coordinate.
pub fn summarize(chain: &Chain) -> Result<PosteriorSummary> {
    let values = chain.samples.first_coordinate();
    if values.is_empty() {
        return Err(Error::Empty("chain has no retained samples"));
    }
    let mean = mean_of(&values);
    let std = sample_variance(&values).sqrt();

    let mut sorted = values;
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("no NaN in chain"));
    let mid = sorted.len() / 2;
    let median = if sorted.len().is_multiple_of(2) {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    } else {
        sorted[mid]
    };

    Ok(PosteriorSummary { mean, median, std })
}

/// Split-Rhat potential-scale-reduction statistic over the chains' first
/// coordinate. Each chain is split in half (middle draw dropped when odd)
/// and the usual between/within variance ratio is computed over the halves.
/// Well-mixed chains give values near 1.
pub fn split_rhat(chains: &[Chain]) -> Result<f64> {
    if chains.len() < 2 {
        return Err(Error::param(
            "chains",
            format!("need at least 2 chains (got {})", chains.len()),
        ));
    }
    let len = chains[0].samples.len();
    if chains.iter().any(|c| c.samples.len() != len) {
        return Err(Error::param("chains", "chains must have equal retained lengths"));
    }
    if len < 4 {
        return Err(Error::param(
            "chains",
            format!("retained length must be >= 4 (got {len})"),
        ));
    }

    let half = len / 2;
    let mut halves: Vec<Vec<f64>> = Vec::with_capacity(chains.len() * 2);
    for chain in chains {
        let values = chain.samples.first_coordinate();
        halves.push(values[..half].to_vec());
        halves.push(values[len - half..].to_vec());
    }

    let n = half as f64;
    let means: Vec<f64> = halves.iter().map(|h| mean_of(h)).collect();
    let within = mean_of(&halves.iter().map(|h| sample_variance(h)).collect::<Vec<_>>());
    let between_over_n = sample_variance(&means);

    if within == 0.0 {
        // Constant chains: identical constants are trivially converged,
        // distinct constants have infinite scale reduction.
        return Ok(if between_over_n == 0.0 { 1.0 } else { f64::INFINITY });
    }
    let var_plus = (n - 1.0) / n * within + between_over_n;
    Ok((var_plus / within).sqrt())
}
