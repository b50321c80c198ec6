//! Python bindings for the trustsim library: the closed-form trust rules,
//! the MCMC estimators, election mechanics, and whole-simulation runs.
//!
//! Build produces a cdylib; see python/smoke_test.py for usage.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use trustsim::consensus;
use trustsim::harness::config::{parse_config, ParsedConfig};
use trustsim::harness::estimate::{self, EstimateMethod, EstimateOptions};
use trustsim::harness::metrics::{compute_metrics, gini as gini_impl};
use trustsim::mcmc::{
    self, Chain, ChainConfig, ChainDiagnostics, ChainSamples, GaussianModel,
};
use trustsim::sim;
use trustsim::trust::{BetaPrior, TrustState, ValidationRecord};

fn value_err(e: trustsim::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn records_from(records: Vec<(u64, bool, f64)>) -> PyResult<Vec<ValidationRecord>> {
    records
        .into_iter()
        .map(|(round, correct, confidence)| {
            ValidationRecord::new(round, correct, confidence).map_err(value_err)
        })
        .collect()
}

/// Beta-posterior-mean trust score (N + a) / (N + M + a + b).
#[pyfunction]
#[pyo3(signature = (n_correct, m_incorrect, a=0.5, b=0.5))]
fn trust_value(n_correct: f64, m_incorrect: f64, a: f64, b: f64) -> PyResult<f64> {
    let prior = BetaPrior::new(a, b).map_err(value_err)?;
    let state = TrustState::with_counts(n_correct, m_incorrect, prior).map_err(value_err)?;
    Ok(state.trust_value())
}

/// weight * old + (1 - weight) * new, clamped to [0, 1].
#[pyfunction]
fn decay_blend(old_value: f64, new_value: f64, weight: f64) -> f64 {
    trustsim::trust::decay_blend(old_value, new_value, weight)
}

/// Exponentially decayed pseudo-counts over (round, correct, confidence)
/// records: returns (n_eff, m_eff).
#[pyfunction]
fn decayed_counts(
    records: Vec<(u64, bool, f64)>,
    lambda: f64,
    now: u64,
) -> PyResult<(f64, f64)> {
    let records = records_from(records)?;
    Ok(trustsim::trust::decayed_counts(&records, lambda, now))
}

/// Creation chances C_i = P_i / P_total.
#[pyfunction]
fn creation_chance(powers: Vec<f64>) -> PyResult<Vec<f64>> {
    consensus::creation_chance(&powers).map_err(value_err)
}

/// Normalized election distribution from alpha * C_i + (1 - alpha) * T_i.
#[pyfunction]
fn combined_chance(creation: Vec<f64>, trust: Vec<f64>, alpha: f64) -> PyResult<Vec<f64>> {
    consensus::combined_chance(&creation, &trust, alpha)
        .map(|w| w.distribution)
        .map_err(value_err)
}

/// Gini coefficient of a non-negative reward vector.
#[pyfunction]
fn gini(rewards: Vec<f64>) -> PyResult<f64> {
    gini_impl(&rewards).map_err(value_err)
}

fn summary_dict<'py>(py: Python<'py>, chain: &Chain) -> PyResult<Bound<'py, PyDict>> {
    let summary = mcmc::summarize(chain).map_err(value_err)?;
    let dict = PyDict::new(py);
    dict.set_item("mean", summary.mean)?;
    dict.set_item("median", summary.median)?;
    dict.set_item("std", summary.std)?;
    dict.set_item("acceptance_rate", chain.diagnostics.acceptance_rate)?;
    Ok(dict)
}

/// Random-walk Metropolis-Hastings over the Beta-Bernoulli trust posterior.
/// Returns {"samples", "mean", "median", "std", "acceptance_rate"}.
#[pyfunction]
#[pyo3(signature = (n_correct, m_incorrect, a=0.5, b=0.5, steps=55_000, burn_in=5_000, thin=1, proposal_std=0.1, seed=0))]
#[allow(clippy::too_many_arguments)]
fn mh_trust_chain<'py>(
    py: Python<'py>,
    n_correct: f64,
    m_incorrect: f64,
    a: f64,
    b: f64,
    steps: usize,
    burn_in: usize,
    thin: usize,
    proposal_std: f64,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let prior = BetaPrior::new(a, b).map_err(value_err)?;
    let cfg = ChainConfig::new(steps, burn_in, thin, proposal_std, seed).map_err(value_err)?;
    let chain = mcmc::mh_trust_chain(n_correct, m_incorrect, prior, &cfg).map_err(value_err)?;
    let dict = summary_dict(py, &chain)?;
    dict.set_item("samples", chain.samples.first_coordinate())?;
    Ok(dict)
}

/// Metropolis-Hastings over (mu, log sigma) for Gaussian observations with
/// flat priors. Returns {"samples" [(mu, sigma2)], summary fields}.
#[pyfunction]
#[pyo3(signature = (observations, steps=55_000, burn_in=5_000, thin=1, proposal_std=0.05, seed=0))]
fn mh_gaussian_chain<'py>(
    py: Python<'py>,
    observations: Vec<f64>,
    steps: usize,
    burn_in: usize,
    thin: usize,
    proposal_std: f64,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let cfg = ChainConfig::new(steps, burn_in, thin, proposal_std, seed).map_err(value_err)?;
    let chain = mcmc::mh_gaussian_chain(&observations, &cfg).map_err(value_err)?;
    let dict = summary_dict(py, &chain)?;
    if let ChainSamples::Pairs(pairs) = &chain.samples {
        dict.set_item("samples", pairs.clone())?;
    }
    Ok(dict)
}

/// Gibbs sampler for the conjugate Normal-Inverse-Gamma trust model.
/// Returns {"samples" [(mu, sigma2)], summary fields}.
#[pyfunction]
#[pyo3(signature = (observations, mu0=0.5, kappa0=1.0, alpha0=2.0, beta0=0.05, steps=33_000, burn_in=3_000, thin=1, seed=0))]
#[allow(clippy::too_many_arguments)]
fn gibbs_gaussian_chain<'py>(
    py: Python<'py>,
    observations: Vec<f64>,
    mu0: f64,
    kappa0: f64,
    alpha0: f64,
    beta0: f64,
    steps: usize,
    burn_in: usize,
    thin: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let hyper = GaussianModel::new(mu0, kappa0, alpha0, beta0).map_err(value_err)?;
    let cfg = ChainConfig::new(steps, burn_in, thin, 0.1, seed).map_err(value_err)?;
    let chain = mcmc::gibbs_gaussian_chain(&observations, &hyper, &cfg).map_err(value_err)?;
    let dict = summary_dict(py, &chain)?;
    if let ChainSamples::Pairs(pairs) = &chain.samples {
        dict.set_item("samples", pairs.clone())?;
    }
    Ok(dict)
}

/// Split-Rhat convergence statistic across chains of equal length.
#[pyfunction]
fn split_rhat(chains: Vec<Vec<f64>>) -> PyResult<f64> {
    let chains: Vec<Chain> = chains
        .into_iter()
        .map(|samples| Chain {
            samples: ChainSamples::Scalar(samples),
            diagnostics: ChainDiagnostics {
                acceptance_rate: 1.0,
                rhat: None,
            },
        })
        .collect();
    mcmc::split_rhat(&chains).map_err(value_err)
}

/// Trust estimation from (round, correct, confidence) records with the
/// counting, mh or gibbs method. Returns {"trust", "mean", "median", "std"}.
#[pyfunction]
#[pyo3(signature = (records, method, a=0.5, b=0.5, steps=55_000, burn_in=5_000, thin=1, proposal_std=0.1, window=10, seed=0, lambda=None))]
#[allow(clippy::too_many_arguments)]
fn estimate_trust<'py>(
    py: Python<'py>,
    records: Vec<(u64, bool, f64)>,
    method: &str,
    a: f64,
    b: f64,
    steps: usize,
    burn_in: usize,
    thin: usize,
    proposal_std: f64,
    window: u64,
    seed: u64,
    lambda: Option<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let records = records_from(records)?;
    let method: EstimateMethod = method.parse().map_err(value_err)?;
    let opts = EstimateOptions {
        prior: BetaPrior::new(a, b).map_err(value_err)?,
        chain: ChainConfig::new(steps, burn_in, thin, proposal_std, seed).map_err(value_err)?,
        window,
        lambda,
        hyper: GaussianModel::default(),
    };
    let e = estimate::estimate_trust(&records, method, &opts).map_err(value_err)?;
    let dict = PyDict::new(py);
    dict.set_item("trust", e.trust)?;
    dict.set_item("mean", e.summary.mean)?;
    dict.set_item("median", e.summary.median)?;
    dict.set_item("std", e.summary.std)?;
    Ok(dict)
}

/// Runs a full simulation from config text (the same flat key-value format
/// the CLI reads). Returns per-node summaries and run metrics.
#[pyfunction]
fn run_simulation<'py>(py: Python<'py>, config_text: &str) -> PyResult<Bound<'py, PyDict>> {
    let config = match parse_config(config_text).map_err(value_err)? {
        ParsedConfig::Sim(c) => c,
        ParsedConfig::Experiment(_) => {
            return Err(PyValueError::new_err(
                "config contains a sweep section; run_simulation expects a plain config",
            ))
        }
    };
    let result = sim::run_simulation(&config).map_err(value_err)?;
    let report = compute_metrics(&config, &result);

    let dict = PyDict::new(py);
    dict.set_item("rounds", result.outcomes.len())?;
    dict.set_item(
        "accepted_blocks",
        result.outcomes.iter().filter(|o| o.accepted).count(),
    )?;
    dict.set_item(
        "lottery_blocks",
        result.outcomes.iter().filter(|o| o.block.is_lottery).count(),
    )?;

    let nodes = pyo3::types::PyList::empty(py);
    for (i, n) in config.nodes.iter().enumerate() {
        let entry = PyDict::new(py);
        entry.set_item("id", n.id.0)?;
        entry.set_item("power", n.power)?;
        entry.set_item("honesty", n.honesty)?;
        entry.set_item("reward", result.rewards[i])?;
        entry.set_item(
            "final_trust",
            result.final_states[i].effective_trust(config.decay.mode),
        )?;
        entry.set_item(
            "blocks_created",
            result
                .outcomes
                .iter()
                .filter(|o| o.block.creator == n.id)
                .count(),
        )?;
        nodes.append(entry)?;
    }
    dict.set_item("nodes", nodes)?;

    let metrics = PyDict::new(py);
    metrics.set_item("gini", report.gini)?;
    metrics.set_item("low_power_share", report.low_power_share)?;
    metrics.set_item("acceptance_rate", report.acceptance_rate)?;
    metrics.set_item("trust_mae", report.trust_mae)?;
    dict.set_item("metrics", metrics)?;

    Ok(dict)
}

#[pymodule]
fn trustsim_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(trust_value, m)?)?;
    m.add_function(wrap_pyfunction!(decay_blend, m)?)?;
    m.add_function(wrap_pyfunction!(decayed_counts, m)?)?;
    m.add_function(wrap_pyfunction!(creation_chance, m)?)?;
    m.add_function(wrap_pyfunction!(combined_chance, m)?)?;
    m.add_function(wrap_pyfunction!(gini, m)?)?;
    m.add_function(wrap_pyfunction!(mh_trust_chain, m)?)?;
    m.add_function(wrap_pyfunction!(mh_gaussian_chain, m)?)?;
    m.add_function(wrap_pyfunction!(gibbs_gaussian_chain, m)?)?;
    m.add_function(wrap_pyfunction!(split_rhat, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_trust, m)?)?;
    m.add_function(wrap_pyfunction!(run_simulation, m)?)?;
    Ok(())
}
