use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use trustsim::harness::config::{parse_config, parse_seed_list, parse_value_list, ParsedConfig};
use trustsim::harness::estimate::{estimate_trust, parse_history, EstimateMethod, EstimateOptions};
use trustsim::harness::experiment::{run_experiment, run_single};
use trustsim::harness::{output, ExperimentSpec};
use trustsim::mcmc::{ChainConfig, GaussianModel};
use trustsim::trust::BetaPrior;
use trustsim::{Error, Result};

#[derive(Parser)]
#[command(
    name = "trustsim",
    about = "Deterministic simulator for a trust-weighted block-creation consensus mechanism",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single simulation and write rounds/trust/summary/metrics CSVs.
    Simulate {
        /// Config file (flat key-value format, see README).
        #[arg(long)]
        config: PathBuf,
        /// Override the config's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a (sweep value x seed) experiment grid.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Dotted parameter path, e.g. alpha or lottery.nb_success_prob.
        #[arg(long)]
        param: String,
        /// Comma-separated sweep values.
        #[arg(long)]
        values: String,
        /// Seed count (bare integer expands to 0..n) or comma-separated seeds.
        #[arg(long)]
        seeds: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Estimate a trust score from a validation history CSV.
    Estimate {
        /// History file: rows of round,correct[,confidence].
        #[arg(long)]
        history: PathBuf,
        /// counting | mh | gibbs
        #[arg(long)]
        method: String,
        #[arg(long, default_value_t = 55_000)]
        steps: usize,
        /// Defaults to 10% of --steps.
        #[arg(long = "burn-in")]
        burn_in: Option<usize>,
        #[arg(long, default_value_t = 1)]
        thin: usize,
        #[arg(long = "proposal-std", default_value_t = 0.1)]
        proposal_std: f64,
        #[arg(long = "prior-a", default_value_t = 0.5)]
        prior_a: f64,
        #[arg(long = "prior-b", default_value_t = 0.5)]
        prior_b: f64,
        /// Correctness-fraction window in rounds (gibbs method).
        #[arg(long, default_value_t = 10)]
        window: u64,
        /// Decayed-count retention for the counting method.
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output JSON file.
        #[arg(long)]
        out: PathBuf,
        /// Optionally export the chain as CSV (step,value[,sigma2]).
        #[arg(long = "chain-out")]
        chain_out: Option<PathBuf>,
    },
}

#[derive(Serialize)]
struct EstimateOutput {
    method: String,
    trust: f64,
    mean: f64,
    median: f64,
    std: f64,
    samples: usize,
    acceptance_rate: Option<f64>,
}

fn read_to_string(path: &PathBuf) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate { config, seed, out } => {
            let text = read_to_string(&config)?;
            let mut sim = match parse_config(&text)? {
                ParsedConfig::Sim(c) => c,
                ParsedConfig::Experiment(_) => {
                    return Err(Error::Config(
                        "config contains a sweep section; use the sweep command".into(),
                    ))
                }
            };
            if let Some(seed) = seed {
                sim.seed = seed;
            }
            run_single(&sim, &out)?;
            println!("wrote {}", out.display());
        }
        Command::Sweep {
            config,
            param,
            values,
            seeds,
            out,
        } => {
            let text = read_to_string(&config)?;
            let base = parse_config(&text)?.base().clone();
            let spec = ExperimentSpec {
                base,
                sweep_param: Some(param),
                sweep_values: parse_value_list("values", &values)?,
                seeds: parse_seed_list(&seeds)?,
                output_dir: out.clone(),
            };
            let rows = run_experiment(&spec)?;
            println!("{} runs -> {}", rows.len(), out.join("metrics.csv").display());
        }
        Command::Estimate {
            history,
            method,
            steps,
            burn_in,
            thin,
            proposal_std,
            prior_a,
            prior_b,
            window,
            lambda,
            seed,
            out,
            chain_out,
        } => {
            let method: EstimateMethod = method.parse()?;
            let records = parse_history(&read_to_string(&history)?)?;
            let burn_in = burn_in.unwrap_or(steps / 10);
            let opts = EstimateOptions {
                prior: BetaPrior::new(prior_a, prior_b)?,
                chain: ChainConfig::new(steps, burn_in, thin, proposal_std, seed)?,
                window,
                lambda,
                hyper: GaussianModel::default(),
            };
            let estimate = estimate_trust(&records, method, &opts)?;

            let json = serde_json::to_string_pretty(&EstimateOutput {
                method: format!("{method:?}").to_lowercase(),
                trust: estimate.trust,
                mean: estimate.summary.mean,
                median: estimate.summary.median,
                std: estimate.summary.std,
                samples: estimate.chain.as_ref().map_or(0, |c| c.samples.len()),
                acceptance_rate: estimate
                    .chain
                    .as_ref()
                    .map(|c| c.diagnostics.acceptance_rate),
            })
            .expect("serializable output");
            fs::write(&out, json).map_err(|e| Error::io(&out, e))?;

            if let Some(path) = chain_out {
                match &estimate.chain {
                    Some(chain) => output::write_chain_csv(chain, &path)?,
                    None => {
                        return Err(Error::Config(
                            "the counting method runs no chain; nothing to export".into(),
                        ))
                    }
                }
            }
            println!("trust = {}", output::fmt_f64(estimate.trust));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
