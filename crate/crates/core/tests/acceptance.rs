//! Acceptance gate: every release-blocking property, one test per criterion,
//! each printing a single PASS/FAIL line (visible with `--nocapture`).
//!
//! Statistical criteria run on fixed seeds, so their outcomes are
//! deterministic; tolerances are pinned in code next to each check.

use std::process::Command;

use trustsim::consensus::{
    combined_chance, creation_chance, draw_lottery_gap, select_creator, LotteryConfig,
    NodeDescriptor, NodeId,
};
use trustsim::harness::config::{parse_config, ParsedConfig};
use trustsim::mcmc::{gibbs_gaussian_chain, mh_trust_chain, summarize, ChainConfig, GaussianModel};
use trustsim::rng;
use trustsim::sim::{
    run_simulation, scenario_sybil_split, BehaviorMode, SimConfig, TruthMode,
};
use trustsim::trust::{decay_blend, BetaPrior, DecayParams, TrustState};

fn report(criterion: &str, pass: bool, detail: String) {
    println!("{criterion}: {} ({detail})", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{criterion}: {detail}");
}

#[test]
fn criterion_01_formula_identity() {
    // Jeffreys-prior trust equals the smoothed counting rule on the whole
    // [0,100]^2 integer grid, to 1e-12.
    let mut worst = 0.0f64;
    for n in 0..=100u32 {
        for m in 0..=100u32 {
            let state =
                TrustState::with_counts(n as f64, m as f64, BetaPrior::jeffreys()).unwrap();
            let smoothed = (n as f64 + 0.5) / (n as f64 + m as f64 + 1.0);
            worst = worst.max((state.trust_value() - smoothed).abs());
        }
    }
    report(
        "criterion 01 formula identity",
        worst <= 1e-12,
        format!("max |beta mean - smoothed rule| = {worst:.3e} over 101x101 grid"),
    );
}

#[test]
fn criterion_02_mh_beta_oracle() {
    // 48-point grid: counts {0,1,5,20}^2 x priors {(0.5,0.5),(1,1),(2,1)};
    // chain posterior mean within 0.015 of the analytic Beta mean with
    // 50_000 post-burn-in samples per point.
    let counts = [0.0, 1.0, 5.0, 20.0];
    let priors = [(0.5, 0.5), (1.0, 1.0), (2.0, 1.0)];
    let mut worst = 0.0f64;
    let mut points = 0;
    for (pi, &(a, b)) in priors.iter().enumerate() {
        let prior = BetaPrior::new(a, b).unwrap();
        for (ni, &n) in counts.iter().enumerate() {
            for (mi, &m) in counts.iter().enumerate() {
                let cfg = ChainConfig::new(
                    55_000,
                    5_000,
                    1,
                    0.25,
                    9_000 + (pi * 16 + ni * 4 + mi) as u64,
                )
                .unwrap();
                let chain = mh_trust_chain(n, m, prior, &cfg).unwrap();
                let mean = summarize(&chain).unwrap().mean;
                let analytic = (n + a) / (n + m + a + b);
                worst = worst.max((mean - analytic).abs());
                points += 1;
            }
        }
    }
    report(
        "criterion 02 mh-beta oracle",
        points == 48 && worst <= 0.015,
        format!("{points} grid points, max |chain mean - analytic mean| = {worst:.4}"),
    );
}

#[test]
fn criterion_03_gibbs_conjugate_oracle() {
    // Posterior mean of mu within 0.015 of (kappa0*mu0 + n*ybar)/(kappa0+n)
    // on 7 configurations, including the kappa0 = 1e9 domination case.
    let configs: [(f64, f64, usize, f64); 7] = [
        // (mu0, kappa0, n_obs, center)
        (0.5, 1.0, 99, 0.8),
        (0.5, 1.0, 10, 0.2),
        (0.2, 5.0, 40, 0.9),
        (0.9, 0.5, 25, 0.3),
        (0.5, 10.0, 50, 0.6),
        (0.7, 2.0, 8, 0.4),
        (0.42, 1e9, 10, 0.9),
    ];
    let mut worst = 0.0f64;
    for (i, &(mu0, kappa0, n_obs, center)) in configs.iter().enumerate() {
        // Deterministic observations spread around `center` with exact mean.
        let mut obs: Vec<f64> = (0..n_obs)
            .map(|j| center + 0.1 * (j as f64 / n_obs as f64 - 0.5))
            .collect();
        let mean_now = obs.iter().sum::<f64>() / n_obs as f64;
        for y in obs.iter_mut() {
            *y += center - mean_now;
        }

        let hyper = GaussianModel::new(mu0, kappa0, 2.0, 0.05).unwrap();
        let cfg = ChainConfig::new(33_000, 3_000, 1, 0.1, 7_700 + i as u64).unwrap();
        let chain = gibbs_gaussian_chain(&obs, &hyper, &cfg).unwrap();
        let mean = summarize(&chain).unwrap().mean;
        let analytic = (kappa0 * mu0 + n_obs as f64 * center) / (kappa0 + n_obs as f64);
        worst = worst.max((mean - analytic).abs());
    }
    report(
        "criterion 03 gibbs conjugate oracle",
        worst <= 0.015,
        format!("7 configurations, max |gibbs mean - conjugate mean| = {worst:.4}"),
    );
}

#[test]
fn criterion_04_election_statistics() {
    // 10-node fixed-weight configuration, 1e6 seeded draws: empirical
    // creator frequencies within total-variation distance 0.01 of the
    // target; with alpha = 1 the target equals the creation chances exactly.
    let powers: Vec<f64> = vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 55.0];
    let trust: Vec<f64> = vec![0.9, 0.1, 0.5, 0.7, 0.3, 0.8, 0.2, 0.6, 0.4, 0.5];
    let creation = creation_chance(&powers).unwrap();

    let mut worst_tv = 0.0f64;
    for (case, alpha) in [(0usize, 1.0), (1usize, 0.5)] {
        let weights = combined_chance(&creation, &trust, alpha).unwrap();
        if alpha == 1.0 {
            for (d, c) in weights.distribution.iter().zip(&creation) {
                assert!((d - c).abs() <= 1e-12, "alpha=1 target must equal creation");
            }
        }
        let mut rng = rng::stream(40_400 + case as u64);
        let draws = 1_000_000usize;
        let mut counts = vec![0usize; powers.len()];
        for _ in 0..draws {
            counts[select_creator(&weights, &mut rng).unwrap()] += 1;
        }
        let tv: f64 = counts
            .iter()
            .zip(&weights.distribution)
            .map(|(&c, &p)| (c as f64 / draws as f64 - p).abs())
            .sum::<f64>()
            / 2.0;
        worst_tv = worst_tv.max(tv);
    }
    report(
        "criterion 04 election statistics",
        worst_tv <= 0.01,
        format!("max TV distance over 1e6 draws (alpha 1 and 0.5) = {worst_tv:.5}"),
    );
}

#[test]
fn criterion_05_lottery_rate() {
    // r=1, p=0.5: the lottery block share over 1e5 rounds is 0.5 +/- 10%
    // relative at every alpha, every lottery block's creator is low-power,
    // and the NB sample mean matches r(1-p)/p +/- 2% relative over 1e5 draws.
    let mut nodes: Vec<NodeDescriptor> = Vec::new();
    for (i, p) in [1.0, 2.0, 3.0, 94.0].iter().enumerate() {
        nodes.push(NodeDescriptor::new(NodeId(i as u32), *p, 0.9).unwrap());
    }
    let lottery = LotteryConfig {
        enabled: true,
        low_power_quantile: 0.5,
        nb_successes: 1,
        nb_success_prob: 0.5,
        uniform_low_power: false,
    };
    // Low-power set at quantile 0.5 of [1,2,3,94]: powers <= 2 -> ids 0, 1.
    let low_ids = [NodeId(0), NodeId(1)];

    let mut worst_rel = 0.0f64;
    for (i, alpha) in [0.0, 0.5, 1.0].into_iter().enumerate() {
        let config = SimConfig {
            nodes: nodes.clone(),
            alpha,
            prior: BetaPrior::jeffreys(),
            decay: DecayParams::none(),
            committee_size: 2,
            lottery,
            truth_mode: TruthMode::Oracle,
            behavior_mode: BehaviorMode::IndependentHonesty,
            rounds: 100_000,
            block_reward: 1.0,
            seed: 5_500 + i as u64,
        };
        let result = run_simulation(&config).unwrap();
        let lottery_blocks: Vec<_> = result
            .outcomes
            .iter()
            .filter(|o| o.block.is_lottery)
            .collect();
        for o in &lottery_blocks {
            assert!(
                low_ids.contains(&o.block.creator),
                "lottery creator {} outside the low-power set",
                o.block.creator
            );
        }
        let share = lottery_blocks.len() as f64 / result.outcomes.len() as f64;
        worst_rel = worst_rel.max((share - 0.5).abs() / 0.5);
    }

    let cfg = lottery;
    let mut rng = rng::stream(5_600);
    let draws = 100_000usize;
    let total: u64 = (0..draws)
        .map(|_| draw_lottery_gap(&cfg, &mut rng).unwrap())
        .sum();
    let nb_mean = total as f64 / draws as f64;
    let nb_rel = (nb_mean - 1.0).abs() / 1.0;

    report(
        "criterion 05 lottery rate",
        worst_rel <= 0.10 && nb_rel <= 0.02,
        format!(
            "worst relative share error {worst_rel:.4} over alpha in {{0,0.5,1}}, NB mean {nb_mean:.4} vs 1.0"
        ),
    );
}

#[test]
fn criterion_06_ema_closed_form() {
    // Iterated blending equals lambda^t T(0) + (1 - lambda^t) B to 1e-12
    // for t <= 1000 and lambda in {0, 0.5, 0.9, 1}.
    let mut worst = 0.0f64;
    for &lambda in &[0.0, 0.5, 0.9, 1.0] {
        for &(t0, b) in &[(0.5, 1.0), (0.8, 0.0), (0.1, 0.6)] {
            let mut value = t0;
            for t in 1..=1000u32 {
                value = decay_blend(value, b, lambda);
                let closed = lambda.powi(t as i32) * t0 + (1.0 - lambda.powi(t as i32)) * b;
                worst = worst.max((value - closed).abs());
            }
        }
    }
    report(
        "criterion 06 ema closed form",
        worst <= 1e-12,
        format!("max |recurrence - closed form| = {worst:.3e}"),
    );
}

#[test]
fn criterion_07_oracle_mode_calibration() {
    // 10 nodes with spread honesty, full committee (k = 9), 500 rounds:
    // mean |final trust - honesty| < 0.08 in at least 95 of 100 seeds.
    let nodes: Vec<NodeDescriptor> = (0..10)
        .map(|i| NodeDescriptor::new(NodeId(i), 1.0 + i as f64, 0.05 + 0.1 * i as f64).unwrap())
        .collect();
    let mut passing = 0;
    for seed in 0..100u64 {
        let config = SimConfig {
            nodes: nodes.clone(),
            alpha: 0.5,
            prior: BetaPrior::jeffreys(),
            decay: DecayParams::none(),
            committee_size: 9,
            lottery: LotteryConfig::disabled(),
            truth_mode: TruthMode::Oracle,
            behavior_mode: BehaviorMode::IndependentHonesty,
            rounds: 500,
            block_reward: 1.0,
            seed: 70_000 + seed,
        };
        let result = run_simulation(&config).unwrap();
        let mae: f64 = config
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (result.final_states[i].trust_value() - n.honesty).abs())
            .sum::<f64>()
            / 10.0;
        if mae < 0.08 {
            passing += 1;
        }
    }
    report(
        "criterion 07 oracle-mode calibration",
        passing >= 95,
        format!("MAE < 0.08 in {passing}/100 seeds"),
    );
}

#[test]
fn criterion_08_sybil_exposure() {
    // alpha = 1: splitting leaves the coalition's block share unchanged
    // within 1% absolute over 1e5 rounds (and its creation mass exactly).
    // alpha = 0.5, fresh trust: the coalition's raw election mass and its
    // simulated block share strictly increase after a k = 4 split.
    let nodes: Vec<NodeDescriptor> = [10.0, 20.0, 30.0, 40.0]
        .iter()
        .enumerate()
        .map(|(i, &p)| NodeDescriptor::new(NodeId(i as u32), p, 0.9).unwrap())
        .collect();
    let target = NodeId(0);

    let base = SimConfig {
        nodes,
        alpha: 1.0,
        prior: BetaPrior::jeffreys(),
        decay: DecayParams::none(),
        committee_size: 3,
        lottery: LotteryConfig::disabled(),
        truth_mode: TruthMode::Oracle,
        behavior_mode: BehaviorMode::IndependentHonesty,
        rounds: 100_000,
        block_reward: 1.0,
        seed: 88_001,
    };
    let split = scenario_sybil_split(&base, target, 4).unwrap();

    // Analytic invariance of creation mass under alpha = 1.
    let powers_split: Vec<f64> = split.config.nodes.iter().map(|n| n.power).collect();
    let creation_split = creation_chance(&powers_split).unwrap();
    let coalition_creation: f64 = split
        .config
        .nodes
        .iter()
        .zip(&creation_split)
        .filter(|(n, _)| split.coalition.contains(&n.id))
        .map(|(_, &c)| c)
        .sum();
    assert!(
        (coalition_creation - 0.1).abs() <= 1e-12,
        "creation mass must be exactly invariant"
    );

    let share = |config: &SimConfig, members: &[NodeId]| -> f64 {
        let result = run_simulation(config).unwrap();
        result
            .outcomes
            .iter()
            .filter(|o| members.contains(&o.block.creator))
            .count() as f64
            / result.outcomes.len() as f64
    };
    let base_share = share(&base, &[target]);
    let split_share = share(&split.config, &split.coalition);
    let alpha1_gap = (split_share - base_share).abs();

    // alpha = 0.5 with fresh (prior-mean) trust: raw mass strictly grows.
    let mut base_half = base.clone();
    base_half.alpha = 0.5;
    base_half.seed = 88_002;
    let split_half = scenario_sybil_split(&base_half, target, 4).unwrap();

    let initial_mass = |config: &SimConfig, members: &[NodeId]| -> f64 {
        let powers: Vec<f64> = config.nodes.iter().map(|n| n.power).collect();
        let trust: Vec<f64> = vec![config.prior.mean(); config.nodes.len()];
        let w = combined_chance(&creation_chance(&powers).unwrap(), &trust, config.alpha).unwrap();
        config
            .nodes
            .iter()
            .zip(&w.distribution)
            .filter(|(n, _)| members.contains(&n.id))
            .map(|(_, &d)| d)
            .sum()
    };
    let mass_base = initial_mass(&base_half, &[target]);
    let mass_split = initial_mass(&split_half.config, &split_half.coalition);

    let share_base_half = share(&base_half, &[target]);
    let share_split_half = share(&split_half.config, &split_half.coalition);

    report(
        "criterion 08 sybil exposure",
        alpha1_gap <= 0.01 && mass_split > mass_base && share_split_half > share_base_half,
        format!(
            "alpha=1 share gap {alpha1_gap:.4}; alpha=0.5 election mass {mass_base:.4} -> {mass_split:.4}, simulated share {share_base_half:.4} -> {share_split_half:.4}"
        ),
    );
}

#[test]
fn criterion_09_simulate_determinism() {
    // The simulate command run twice with the same config produces
    // byte-identical CSV outputs.
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("net.cfg");
    let mut config_text = String::from("rounds = 300\nseed = 12345\nalpha = 0.5\n");
    for i in 0..5 {
        config_text.push_str(&format!("node.{i}.power = {}\n", 1.5 + i as f64));
        config_text.push_str(&format!("node.{i}.honesty = 0.{}\n", 5 + i));
    }
    std::fs::write(&config_path, config_text).unwrap();

    let run = |out: &str| {
        let out_dir = dir.path().join(out);
        let status = Command::new(env!("CARGO_BIN_EXE_trustsim"))
            .args([
                "simulate",
                "--config",
                config_path.to_str().unwrap(),
                "--out",
                out_dir.to_str().unwrap(),
            ])
            .status()
            .expect("simulate runs");
        assert!(status.success(), "simulate must exit 0");
        out_dir
    };
    let a = run("a");
    let b = run("b");

    let mut identical = true;
    let mut detail = Vec::new();
    for file in ["rounds.csv", "trust.csv", "summary.csv", "metrics.csv"] {
        let bytes_a = std::fs::read(a.join(file)).unwrap();
        let bytes_b = std::fs::read(b.join(file)).unwrap();
        let same = bytes_a == bytes_b;
        identical &= same;
        detail.push(format!("{file}: {}", if same { "identical" } else { "DIFFERS" }));
    }
    report(
        "criterion 09 simulate determinism",
        identical,
        detail.join(", "),
    );
}

#[test]
fn criterion_10_appendix_replication() {
    // 10 nodes with powers drawn uniformly in (0, 1) per seed, power doubling
    // as correctness probability, near-full committee, 100 rounds: every
    // trust value stays inside (0, 1) and the top-half-power nodes end up
    // more trusted than the bottom half in at least 95 of 100 seeds.
    let mut ordered_ok = 0;
    for seed in 0..100u64 {
        let mut power_rng = rng::stream(300_000 + seed);
        let nodes: Vec<NodeDescriptor> = (0..10)
            .map(|i| {
                let p: f64 = 0.01 + 0.98 * rand::Rng::random::<f64>(&mut power_rng);
                NodeDescriptor::new(NodeId(i), p, 1.0).unwrap()
            })
            .collect();
        let config = SimConfig {
            nodes,
            alpha: 0.5,
            prior: BetaPrior::jeffreys(),
            decay: DecayParams::none(),
            committee_size: 9,
            lottery: LotteryConfig::disabled(),
            truth_mode: TruthMode::Oracle,
            behavior_mode: BehaviorMode::PowerAsHonesty,
            rounds: 100,
            block_reward: 1.0,
            seed: 400_000 + seed,
        };
        let result = run_simulation(&config).unwrap();
        for trajectory in &result.trust_trajectories {
            assert!(
                trajectory.iter().all(|&t| t > 0.0 && t < 1.0),
                "trust left (0,1) on seed {seed}"
            );
        }

        let mut by_power: Vec<usize> = (0..10).collect();
        by_power.sort_by(|&a, &b| {
            config.nodes[a]
                .power
                .partial_cmp(&config.nodes[b].power)
                .unwrap()
        });
        let half_mean = |idx: &[usize]| -> f64 {
            idx.iter()
                .map(|&i| result.final_states[i].trust_value())
                .sum::<f64>()
                / idx.len() as f64
        };
        if half_mean(&by_power[5..]) > half_mean(&by_power[..5]) {
            ordered_ok += 1;
        }
    }
    report(
        "criterion 10 appendix replication",
        ordered_ok >= 95,
        format!("top-half power out-trusted bottom half in {ordered_ok}/100 seeds"),
    );
}

// Keeps the config-format round-trip promise close to the acceptance gate:
// parse(serialize(config)) must reproduce the config exactly.
#[test]
fn config_round_trip_holds_for_the_acceptance_config() {
    let text = "rounds = 300\nseed = 12345\nalpha = 0.5\nnode.0.power = 1.5\nnode.1.power = 2.5\n";
    let ParsedConfig::Sim(config) = parse_config(text).unwrap() else {
        panic!("plain config");
    };
    let reparsed = parse_config(&trustsim::harness::serialize_config(&config)).unwrap();
    let ParsedConfig::Sim(reparsed) = reparsed else {
        panic!("plain config");
    };
    assert_eq!(config, reparsed);
}
