//! Command line experiments for approximate quantum state sharing.
//!
//! Every grid point produces one [`ResultRecord`]. Records depend only on
//! the resolved configuration and the seed, apart from `wall_time_ms`.

pub mod args;
pub mod config;
pub mod record;

use std::time::Instant;

use aqss_core::analysis::{
    entropy_deficit, jensen_chain_check, locc_distinguishability, mc_expected_trace_distance, mc_purity, BoundCheck,
    ChannelSource, InputFamily, McPlan, IDENTITY_SIGMAS,
};
use aqss_core::channels::{
    apply_product, perfect_pqc, probe_states, randomizing_diagnostic, sample_ruc, ChannelFamily, RandomUnitaryChannel,
};
use aqss_core::linalg::{maximally_mixed, partial_trace, DensityMatrix, Subsystem};
use aqss_core::protocol::{
    charlie_encode, charlie_encode_with_channels, cooperate_decode, exterior_adversary_view, interior_attack_bob,
    key_bits, key_cost, multiparty_session, non_colluder_marginal, AqssSession, ProtocolConfig,
};
use aqss_core::random::random_pure_state;
use aqss_core::{Error, RngStream};

pub use config::{Command, ExperimentConfig, Family, OutputFormat};
pub use record::{Metric, ResultRecord};

/// Decode and exact-channel checks.
pub const EXACT_TOL: f64 = 1e-12;
/// Marginals of exact channels go through a partial trace first.
pub const MARGINAL_TOL: f64 = 1e-10;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("resource limit: {0}")]
    Resource(String),
    #[error(transparent)]
    Runtime(#[from] anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Resource(_) => 3,
            CliError::Runtime(_) => 1,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::ResourceGuard { .. } => CliError::Resource(e.to_string()),
            other => CliError::Runtime(other.into()),
        }
    }
}

fn check_metric(name: &str, check: &BoundCheck, asserted: bool) -> Metric {
    Metric {
        name: name.to_string(),
        value: check.observed,
        bound: Some(check.bound),
        satisfied: Some(check.satisfied),
        asserted,
    }
}

fn channels(cfg: &ExperimentConfig, parties: usize, n: usize, rng: &mut RngStream) -> Result<ChannelFamily, Error> {
    let parts = (0..parties)
        .map(|_| {
            if cfg.perfect {
                perfect_pqc(cfg.d)
            } else {
                sample_ruc(cfg.d, n, rng)
            }
        })
        .collect::<Result<Vec<RandomUnitaryChannel>, Error>>()?;
    ChannelFamily::new(parts)
}

fn encode(
    cfg: &ExperimentConfig,
    n: usize,
    plaintext: &DensityMatrix,
    rng: &mut RngStream,
) -> Result<AqssSession, Error> {
    let pc = ProtocolConfig::new(cfg.d, cfg.epsilon, cfg.m)?.with_n(n)?;
    if cfg.perfect {
        let family = channels(cfg, cfg.m, n, rng)?;
        charlie_encode_with_channels(&pc, family, plaintext, rng)
    } else if cfg.m >= 3 {
        multiparty_session(&pc, plaintext, rng)
    } else {
        charlie_encode(&pc, plaintext, rng)
    }
}

/// Bound for a sampled channel, or the exact-channel tolerance with an
/// assertion when `--perfect` is set.
fn exactness(cfg: &ExperimentConfig, name: &str, value: f64, sampled_bound: f64, tol: f64) -> Metric {
    if cfg.perfect {
        Metric::asserted(name, value, tol)
    } else {
        Metric::bounded(name, value, sampled_bound)
    }
}

fn randomize(cfg: &ExperimentConfig, n: usize) -> Result<Vec<Metric>, Error> {
    let mut rng = RngStream::new(cfg.seed, 0);
    let channel = if cfg.perfect {
        perfect_pqc(cfg.d)?
    } else {
        sample_ruc(cfg.d, n, &mut rng)?
    };
    let probes = probe_states(cfg.d, cfg.trials, &mut rng)?;
    let report = randomizing_diagnostic(&channel, cfg.epsilon, &probes)?;
    let mean = report.distances.iter().sum::<f64>() / report.distances.len() as f64;
    Ok(vec![
        exactness(cfg, "max_distance", report.max_distance, cfg.epsilon, EXACT_TOL),
        Metric::value("mean_distance", mean),
        Metric::value("probes", probes.len() as f64),
        Metric::value("violations", report.violations.len() as f64),
    ])
}

fn aqss_demo(cfg: &ExperimentConfig, n: usize) -> Result<Vec<Metric>, Error> {
    let mut rng = RngStream::new(cfg.seed, 0);
    let family = InputFamily::from(cfg.input_family);
    let plaintext = family.sample(cfg.d, &mut rng)?;
    let session = encode(cfg, n, &plaintext, &mut rng)?;

    let decoded = cooperate_decode(&session)?;
    let exterior = exterior_adversary_view(&session)?;
    let interior = interior_attack_bob(&session)?;
    let (dims, d_sq) = ((cfg.d, cfg.d), cfg.d * cfg.d);
    let bob_truth = partial_trace(&plaintext, dims, Subsystem::B)?;
    // Separable inputs get one epsilon per receiver; the entangled input
    // only goes through the marginal argument.
    let exterior_bound = match family {
        InputFamily::MaxEntangled => cfg.epsilon,
        _ => 2.0 * cfg.epsilon,
    };

    let mut metrics = vec![
        Metric::asserted(
            "decode_error",
            decoded.matrix().max_abs_diff(plaintext.matrix()),
            EXACT_TOL,
        ),
        exactness(
            cfg,
            "exterior_distance",
            exterior.distance_to_maximally_mixed(),
            exterior_bound,
            EXACT_TOL,
        ),
        Metric::value(
            "exterior_entropy_deficit_bits",
            entropy_deficit(&exterior, (d_sq as f64).log2()),
        ),
        exactness(
            cfg,
            "interior_alice_distance",
            interior.alice_marginal.distance_to_maximally_mixed(),
            cfg.epsilon,
            MARGINAL_TOL,
        ),
        Metric::asserted(
            "interior_bob_error",
            interior.bob_marginal.distance(&bob_truth)?,
            MARGINAL_TOL,
        ),
    ];
    let n_alice = session.channels().part(0).n();
    if n_alice > 1 {
        let wrong = (session.key(0)? + 1) % n_alice;
        let guessed = session.with_keys(vec![Some(wrong), Some(session.key(1)?)])?;
        let guess = cooperate_decode(&guessed)?;
        metrics.push(Metric::value("wrong_key_distance", guess.distance(&plaintext)?));
    }
    metrics.push(Metric::value("key_bits_per_receiver", f64::from(key_bits(n_alice))));
    Ok(metrics)
}

fn bound_sweep(cfg: &ExperimentConfig, n: usize) -> Result<Vec<Metric>, Error> {
    let plan = mc_plan(cfg);
    let est = mc_expected_trace_distance(cfg.d, n, n, cfg.input_family.into(), &plan)?;
    let mean = match &est.check {
        Some(check) => check_metric("mean_trace_distance", check, true),
        None => Metric::bounded("mean_trace_distance", est.stats.mean, est.bound),
    };
    Ok(vec![
        mean,
        Metric::value("stderr", est.stats.stderr),
        check_metric("jensen_rms", &jensen_chain_check(&est.stats), true),
    ])
}

fn purity_check(cfg: &ExperimentConfig, n: usize) -> Result<Vec<Metric>, Error> {
    let est = mc_purity(cfg.d, n, n, &mc_plan(cfg))?;
    let tol = IDENTITY_SIGMAS * est.stats.stderr;
    Ok(vec![
        Metric::value("mean_purity", est.stats.mean),
        Metric::value("stderr", est.stats.stderr),
        Metric::value("purity_identity", est.identity),
        Metric::value("product_expectation", est.product_expectation),
        check_metric("identity_deviation", &est.check, true),
        Metric::bounded(
            "product_expectation_deviation",
            (est.stats.mean - est.product_expectation).abs(),
            tol,
        ),
    ])
}

fn mc_plan(cfg: &ExperimentConfig) -> McPlan {
    let source = if cfg.perfect {
        ChannelSource::Perfect
    } else {
        ChannelSource::Haar
    };
    McPlan::new(cfg.trials, cfg.seed).with_source(source)
}

fn key_cost_metrics(cfg: &ExperimentConfig, n: usize) -> Result<Vec<Metric>, Error> {
    let report = key_cost(&ProtocolConfig::new(cfg.d, cfg.epsilon, cfg.m)?.with_n(n)?);
    Ok(vec![
        Metric::value("n", n as f64),
        Metric::value("perfect_bits", report.perfect_bits),
        Metric::value("approx_bits", report.approx_bits),
        Metric::value("ratio", report.ratio),
    ])
}

fn locc_test(cfg: &ExperimentConfig, n: usize) -> Result<Vec<Metric>, Error> {
    let mut rng = RngStream::new(cfg.seed, 0);
    let family = channels(cfg, 2, n, &mut rng)?;
    let input_family = InputFamily::from(cfg.input_family);
    let input = input_family.sample(cfg.d, &mut rng)?;
    let out = apply_product(&family, &input)?;
    let reference = maximally_mixed(cfg.d * cfg.d)?;
    let gap = locc_distinguishability(&out, &reference, (cfg.d, cfg.d), cfg.trials, cfg.seed)?;
    let distance = out.distance_to_maximally_mixed();
    let sampled_bound = match input_family {
        InputFamily::MaxEntangled => cfg.epsilon,
        _ => 2.0 * cfg.epsilon,
    };
    Ok(vec![
        // Measuring can only lose distinguishability.
        Metric::asserted("locc_gap", gap, distance + MARGINAL_TOL),
        exactness(cfg, "trace_distance", distance, sampled_bound, EXACT_TOL),
    ])
}

fn multiparty(cfg: &ExperimentConfig, n: usize) -> Result<Vec<Metric>, Error> {
    let mut rng = RngStream::new(cfg.seed, 0);
    let joint = cfg.d.pow(cfg.m as u32);
    let plaintext = random_pure_state(joint, &mut rng)?;
    let session = encode(cfg, n, &plaintext, &mut rng)?;

    let decoded = cooperate_decode(&session)?;
    let exterior = exterior_adversary_view(&session)?;
    // The largest coalitions: everybody but receiver k.
    let mut worst_single = 0.0f64;
    for k in 0..cfg.m {
        let coalition: Vec<usize> = (0..cfg.m).filter(|&j| j != k).collect();
        let marginal = non_colluder_marginal(&session, &coalition)?;
        worst_single = worst_single.max(marginal.distance_to_maximally_mixed());
    }
    let rest = non_colluder_marginal(&session, &[0])?;

    Ok(vec![
        Metric::asserted(
            "decode_error",
            decoded.matrix().max_abs_diff(plaintext.matrix()),
            EXACT_TOL,
        ),
        exactness(
            cfg,
            "exterior_distance",
            exterior.distance_to_maximally_mixed(),
            cfg.m as f64 * cfg.epsilon,
            EXACT_TOL,
        ),
        exactness(
            cfg,
            "max_single_outsider_distance",
            worst_single,
            cfg.epsilon,
            MARGINAL_TOL,
        ),
        Metric::value("outsiders_of_receiver_0_distance", rest.distance_to_maximally_mixed()),
    ])
}

/// Runs one validated grid point.
pub fn run(cfg: &ExperimentConfig) -> Result<ResultRecord, CliError> {
    cfg.validate()?;
    let n = cfg.channel_size()?;
    let start = Instant::now();
    let metrics = match cfg.command {
        Command::Randomize => randomize(cfg, n),
        Command::AqssDemo => aqss_demo(cfg, n),
        Command::BoundSweep => bound_sweep(cfg, n),
        Command::PurityCheck => purity_check(cfg, n),
        Command::KeyCost => key_cost_metrics(cfg, n),
        Command::LoccTest => locc_test(cfg, n),
        Command::Multiparty => multiparty(cfg, n),
    }?;
    Ok(ResultRecord {
        command: cfg.command,
        config: cfg.clone(),
        n_a: n,
        n_b: n,
        metrics,
        wall_time_ms: start.elapsed().as_millis() as u64,
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: cfg.seed,
    })
}

/// Validates the whole grid, then runs it in order.
pub fn sweep(grid: &[ExperimentConfig]) -> Result<Vec<ResultRecord>, CliError> {
    for cfg in grid {
        cfg.validate()?;
    }
    grid.iter().map(run).collect()
}
