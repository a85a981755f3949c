use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{Command, ExperimentConfig, Family, OutputFormat};
use crate::CliError;

/// Approximate quantum state sharing experiments.
///
/// Numeric flags take comma separated lists; every combination is run as
/// one grid point, with `--d` varying slowest.
#[derive(Debug, Parser)]
#[command(name = "aqss", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Check that one channel randomizes probe states.
    Randomize(Flags),
    /// Encode, decode and attack a two-receiver session.
    AqssDemo(Flags),
    /// Monte Carlo mean trace distance of the product channel output.
    BoundSweep(Flags),
    /// Monte Carlo output purity on product pure inputs.
    PurityCheck(Flags),
    /// Secret key bits of the exact and the sampled scheme.
    KeyCost(Flags),
    /// Distinguish the output from 1/d^2 with local product measurements.
    LoccTest(Flags),
    /// Sessions with three or more receivers and their coalitions.
    Multiparty(Flags),
}

#[derive(Debug, Clone, Args)]
pub struct Flags {
    /// Local dimension.
    #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
    pub d: Vec<usize>,
    /// Target randomizing accuracy [default: 0.5].
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub epsilon: Vec<f64>,
    /// Unitaries per channel [default: ceil(150 d / epsilon^2)].
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub n: Vec<usize>,
    /// Trials, probe states or measurement settings, depending on the command.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub trials: Vec<usize>,
    /// Input states [default: product-pure].
    #[arg(long, value_enum)]
    pub family: Option<Family>,
    /// Number of receivers [default: 2, multiparty: 3].
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub m: Vec<usize>,
    #[arg(long)]
    pub seed: u64,
    /// Use the exact Weyl-Heisenberg channels (n = d^2).
    #[arg(long)]
    pub perfect: bool,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
    /// Write results here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

impl Sub {
    pub fn split(&self) -> (Command, &Flags) {
        match self {
            Sub::Randomize(f) => (Command::Randomize, f),
            Sub::AqssDemo(f) => (Command::AqssDemo, f),
            Sub::BoundSweep(f) => (Command::BoundSweep, f),
            Sub::PurityCheck(f) => (Command::PurityCheck, f),
            Sub::KeyCost(f) => (Command::KeyCost, f),
            Sub::LoccTest(f) => (Command::LoccTest, f),
            Sub::Multiparty(f) => (Command::Multiparty, f),
        }
    }
}

fn default_trials(command: Command) -> usize {
    match command {
        Command::Randomize => 8,
        Command::BoundSweep => 100,
        Command::PurityCheck => 200,
        Command::LoccTest => 64,
        Command::AqssDemo | Command::KeyCost | Command::Multiparty => 1,
    }
}

fn uses_trials(command: Command) -> bool {
    !matches!(command, Command::AqssDemo | Command::KeyCost | Command::Multiparty)
}

fn uses_family(command: Command) -> bool {
    matches!(command, Command::AqssDemo | Command::BoundSweep | Command::LoccTest)
}

fn or_default<T: Clone>(values: &[T], default: T) -> Vec<T> {
    if values.is_empty() {
        vec![default]
    } else {
        values.to_vec()
    }
}

/// Expands the flag lists into grid points and validates every one of them
/// before anything runs.
pub fn expand_grid(command: Command, flags: &Flags) -> Result<Vec<ExperimentConfig>, CliError> {
    if !flags.trials.is_empty() && !uses_trials(command) {
        return Err(CliError::Usage(format!("{} does not take --trials", command.name())));
    }
    if flags.family.is_some() && !uses_family(command) {
        return Err(CliError::Usage(format!("{} does not take --family", command.name())));
    }
    let default_m = if command == Command::Multiparty { 3 } else { 2 };
    let ns: Vec<Option<usize>> = if flags.n.is_empty() {
        vec![None]
    } else {
        flags.n.iter().copied().map(Some).collect()
    };

    let mut grid = Vec::new();
    for &d in &flags.d {
        for &epsilon in &or_default(&flags.epsilon, 0.5) {
            for &n_override in &ns {
                for &trials in &or_default(&flags.trials, default_trials(command)) {
                    for &m in &or_default(&flags.m, default_m) {
                        grid.push(ExperimentConfig {
                            command,
                            d,
                            epsilon,
                            n_override,
                            trials,
                            input_family: flags.family.unwrap_or(Family::ProductPure),
                            m,
                            seed: flags.seed,
                            perfect: flags.perfect,
                            output_format: flags.format,
                            output_path: flags.output.clone(),
                        });
                    }
                }
            }
        }
    }
    for cfg in &grid {
        cfg.validate()?;
    }
    Ok(grid)
}
