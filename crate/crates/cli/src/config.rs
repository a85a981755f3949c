use std::path::PathBuf;

use aqss_core::analysis::InputFamily;
use aqss_core::channels::required_n;
use aqss_core::protocol::MAX_JOINT_DIM;
use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Largest channel size any command will sample.
pub const MAX_N: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Randomize,
    AqssDemo,
    BoundSweep,
    PurityCheck,
    KeyCost,
    LoccTest,
    Multiparty,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Randomize => "randomize",
            Command::AqssDemo => "aqss-demo",
            Command::BoundSweep => "bound-sweep",
            Command::PurityCheck => "purity-check",
            Command::KeyCost => "key-cost",
            Command::LoccTest => "locc-test",
            Command::Multiparty => "multiparty",
        }
    }

    /// Commands that never build matrices.
    fn accounting_only(self) -> bool {
        matches!(self, Command::KeyCost)
    }

    fn min_trials(self) -> usize {
        match self {
            Command::BoundSweep => 10,
            Command::PurityCheck => 30,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    ProductPure,
    Separable,
    MaxEntangled,
}

impl From<Family> for InputFamily {
    fn from(f: Family) -> Self {
        match f {
            Family::ProductPure => InputFamily::ProductPure,
            Family::Separable => InputFamily::Separable,
            Family::MaxEntangled => InputFamily::MaxEntangled,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, ValueEnum, Default)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

/// One fully resolved experiment (a single grid point).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub command: Command,
    pub d: usize,
    pub epsilon: f64,
    pub n_override: Option<usize>,
    pub trials: usize,
    pub input_family: Family,
    pub m: usize,
    pub seed: u64,
    pub perfect: bool,
    pub output_format: OutputFormat,
    pub output_path: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Channel size per receiver: `--n`, the Weyl-Heisenberg size `d^2`
    /// with `--perfect`, or `required_n(d, epsilon)`.
    pub fn channel_size(&self) -> Result<usize, CliError> {
        if self.perfect {
            return Ok(self.d * self.d);
        }
        match self.n_override {
            Some(n) => Ok(n),
            None => required_n(self.d, self.epsilon).map_err(|e| CliError::Usage(e.to_string())),
        }
    }

    /// Checks preconditions and resource guards without running anything.
    pub fn validate(&self) -> Result<(), CliError> {
        let usage = |msg: String| Err(CliError::Usage(msg));
        if self.d < 2 {
            return usage(format!("--d must be at least 2, got {}", self.d));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return usage(format!("--epsilon must lie in (0, 1), got {}", self.epsilon));
        }
        if self.n_override == Some(0) {
            return usage("--n must be positive".into());
        }
        if self.perfect && self.n_override.is_some() {
            return usage("--perfect fixes n = d^2 and cannot be combined with --n".into());
        }
        if self.perfect && matches!(self.command, Command::KeyCost | Command::PurityCheck) {
            return usage(format!("--perfect is not supported by {}", self.command.name()));
        }
        if self.trials < self.command.min_trials() {
            return usage(format!(
                "{} needs --trials >= {}, got {}",
                self.command.name(),
                self.command.min_trials(),
                self.trials
            ));
        }
        match self.command {
            Command::Multiparty if self.m < 3 => return usage(format!("multiparty needs --m >= 3, got {}", self.m)),
            Command::Multiparty | Command::KeyCost => {
                if self.m < 2 {
                    return usage(format!("--m must be at least 2, got {}", self.m));
                }
            }
            _ if self.m != 2 => {
                return usage(format!(
                    "{} is bipartite; --m is only valid for multiparty and key-cost",
                    self.command.name()
                ))
            }
            _ => {}
        }

        let n = self.channel_size()?;
        if self.command.accounting_only() {
            return Ok(());
        }
        let joint = u32::try_from(self.m).ok().and_then(|m| self.d.checked_pow(m));
        match joint {
            Some(j) if j <= MAX_JOINT_DIM => {}
            _ => {
                return Err(CliError::Resource(format!(
                    "d^m = {}^{} exceeds the limit {MAX_JOINT_DIM}",
                    self.d, self.m
                )))
            }
        }
        if n > MAX_N {
            return Err(CliError::Resource(format!(
                "n = {n} exceeds the limit {MAX_N} (lower it with --n or raise --epsilon)"
            )));
        }
        Ok(())
    }
}
