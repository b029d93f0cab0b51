//! Subcommand implementations. Each command turns a validated
//! configuration into tables; the driver in `main` handles files.

use std::fmt;

use rayon::prelude::*;
use thermoq::ThermoError;

use crate::config::{ConfigError, SweepConfig};
use crate::output::Table;

mod compare;
mod coupler;
mod mc;
mod qfi;
mod validate;
mod visibility;

/// Failure classes, each with its own process exit code.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Config(ConfigError),
    Numerical(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "config error: {e}"),
            CliError::Numerical(m) => write!(f, "numerical contract violation: {m}"),
            CliError::Io(m) => write!(f, "I/O error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<ThermoError> for CliError {
    fn from(e: ThermoError) -> Self {
        match e {
            ThermoError::Domain { .. } | ThermoError::InvalidArgument(_) => {
                CliError::Config(ConfigError::general(e.to_string()))
            }
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

/// Run-wide settings resolved from flags and configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Context {
    pub seed: u64,
    pub shots: usize,
    /// Multiplies every hard tolerance in `validate`; a test hook.
    pub tolerance_scale: f64,
}

/// Everything a command produces.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub tables: Vec<Table>,
    /// Human-readable report printed to stdout.
    pub report: Option<String>,
    /// Machine-readable report written as `<stem>.json`.
    pub json: Option<String>,
    /// Hard invariant failures; nonempty means exit code 2.
    pub violations: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, clap::ValueEnum)]
pub enum Command {
    QfiCoherence,
    QfiPhase,
    QfiQubit,
    CouplerMap,
    CouplerValidate,
    Visibility,
    Compare,
    McValidate,
    Validate,
}

impl Command {
    pub const ALL: [Command; 9] = [
        Command::QfiCoherence,
        Command::QfiPhase,
        Command::QfiQubit,
        Command::CouplerMap,
        Command::CouplerValidate,
        Command::Visibility,
        Command::Compare,
        Command::McValidate,
        Command::Validate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::QfiCoherence => "qfi-coherence",
            Command::QfiPhase => "qfi-phase",
            Command::QfiQubit => "qfi-qubit",
            Command::CouplerMap => "coupler-map",
            Command::CouplerValidate => "coupler-validate",
            Command::Visibility => "visibility",
            Command::Compare => "compare",
            Command::McValidate => "mc-validate",
            Command::Validate => "validate",
        }
    }

    pub fn from_name(s: &str) -> Option<Command> {
        Command::ALL.into_iter().find(|c| c.name() == s)
    }

    /// Built-in configuration used when no `--config` is given.
    pub fn default_config(self) -> &'static str {
        match self {
            Command::QfiCoherence => include_str!("../../configs/qfi-coherence.conf"),
            Command::QfiPhase => include_str!("../../configs/qfi-phase.conf"),
            Command::QfiQubit => include_str!("../../configs/qfi-qubit.conf"),
            Command::CouplerMap => include_str!("../../configs/coupler-map.conf"),
            Command::CouplerValidate => include_str!("../../configs/coupler-validate.conf"),
            Command::Visibility => include_str!("../../configs/visibility.conf"),
            Command::Compare => include_str!("../../configs/compare.conf"),
            Command::McValidate => include_str!("../../configs/mc-validate.conf"),
            Command::Validate => include_str!("../../configs/validate.conf"),
        }
    }

    /// Whether the command draws random numbers.
    pub fn uses_shots(self) -> bool {
        matches!(self, Command::McValidate | Command::Validate)
    }

    pub fn default_shots(self) -> usize {
        match self {
            Command::McValidate | Command::Validate => 100_000,
            _ => 0,
        }
    }

    pub fn run(self, cfg: &SweepConfig, ctx: &Context) -> Result<Outcome, CliError> {
        if let Some(c) = &cfg.command {
            if c != self.name() {
                return Err(ConfigError::general(format!("configuration is for `{c}`, not `{}`", self.name())).into());
            }
        }
        match self {
            Command::QfiCoherence => qfi::coherence(cfg),
            Command::QfiPhase => qfi::phase(cfg),
            Command::QfiQubit => qfi::qubit(cfg),
            Command::CouplerMap => coupler::map(cfg),
            Command::CouplerValidate => coupler::validate(cfg),
            Command::Visibility => visibility::run(cfg),
            Command::Compare => compare::run(cfg),
            Command::McValidate => mc::run(cfg, ctx),
            Command::Validate => validate::run(cfg, ctx),
        }
    }
}

/// Ordered parallel map over a flat index range. Results come back in index
/// order whatever the scheduling, so output never depends on worker count.
pub(crate) fn par_map<T, F>(len: usize, f: F) -> Result<Vec<T>, CliError>
where
    T: Send,
    F: Fn(usize) -> Result<T, CliError> + Sync + Send,
{
    (0..len).into_par_iter().map(f).collect()
}

/// Errors unless the named strategy matches the command's own.
pub(crate) fn check_strategy(cfg: &SweepConfig, expected: thermoq::estimation::Strategy) -> Result<(), CliError> {
    if let Some(s) = &cfg.strategy {
        let parsed: thermoq::estimation::Strategy = s
            .parse()
            .map_err(|e: ThermoError| ConfigError::general(e.to_string()))?;
        if parsed != expected {
            return Err(ConfigError::general(format!("strategy `{s}` does not match this command")).into());
        }
    }
    Ok(())
}

pub(crate) fn nonnegative_integer(cfg: &SweepConfig, name: &str, default: u64) -> Result<u64, CliError> {
    let v = cfg.scalar_or(name, crate::config::Unit::Dimensionless, default as f64)?;
    if !(v >= 0.0 && v.fract() == 0.0 && v <= u64::MAX as f64) {
        let line = cfg.fixed.get(name).map(|q| q.line);
        return Err(CliError::Config(ConfigError {
            line,
            message: format!("`{name}` must be a nonnegative integer"),
        }));
    }
    Ok(v as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_configs_parse_and_name_their_command() {
        for c in Command::ALL {
            let cfg = SweepConfig::parse(c.default_config()).unwrap_or_else(|e| panic!("{}: {e}", c.name()));
            assert_eq!(cfg.command.as_deref(), Some(c.name()));
            assert_eq!(Command::from_name(c.name()), Some(c));
        }
    }
}
