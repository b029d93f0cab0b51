//! Parameter sweeps and validation runs for `thermoq`, with deterministic
//! CSV output and run manifests.

pub mod checks;
pub mod commands;
pub mod config;
pub mod output;
pub mod run;

pub use commands::{CliError, Command, Context, Outcome};
pub use config::{ConfigError, SweepConfig};
pub use run::{execute, RunOptions, RunSummary};
