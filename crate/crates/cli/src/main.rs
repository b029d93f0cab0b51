use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thermoq_cli::{execute, CliError, Command, RunOptions};

#[derive(Parser)]
#[command(
    name = "thermoq",
    version,
    about = "Quantum thermometry sweeps and oracle validation"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Args, Clone)]
struct Common {
    /// Sweep configuration, or a manifest from an earlier run
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Primary CSV output path
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Master seed for Monte Carlo streams
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,
    /// Monte Carlo shots per estimate
    #[arg(long, value_name = "N")]
    shots: Option<usize>,
    /// Worker threads (0: one per core)
    #[arg(long, value_name = "N", env = "THERMOQ_WORKERS", default_value_t = 0)]
    workers: usize,
}

#[derive(Args, Clone)]
struct ValidateArgs {
    #[command(flatten)]
    common: Common,
    /// Multiplies every hard tolerance
    #[arg(long, hide = true)]
    tolerance_scale: Option<f64>,
}

#[derive(Subcommand)]
enum Sub {
    /// Coherence-mediated QFI over (T, tau) plus the optimal-tau line
    QfiCoherence(Common),
    /// Phase-shift QFI over (T, tau)
    QfiPhase(Common),
    /// Qubit-only QFI over (T, tau) plus the optimal-tau line
    QfiQubit(Common),
    /// Perturbative cross-Kerr map over (chi_a1, chi_b2) with contour points
    CouplerMap(Common),
    /// Exact diagonalization against the perturbative cross-Kerr
    CouplerValidate(Common),
    /// Ramsey visibility under parasitic dispersive couplings
    Visibility(Common),
    /// QFI, visibility and Fisher rate of all strategies versus tau
    Compare(Common),
    /// Monte Carlo against closed forms and exact references
    McValidate(Common),
    /// Full oracle suite with hard checks and soft findings
    Validate(ValidateArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (command, common, tolerance_scale) = match cli.command {
        Sub::QfiCoherence(c) => (Command::QfiCoherence, c, None),
        Sub::QfiPhase(c) => (Command::QfiPhase, c, None),
        Sub::QfiQubit(c) => (Command::QfiQubit, c, None),
        Sub::CouplerMap(c) => (Command::CouplerMap, c, None),
        Sub::CouplerValidate(c) => (Command::CouplerValidate, c, None),
        Sub::Visibility(c) => (Command::Visibility, c, None),
        Sub::Compare(c) => (Command::Compare, c, None),
        Sub::McValidate(c) => (Command::McValidate, c, None),
        Sub::Validate(v) => (Command::Validate, v.common, v.tolerance_scale),
    };
    let opts = RunOptions {
        config: common.config,
        out: common.out,
        seed: common.seed,
        shots: common.shots,
        workers: common.workers,
        tolerance_scale,
    };
    let result = execute(command, &opts).and_then(|summary| {
        if let Some(report) = &summary.outcome.report {
            print!("{report}");
        }
        eprintln!("wrote {}", summary.manifest_path.display());
        if summary.outcome.violations.is_empty() {
            Ok(())
        } else {
            for v in &summary.outcome.violations {
                eprintln!("violation: {v}");
            }
            Err(CliError::Numerical(format!(
                "{} hard invariant(s) failed",
                summary.outcome.violations.len()
            )))
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("thermoq: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
