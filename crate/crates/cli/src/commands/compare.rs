//! Side-by-side QFI, visibility and Fisher rate of the three strategies.

use thermoq::estimation::{fisher_rate, strategy_envelope, strategy_qfi, ProtocolParams, Strategy};
use thermoq::physics::{angular, ThermalModeSpec};

use super::{nonnegative_integer, par_map, CliError, Outcome};
use crate::config::{SweepConfig, Unit};
use crate::output::{Cell, Table};

pub fn run(cfg: &SweepConfig) -> Result<Outcome, CliError> {
    cfg.only_fixed(&["omega_a", "kappa_a", "T", "lambda", "alpha", "chi_a", "tau_oh", "nu"])?;
    let taus = cfg.require_axes(&[("tau", Unit::Second)])?.remove(0);
    let thermal = ThermalModeSpec::at_temperature(
        angular(cfg.scalar("omega_a", Unit::Hz)?),
        angular(cfg.scalar("kappa_a", Unit::Hz)?),
        cfg.scalar("T", Unit::Kelvin)?,
    )?;
    let params = ProtocolParams::new(
        angular(cfg.scalar("lambda", Unit::Hz)?),
        0.0,
        nonnegative_integer(cfg, "nu", 1)?,
        cfg.scalar_or("tau_oh", Unit::Second, 0.0)?,
        cfg.scalar("alpha", Unit::Dimensionless)?,
    )?
    .with_chi_a(angular(cfg.scalar("chi_a", Unit::Hz)?));

    let rows = par_map(taus.len(), |i| {
        let tau = taus[i];
        let p = params.with_tau(tau);
        let mut row: Vec<Cell> = vec![tau.into()];
        let mut vis = Vec::new();
        let mut rates = Vec::new();
        for s in Strategy::ALL {
            let f = strategy_qfi(s, &thermal, &p)?;
            row.push(f.into());
            vis.push(strategy_envelope(s, &thermal, &p)?.amplitude);
            rates.push(fisher_rate(|_| f, tau, params.tau_oh).unwrap_or(0.0));
        }
        row.extend(vis.into_iter().map(Cell::from));
        row.extend(rates.into_iter().map(Cell::from));
        Ok(row)
    })?;
    let mut table = Table::new(
        "",
        &[
            "tau_s",
            "qfi_coherence",
            "qfi_phase",
            "qfi_qubit",
            "vis_coherence",
            "vis_phase",
            "vis_qubit",
            "rate_coherence",
            "rate_phase",
            "rate_qubit",
        ],
    );
    table.rows = rows;
    let mut violations = Vec::new();
    if let Some(v) = table.numbers("vis_phase") {
        if v.iter().any(|&x| x != 1.0) {
            violations.push("phase-strategy visibility differs from 1".into());
        }
    }
    Ok(Outcome {
        tables: vec![table],
        violations,
        ..Outcome::default()
    })
}
