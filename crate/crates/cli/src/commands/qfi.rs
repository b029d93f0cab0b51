//! (T, τ) QFI heatmaps for the three strategies.

use thermoq::estimation::{
    optimal_tau, qfi_coherence, qfi_phase, qfi_qubit_only, sensitivity, strategy_envelope, ProtocolParams, Strategy,
    TauObjective,
};
use thermoq::physics::{angular, ThermalModeSpec};

use super::{check_strategy, nonnegative_integer, par_map, CliError, Outcome};
use crate::config::{SweepConfig, Unit};
use crate::output::{Cell, Table};

struct Grid {
    temps: Vec<f64>,
    taus: Vec<f64>,
}

impl Grid {
    fn from(cfg: &SweepConfig) -> Result<Self, CliError> {
        let mut axes = cfg.require_axes(&[("T", Unit::Kelvin), ("tau", Unit::Second)])?;
        let taus = axes.pop().unwrap_or_default();
        let temps = axes.pop().unwrap_or_default();
        Ok(Self { temps, taus })
    }

    fn points(&self) -> usize {
        self.temps.len() * self.taus.len()
    }

    fn at(&self, flat: usize) -> (f64, f64) {
        let n = self.taus.len();
        (self.temps[flat / n], self.taus[flat % n])
    }

    fn tau_bracket(&self) -> (f64, f64) {
        let lo = self.taus.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self.taus.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }
}

/// Per-temperature optimum of the QFI over the τ axis range.
fn optimum_table(
    strategy: Strategy,
    grid: &Grid,
    mode: impl Fn(f64) -> Result<ThermalModeSpec, CliError> + Sync,
    params: &ProtocolParams,
) -> Result<Table, CliError> {
    let (lo, hi) = grid.tau_bracket();
    let rows = par_map(grid.temps.len(), |i| {
        let t = grid.temps[i];
        let thermal = mode(t)?;
        let (tau, qfi, at_endpoint) = if hi > lo {
            let opt = optimal_tau(strategy, &thermal, params, (lo, hi), TauObjective::Qfi)?;
            (opt.tau, opt.objective_value, opt.at_endpoint)
        } else {
            let q = thermoq::estimation::strategy_qfi(strategy, &thermal, &params.with_tau(lo))?;
            (lo, q, true)
        };
        Ok(vec![
            Cell::Num(t),
            Cell::Num(tau),
            Cell::Num(sensitivity(qfi, params.nu)),
            Cell::from(at_endpoint),
        ])
    })?;
    let mut table = Table::new("optimal", &["T_K", "tau_opt_s", "deltaT_min_K", "at_endpoint"]);
    table.rows = rows;
    Ok(table)
}

pub fn coherence(cfg: &SweepConfig) -> Result<Outcome, CliError> {
    check_strategy(cfg, Strategy::CoherenceMediated)?;
    cfg.only_fixed(&["omega_a", "lambda", "alpha", "nu", "kappa_a"])?;
    let grid = Grid::from(cfg)?;
    let omega_a = angular(cfg.scalar("omega_a", Unit::Hz)?);
    let kappa_a = angular(cfg.scalar_or("kappa_a", Unit::Hz, 0.0)?);
    let lambda = angular(cfg.scalar("lambda", Unit::Hz)?);
    let alpha = cfg.scalar("alpha", Unit::Dimensionless)?;
    let nu = nonnegative_integer(cfg, "nu", 1)?;
    let params = ProtocolParams::new(lambda, 0.0, nu, 0.0, alpha)?;
    let mode =
        |t: f64| -> Result<ThermalModeSpec, CliError> { Ok(ThermalModeSpec::at_temperature(omega_a, kappa_a, t)?) };

    let rows = par_map(grid.points(), |i| {
        let (t, tau) = grid.at(i);
        let thermal = mode(t)?;
        let p = params.with_tau(tau);
        let r = qfi_coherence(&thermal, &p)?;
        let c = strategy_envelope(Strategy::CoherenceMediated, &thermal, &p)?.amplitude;
        Ok(vec![t.into(), tau.into(), r.qfi.into(), c.into(), r.sensitivity.into()])
    })?;
    let mut main = Table::new("", &["T_K", "tau_s", "qfi_per_K2", "C", "deltaT_K"]);
    main.rows = rows;
    let optimal = optimum_table(Strategy::CoherenceMediated, &grid, mode, &params)?;
    Ok(Outcome {
        tables: vec![main, optimal],
        ..Outcome::default()
    })
}

pub fn phase(cfg: &SweepConfig) -> Result<Outcome, CliError> {
    check_strategy(cfg, Strategy::PhaseShift)?;
    cfg.only_fixed(&["omega_a", "lambda", "nu"])?;
    let grid = Grid::from(cfg)?;
    let omega_a = angular(cfg.scalar("omega_a", Unit::Hz)?);
    let lambda = angular(cfg.scalar("lambda", Unit::Hz)?);
    let nu = nonnegative_integer(cfg, "nu", 1)?;
    if nu == 0 {
        return Err(crate::config::ConfigError::general("`nu` must be at least 1").into());
    }
    let rows = par_map(grid.points(), |i| {
        let (t, tau) = grid.at(i);
        let thermal = ThermalModeSpec::at_temperature(omega_a, 0.0, t)?;
        let r = qfi_phase(&thermal, lambda, tau)?.with_nu(nu);
        Ok(vec![t.into(), tau.into(), r.qfi.into(), r.sensitivity.into()])
    })?;
    let mut main = Table::new("", &["T_K", "tau_s", "qfi_per_K2", "deltaT_K"]);
    main.rows = rows;
    Ok(Outcome {
        tables: vec![main],
        ..Outcome::default()
    })
}

pub fn qubit(cfg: &SweepConfig) -> Result<Outcome, CliError> {
    check_strategy(cfg, Strategy::QubitOnly)?;
    cfg.only_fixed(&["omega_a", "chi_a", "kappa_a", "nu"])?;
    let grid = Grid::from(cfg)?;
    let omega_a = angular(cfg.scalar("omega_a", Unit::Hz)?);
    let kappa_a = angular(cfg.scalar("kappa_a", Unit::Hz)?);
    let chi_a = angular(cfg.scalar("chi_a", Unit::Hz)?);
    let nu = nonnegative_integer(cfg, "nu", 1)?;
    let params = ProtocolParams::new(0.0, 0.0, nu, 0.0, 0.0)?.with_chi_a(chi_a);
    let mode =
        |t: f64| -> Result<ThermalModeSpec, CliError> { Ok(ThermalModeSpec::at_temperature(omega_a, kappa_a, t)?) };

    let rows = par_map(grid.points(), |i| {
        let (t, tau) = grid.at(i);
        let thermal = mode(t)?;
        let r = qfi_qubit_only(&thermal, chi_a, tau)?.with_nu(nu);
        let c = strategy_envelope(Strategy::QubitOnly, &thermal, &params.with_tau(tau))?.amplitude;
        Ok(vec![t.into(), tau.into(), r.qfi.into(), c.into(), r.sensitivity.into()])
    })?;
    let mut main = Table::new("", &["T_K", "tau_s", "qfi_per_K2", "C", "deltaT_K"]);
    main.rows = rows;
    let optimal = optimum_table(Strategy::QubitOnly, &grid, mode, &params)?;
    Ok(Outcome {
        tables: vec![main, optimal],
        ..Outcome::default()
    })
}
