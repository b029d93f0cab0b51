//! Ramsey visibility under parasitic dispersive couplings.
//!
//! Two families: the probe-side shift χ_b sees the displaced-thermal number
//! variance of the probe mode; the thermal-side shift χ_a sees the thermal
//! variance of the mode being measured.

use thermoq::envelopes::parasitic_envelope;
use thermoq::physics::{angular, displaced_thermal_variance, occupancy, thermal_variance};

use super::{CliError, Outcome};
use crate::config::{SweepConfig, Unit};
use crate::output::Table;

pub fn run(cfg: &SweepConfig) -> Result<Outcome, CliError> {
    cfg.only_fixed(&[
        "chi_b", "chi_a", "alpha", "n_bar_b", "kappa_b", "omega_a", "T", "kappa_a",
    ])?;
    let taus = cfg.require_axes(&[("tau_R", Unit::Second)])?.remove(0);
    let families = [
        (
            "chi_b",
            cfg.list("chi_b", Unit::Hz)?,
            displaced_thermal_variance(
                cfg.scalar("n_bar_b", Unit::Dimensionless)?,
                cfg.scalar("alpha", Unit::Dimensionless)?,
            )?,
            angular(cfg.scalar("kappa_b", Unit::Hz)?),
        ),
        (
            "chi_a",
            cfg.list("chi_a", Unit::Hz)?,
            thermal_variance(occupancy(
                angular(cfg.scalar("omega_a", Unit::Hz)?),
                cfg.scalar("T", Unit::Kelvin)?,
            )?)?,
            angular(cfg.scalar("kappa_a", Unit::Hz)?),
        ),
    ];

    let mut table = Table::new("", &["family", "tau_R_s", "chi_Hz", "visibility"]);
    let mut violations = Vec::new();
    let mut order: Vec<usize> = (0..taus.len()).collect();
    order.sort_by(|&i, &j| taus[i].total_cmp(&taus[j]));
    for (name, chis, var_n, kappa) in &families {
        let mut curves = Vec::new();
        for &chi in chis {
            let curve = taus
                .iter()
                .map(|&t| parasitic_envelope(angular(chi), *var_n, *kappa, t))
                .collect::<Result<Vec<f64>, _>>()?;
            for (&t, &v) in taus.iter().zip(&curve) {
                table.push(vec![(*name).into(), t.into(), chi.into(), v.into()]);
            }
            if order.windows(2).any(|w| curve[w[1]] > curve[w[0]]) {
                violations.push(format!("{name} = {chi} Hz: visibility not monotone in tau_R"));
            }
            curves.push((chi.abs(), curve));
        }
        // larger |χ| never gives a higher visibility at the same τ_R
        curves.sort_by(|a, b| a.0.total_cmp(&b.0));
        for pair in curves.windows(2) {
            if (0..taus.len()).any(|k| pair[1].1[k] > pair[0].1[k]) {
                violations.push(format!(
                    "{name}: {} Hz gives higher visibility than {} Hz",
                    pair[1].0, pair[0].0
                ));
            }
        }
    }
    Ok(Outcome {
        tables: vec![table],
        violations,
        ..Outcome::default()
    })
}
