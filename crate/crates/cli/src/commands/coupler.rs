//! Cross-Kerr maps and the exact-diagonalization cross-check.

use thermoq::coupler::{
    chi_product_for_lambda, inverse_purcell, lambda_exact_report, lambda_perturbative, CouplerCircuit, FockTruncation,
};
use thermoq::physics::{angular, hertz};

use super::{nonnegative_integer, par_map, CliError, Outcome};
use crate::config::{SweepConfig, Unit};
use crate::output::{Cell, Table};

const DEFAULT_LEVELS: [f64; 5] = [10e3, 20e3, 30e3, 40e3, 50e3];

/// Tolerance for a contour crossing to sit on its level.
const CONTOUR_TOLERANCE: f64 = 1e-3;

pub fn map(cfg: &SweepConfig) -> Result<Outcome, CliError> {
    cfg.only_fixed(&["j_xy", "delta_12", "contour_levels"])?;
    let mut axes = cfg.require_axes(&[("chi_a1", Unit::Hz), ("chi_b2", Unit::Hz)])?;
    let chi_b2s = axes.pop().unwrap_or_default();
    let chi_a1s = axes.pop().unwrap_or_default();
    let j = angular(cfg.scalar("j_xy", Unit::Hz)?);
    let delta = angular(cfg.scalar("delta_12", Unit::Hz)?);
    let levels = if cfg.fixed.contains_key("contour_levels") {
        cfg.list("contour_levels", Unit::Hz)?
    } else {
        DEFAULT_LEVELS.to_vec()
    };
    let lambda_hz =
        |a: f64, b: f64| -> Result<f64, CliError> { Ok(hertz(lambda_perturbative(angular(a), angular(b), j, delta)?)) };

    let nb = chi_b2s.len();
    let rows = par_map(chi_a1s.len() * nb, |i| {
        let (a, b) = (chi_a1s[i / nb], chi_b2s[i % nb]);
        Ok(vec![a.into(), b.into(), lambda_hz(a, b)?.into()])
    })?;
    let mut main = Table::new("", &["chi_a1_Hz", "chi_b2_Hz", "lambda_Hz"]);
    main.rows = rows;

    // Crossing of each level with every χ_a1 grid line inside the χ_b2 range.
    let (b_lo, b_hi) = bounds(&chi_b2s);
    let mut contours = Table::new(
        "contours",
        &["level_Hz", "chi_a1_Hz", "chi_b2_Hz", "chi_product_Hz2", "lambda_Hz"],
    );
    let mut violations = Vec::new();
    for &level in &levels {
        let product = hertz(hertz(chi_product_for_lambda(angular(level), j, delta)?));
        for &a in &chi_a1s {
            if a == 0.0 {
                continue;
            }
            let b = product / a;
            if !(b_lo..=b_hi).contains(&b) {
                continue;
            }
            let lam = lambda_hz(a, b)?;
            if ((lam - level) / level).abs() > CONTOUR_TOLERANCE {
                violations.push(format!("contour {level} Hz: point ({a}, {b}) gives {lam} Hz"));
            }
            contours.push(vec![level.into(), a.into(), b.into(), product.into(), lam.into()]);
        }
    }
    Ok(Outcome {
        tables: vec![main, contours],
        violations,
        ..Outcome::default()
    })
}

fn bounds(v: &[f64]) -> (f64, f64) {
    (
        v.iter().copied().fold(f64::INFINITY, f64::min),
        v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    )
}

/// Circuit assembled from the `[fixed]` block, couplings set by ratios.
pub(crate) fn circuit_from(cfg: &SweepConfig) -> Result<CouplerCircuit, CliError> {
    Ok(CouplerCircuit::from_ratios(
        angular(cfg.scalar("omega_a", Unit::Hz)?),
        angular(cfg.scalar("omega_b", Unit::Hz)?),
        angular(cfg.scalar("omega_1", Unit::Hz)?),
        angular(cfg.scalar("omega_2", Unit::Hz)?),
        cfg.scalar("r_arm", Unit::Dimensionless)?,
        cfg.scalar("r_j", Unit::Dimensionless)?,
    )?)
}

/// One row of the coupling-scaling study.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct ScalingRow {
    pub scale: f64,
    pub circuit: CouplerCircuit,
    pub lambda_pert: f64,
    pub lambda_exact: f64,
    pub rel_error: f64,
    pub n_max: usize,
    pub converged: bool,
    pub min_overlap: f64,
}

pub(crate) fn scaling_study(
    base: &CouplerCircuit,
    scales: &[f64],
    trunc: FockTruncation,
) -> Result<Vec<ScalingRow>, CliError> {
    par_map(scales.len(), |i| {
        let s = scales[i];
        let c = base.scaled_couplings(s);
        let exact = lambda_exact_report(&c, trunc)?;
        let pert = c.lambda_perturbative();
        let rel_error = if pert == 0.0 {
            if exact.lambda == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            ((exact.lambda - pert) / pert).abs()
        };
        Ok(ScalingRow {
            scale: s,
            circuit: c,
            lambda_pert: pert,
            lambda_exact: exact.lambda,
            rel_error,
            n_max: exact.n_max,
            converged: exact.converged,
            min_overlap: exact.min_overlap,
        })
    })
}

pub fn validate(cfg: &SweepConfig) -> Result<Outcome, CliError> {
    cfg.only_fixed(&[
        "omega_a", "omega_b", "omega_1", "omega_2", "r_arm", "r_j", "scale", "n_max", "t1",
    ])?;
    if !cfg.axes.is_empty() {
        return Err(crate::config::ConfigError::at(cfg.axes[0].line, "coupler-validate takes no axes").into());
    }
    let base = circuit_from(cfg)?;
    let scales = if cfg.fixed.contains_key("scale") {
        cfg.list("scale", Unit::Dimensionless)?
    } else {
        vec![1.0, 0.5, 0.25]
    };
    let n_max = nonnegative_integer(cfg, "n_max", FockTruncation::DEFAULT.n_max as u64)?;
    let trunc = FockTruncation::new(n_max as usize)?;
    let t1 = cfg.scalar_or("t1", Unit::Second, 50e-6)?;

    let mut table = Table::new(
        "",
        &[
            "scale",
            "g_a1_Hz",
            "g_b2_Hz",
            "j_xy_Hz",
            "chi_a1_Hz",
            "chi_b2_Hz",
            "lambda_pert_Hz",
            "lambda_exact_Hz",
            "rel_error",
            "n_max",
            "converged",
            "min_overlap",
            "inverse_purcell_a_Hz",
            "inverse_purcell_b_Hz",
        ],
    );
    let mut report = String::from("scale  lambda_pert_Hz  lambda_exact_Hz  rel_error\n");
    for r in scaling_study(&base, &scales, trunc)? {
        let c = &r.circuit;
        let row: Vec<Cell> = vec![
            r.scale.into(),
            hertz(c.g_a1).into(),
            hertz(c.g_b2).into(),
            hertz(c.j_xy).into(),
            hertz(c.chi_a1()).into(),
            hertz(c.chi_b2()).into(),
            hertz(r.lambda_pert).into(),
            hertz(r.lambda_exact).into(),
            r.rel_error.into(),
            r.n_max.into(),
            r.converged.into(),
            r.min_overlap.into(),
            inverse_purcell(c.g_a1, c.delta_a1(), t1)?.into(),
            inverse_purcell(c.g_b2, c.delta_b2(), t1)?.into(),
        ];
        report.push_str(&format!(
            "{:<6} {:>15.6e} {:>16.6e} {:>10.4e}\n",
            r.scale,
            hertz(r.lambda_pert),
            hertz(r.lambda_exact),
            r.rel_error
        ));
        table.push(row);
    }
    Ok(Outcome {
        tables: vec![table],
        report: Some(report),
        ..Outcome::default()
    })
}
