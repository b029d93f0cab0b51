//! Browser bindings for the demo page in `www/`.
//!
//! Every export returns a flat `Float64Array`; the layouts are documented per
//! function. Frequencies are in Hz, times in seconds, temperatures in kelvin.

use thermoq::coupler::lambda_perturbative;
use thermoq::estimation::{optimal_tau, sensitivity, strategy_qfi, ProtocolParams, Strategy, TauObjective};
use thermoq::physics::{angular, hertz, ThermalModeSpec};
use wasm_bindgen::prelude::*;

fn log_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>, String> {
    if !(lo > 0.0 && hi > lo && hi.is_finite()) || n < 2 {
        return Err(format!(
            "need 0 < lo < hi and at least 2 points, got [{lo}, {hi}] with {n}"
        ));
    }
    Ok((0..n)
        .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp())
        .collect())
}

fn text<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// `[tau_0..tau_n, qfi_0..qfi_n, tau_opt, deltaT_min]`
#[allow(clippy::too_many_arguments)]
pub fn coherence_curve(
    freq_a_hz: f64,
    temperature: f64,
    lambda_hz: f64,
    alpha: f64,
    nu: u32,
    tau_lo: f64,
    tau_hi: f64,
    points: usize,
) -> Result<Vec<f64>, String> {
    let thermal = ThermalModeSpec::from_hz(freq_a_hz, 0.0, temperature).map_err(text)?;
    let params = ProtocolParams::new(angular(lambda_hz), 0.0, u64::from(nu.max(1)), 0.0, alpha).map_err(text)?;
    let taus = log_grid(tau_lo, tau_hi, points)?;
    let mut out = taus.clone();
    for &tau in &taus {
        out.push(strategy_qfi(Strategy::CoherenceMediated, &thermal, &params.with_tau(tau)).map_err(text)?);
    }
    let opt = optimal_tau(
        Strategy::CoherenceMediated,
        &thermal,
        &params,
        (tau_lo, tau_hi),
        TauObjective::Qfi,
    )
    .map_err(text)?;
    out.push(opt.tau);
    out.push(sensitivity(opt.objective_value, params.nu));
    Ok(out)
}

/// Row-major `points × points` grid of λ in Hz; row i is χ_a1 = i·step,
/// column j is χ_b2 = j·step, step = chi_max/(points-1).
pub fn lambda_grid(j_xy_hz: f64, delta_12_hz: f64, chi_max_hz: f64, points: usize) -> Result<Vec<f64>, String> {
    if points < 2 || chi_max_hz.is_nan() || chi_max_hz <= 0.0 {
        return Err("need chi_max > 0 and at least 2 points".into());
    }
    let step = angular(chi_max_hz) / (points - 1) as f64;
    let (j, d) = (angular(j_xy_hz), angular(delta_12_hz));
    let mut out = Vec::with_capacity(points * points);
    for a in 0..points {
        for b in 0..points {
            out.push(hertz(
                lambda_perturbative(a as f64 * step, b as f64 * step, j, d).map_err(text)?,
            ));
        }
    }
    Ok(out)
}

/// `[taus, qfi_coherence, qfi_phase, qfi_qubit]`, each `points` long.
#[allow(clippy::too_many_arguments)]
pub fn strategy_curves(
    freq_a_hz: f64,
    kappa_a_hz: f64,
    temperature: f64,
    lambda_hz: f64,
    alpha: f64,
    chi_a_hz: f64,
    tau_lo: f64,
    tau_hi: f64,
    points: usize,
) -> Result<Vec<f64>, String> {
    let thermal = ThermalModeSpec::from_hz(freq_a_hz, kappa_a_hz, temperature).map_err(text)?;
    let params = ProtocolParams::new(angular(lambda_hz), 0.0, 1, 0.0, alpha)
        .map_err(text)?
        .with_chi_a(angular(chi_a_hz));
    let taus = log_grid(tau_lo, tau_hi, points)?;
    let mut out = taus.clone();
    for s in Strategy::ALL {
        for &tau in &taus {
            out.push(strategy_qfi(s, &thermal, &params.with_tau(tau)).map_err(text)?);
        }
    }
    Ok(out)
}

#[wasm_bindgen(js_name = coherenceCurve)]
#[allow(clippy::too_many_arguments)]
pub fn coherence_curve_js(
    freq_a_hz: f64,
    temperature: f64,
    lambda_hz: f64,
    alpha: f64,
    nu: u32,
    tau_lo: f64,
    tau_hi: f64,
    points: usize,
) -> Result<Vec<f64>, JsError> {
    coherence_curve(freq_a_hz, temperature, lambda_hz, alpha, nu, tau_lo, tau_hi, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = lambdaGrid)]
pub fn lambda_grid_js(j_xy_hz: f64, delta_12_hz: f64, chi_max_hz: f64, points: usize) -> Result<Vec<f64>, JsError> {
    lambda_grid(j_xy_hz, delta_12_hz, chi_max_hz, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = strategyCurves)]
#[allow(clippy::too_many_arguments)]
pub fn strategy_curves_js(
    freq_a_hz: f64,
    kappa_a_hz: f64,
    temperature: f64,
    lambda_hz: f64,
    alpha: f64,
    chi_a_hz: f64,
    tau_lo: f64,
    tau_hi: f64,
    points: usize,
) -> Result<Vec<f64>, JsError> {
    strategy_curves(
        freq_a_hz,
        kappa_a_hz,
        temperature,
        lambda_hz,
        alpha,
        chi_a_hz,
        tau_lo,
        tau_hi,
        points,
    )
    .map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coherence_layout_and_optimum() {
        let v = coherence_curve(1e9, 10e-3, 50e3, 2.0, 10_000, 1e-7, 1e-3, 50).unwrap();
        assert_eq!(v.len(), 102);
        let (tau_opt, dt) = (v[100], v[101]);
        assert!((3e-6..=30e-6).contains(&tau_opt));
        assert!((40e-6..=80e-6).contains(&dt));
        assert!(v[50..100].iter().all(|q| q.is_finite() && *q >= 0.0));
    }

    #[test]
    fn lambda_grid_zero_edges_and_symmetry() {
        let g = lambda_grid(30e6, 180e6, 10e6, 11).unwrap();
        assert!(g[..11].iter().all(|&x| x == 0.0));
        assert!((0..11).all(|i| g[i * 11] == 0.0));
        for a in 0..11 {
            for b in 0..11 {
                assert_eq!(g[a * 11 + b], g[b * 11 + a]);
            }
        }
    }

    #[test]
    fn strategy_layout() {
        let v = strategy_curves(1e9, 1e3, 10e-3, 50e3, 2.0, 20e3, 1e-7, 1e-2, 20).unwrap();
        assert_eq!(v.len(), 80);
        // phase-shift QFI grows as τ²
        let r = v[40 + 19] / v[40];
        assert!((r / 1e10 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn bad_input_is_an_error() {
        assert!(coherence_curve(1e9, 10e-3, 50e3, 2.0, 1, 1e-3, 1e-7, 10).is_err());
        assert!(lambda_grid(30e6, 180e6, 10e6, 1).is_err());
    }
}
