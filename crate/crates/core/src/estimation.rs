//! Quantum Fisher information for the three read-out strategies, the
//! resulting sensitivities, Fisher-information rates and interaction-time
//! optimization.
//!
//! QFI values are per shot, in K⁻². Repetitions only enter through
//! [`sensitivity`].

use std::fmt;

use crate::envelopes::{coherence_envelope_closed, filter_function, CoherencePoint};
use crate::error::{domain, Result, ThermoError};
use crate::numerics::{maximize_log, Maximum};
use crate::physics::ThermalModeSpec;

/// Read-out strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Probe dephasing read out through the probe coherence envelope.
    CoherenceMediated,
    /// Direct tracking of the mean probe phase.
    PhaseShift,
    /// Qubit dispersively coupled to the thermal mode.
    QubitOnly,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::CoherenceMediated, Strategy::PhaseShift, Strategy::QubitOnly];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::CoherenceMediated => "coherence_mediated",
            Strategy::PhaseShift => "phase_shift",
            Strategy::QubitOnly => "qubit_only",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Strategy {
    type Err = ThermoError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "coherence_mediated" | "coherence" => Ok(Strategy::CoherenceMediated),
            "phase_shift" | "phase" => Ok(Strategy::PhaseShift),
            "qubit_only" | "qubit" => Ok(Strategy::QubitOnly),
            other => Err(ThermoError::InvalidArgument(format!("unknown strategy `{other}`"))),
        }
    }
}

/// Protocol settings shared by the strategies. Rates are angular (rad/s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolParams {
    /// Cross-Kerr rate λ.
    pub lambda: f64,
    /// Interaction time τ, s.
    pub tau: f64,
    /// Independent repetitions ν.
    pub nu: u64,
    /// Preparation and read-out overhead per shot, s.
    pub tau_oh: f64,
    /// Coherent probe amplitude |α|.
    pub alpha: f64,
    /// Qubit-thermal dispersive shift χ_a (qubit-only strategy).
    pub chi_a: f64,
}

impl ProtocolParams {
    pub fn new(lambda: f64, tau: f64, nu: u64, tau_oh: f64, alpha: f64) -> Result<Self> {
        let p = Self {
            lambda,
            tau,
            nu,
            tau_oh,
            alpha,
            chi_a: 0.0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_chi_a(mut self, chi_a: f64) -> Self {
        self.chi_a = chi_a;
        self
    }

    pub fn with_tau(mut self, tau: f64) -> Self {
        self.tau = tau;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.nu < 1 {
            return Err(domain("repetitions must be at least 1", self.nu as f64));
        }
        if !(self.tau >= 0.0) {
            return Err(domain("interaction time must be nonnegative", self.tau));
        }
        if !(self.tau_oh >= 0.0) {
            return Err(domain("overhead must be nonnegative", self.tau_oh));
        }
        if !(self.alpha >= 0.0) {
            return Err(domain("coherent amplitude must be nonnegative", self.alpha));
        }
        Ok(())
    }
}

/// QFI together with the sensitivity it implies for `nu` repetitions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QfiResult {
    pub strategy: Strategy,
    /// Per-shot QFI, K⁻².
    pub qfi: f64,
    /// 1/sqrt(ν F), K.
    pub sensitivity: f64,
    pub nu: u64,
    /// Optimal interaction time, when one was searched for.
    pub tau_opt: Option<f64>,
}

impl QfiResult {
    fn new(strategy: Strategy, qfi: f64, nu: u64) -> Self {
        Self {
            strategy,
            qfi,
            sensitivity: sensitivity(qfi, nu),
            nu,
            tau_opt: None,
        }
    }

    /// Recomputes the sensitivity for a different repetition count.
    pub fn with_nu(self, nu: u64) -> Self {
        Self {
            sensitivity: sensitivity(self.qfi, nu),
            nu,
            ..self
        }
    }
}

/// Qubit-state QFI from a complex visibility C e^{iΦ}:
/// (∂C)²/(1 - C²) + C²(∂Φ)².
///
/// At C = 1 the amplitude term is singular: it evaluates to +∞ unless
/// ∂C = 0, in which case only the phase term survives.
pub fn bloch_qfi(c: f64, dc_dt: f64, phi: f64, dphi_dt: f64) -> Result<f64> {
    let _ = phi;
    if !(0.0..=1.0).contains(&c) {
        return Err(domain("coherence amplitude must lie in [0, 1]", c));
    }
    let phase_term = c * c * dphi_dt * dphi_dt;
    if dc_dt == 0.0 {
        return Ok(phase_term);
    }
    if c == 1.0 {
        return Ok(f64::INFINITY);
    }
    Ok(dc_dt * dc_dt / ((1.0 - c) * (1.0 + c)) + phase_term)
}

/// Coherence-mediated QFI using the full variance n̄(n̄+1).
pub fn qfi_coherence(thermal: &ThermalModeSpec, proto: &ProtocolParams) -> Result<QfiResult> {
    proto.validate()?;
    let n = thermal.occupancy();
    let dn = thermal.occupancy_derivative();
    let lt2 = (proto.lambda * proto.tau).powi(2);
    let gamma = lt2 * n * (n + 1.0);
    let dgamma = lt2 * (1.0 + 2.0 * n) * dn;
    let two_a2 = 2.0 * proto.alpha * proto.alpha;
    if gamma == 0.0 || dgamma == 0.0 || two_a2 == 0.0 {
        return Ok(QfiResult::new(Strategy::CoherenceMediated, 0.0, proto.nu));
    }
    // ln C = 2α² expm1(-Γ), so 1 - C² = -expm1(2 ln C) stays accurate as C → 1.
    let ln_c = two_a2 * (-gamma).exp_m1();
    let c = ln_c.exp();
    // |∂C| = C·2α²·e^{-Γ}·Γ', combined in log space so deep saturation does
    // not underflow an intermediate factor
    let dc = -(ln_c + two_a2.ln() - gamma + dgamma.abs().ln()).exp() * dgamma.signum();
    let one_minus_c2 = if 1.0 - c < 1e-12 {
        -(2.0 * ln_c).exp_m1()
    } else {
        (1.0 - c) * (1.0 + c)
    };
    let qfi = dc * dc / one_minus_c2;
    Ok(QfiResult::new(Strategy::CoherenceMediated, qfi, proto.nu))
}

/// Weak-dephasing approximation α²(λτ)² n̄ (ħω_a/k_BT²)².
pub fn qfi_coherence_weak(thermal: &ThermalModeSpec, proto: &ProtocolParams) -> f64 {
    let t = thermal.temperature();
    if t == 0.0 {
        return 0.0;
    }
    let n = thermal.occupancy();
    let slope = crate::physics::HBAR * thermal.omega_a / (crate::physics::K_B * t * t);
    proto.alpha.powi(2) * (proto.lambda * proto.tau).powi(2) * n * slope * slope
}

/// Phase-shift QFI (λτ ∂_T n̄)² in the single-photon normalization.
pub fn qfi_phase(thermal: &ThermalModeSpec, lambda: f64, tau: f64) -> Result<QfiResult> {
    if !(tau >= 0.0) {
        return Err(domain("interaction time must be nonnegative", tau));
    }
    let g = lambda * tau * thermal.occupancy_derivative();
    Ok(QfiResult::new(Strategy::PhaseShift, g * g, 1))
}

/// Pure coherent-state QFI 4|α|²(∂_T φ)².
pub fn qfi_phase_pure_state(alpha: f64, dphi_dt: f64) -> Result<f64> {
    if !(alpha >= 0.0) {
        return Err(domain("coherent amplitude must be nonnegative", alpha));
    }
    Ok(4.0 * alpha * alpha * dphi_dt * dphi_dt)
}

/// Qubit-only QFI, amplitude plus phase contribution.
pub fn qfi_qubit_only(thermal: &ThermalModeSpec, chi_a: f64, tau: f64) -> Result<QfiResult> {
    let f = filter_function(thermal.kappa_a, tau)?;
    let n = thermal.occupancy();
    let dn = thermal.occupancy_derivative();
    let four_chi2 = 4.0 * chi_a * chi_a;
    let gamma = four_chi2 * n * (n + 1.0) * f;
    let dgamma = four_chi2 * f * (1.0 + 2.0 * n) * dn;
    // (∂Γ)² e^{-2Γ}/(1 - e^{-2Γ}) = (∂Γ)²/expm1(2Γ) → (∂Γ)²/(2Γ) as Γ → 0
    let amplitude_term = if gamma == 0.0 || dgamma == 0.0 {
        0.0
    } else if gamma < 1e-10 {
        dgamma * dgamma / (2.0 * gamma) * (1.0 - gamma)
    } else {
        (2.0 * dgamma.abs().ln() - 2.0 * gamma).exp() / -(-2.0 * gamma).exp_m1()
    };
    let dphi = 2.0 * chi_a * tau * dn;
    let phase_term = if dphi == 0.0 {
        0.0
    } else {
        (2.0 * dphi.abs().ln() - 2.0 * gamma).exp()
    };
    Ok(QfiResult::new(Strategy::QubitOnly, amplitude_term + phase_term, 1))
}

/// δT = 1/sqrt(ν F); +∞ when F = 0.
pub fn sensitivity(qfi: f64, nu: u64) -> f64 {
    if qfi <= 0.0 {
        return f64::INFINITY;
    }
    1.0 / (nu as f64 * qfi).sqrt()
}

/// Fisher-information rate F(τ)/(τ + τ_oh).
pub fn fisher_rate<F: Fn(f64) -> f64>(qfi_of_tau: F, tau: f64, tau_oh: f64) -> Result<f64> {
    if !(tau >= 0.0) {
        return Err(domain("interaction time must be nonnegative", tau));
    }
    if !(tau_oh >= 0.0) {
        return Err(domain("overhead must be nonnegative", tau_oh));
    }
    let total = tau + tau_oh;
    if total == 0.0 {
        return Err(domain("total shot time must be positive", total));
    }
    Ok(qfi_of_tau(tau) / total)
}

/// QFI of `strategy` at `params.tau`.
pub fn strategy_qfi(strategy: Strategy, thermal: &ThermalModeSpec, params: &ProtocolParams) -> Result<f64> {
    Ok(match strategy {
        Strategy::CoherenceMediated => qfi_coherence(thermal, params)?.qfi,
        Strategy::PhaseShift => qfi_phase(thermal, params.lambda, params.tau)?.qfi,
        Strategy::QubitOnly => qfi_qubit_only(thermal, params.chi_a, params.tau)?.qfi,
    })
}

/// Complex visibility (C, Φ) of `strategy` at `params.tau`.
///
/// The coherence-mediated envelope carries no temperature-dependent phase;
/// the phase-shift strategy keeps unit visibility with mean phase λτn̄.
pub fn strategy_envelope(
    strategy: Strategy,
    thermal: &ThermalModeSpec,
    params: &ProtocolParams,
) -> Result<CoherencePoint> {
    let n = thermal.occupancy();
    Ok(match strategy {
        Strategy::CoherenceMediated => {
            let gamma = crate::envelopes::phase_variance(params.lambda, params.tau, n)?;
            CoherencePoint {
                amplitude: coherence_envelope_closed(params.alpha, gamma)?,
                phase: 0.0,
            }
        }
        Strategy::PhaseShift => CoherencePoint {
            amplitude: 1.0,
            phase: params.lambda * params.tau * n,
        },
        Strategy::QubitOnly => crate::envelopes::qubit_only_envelope(params.chi_a, n, thermal.kappa_a, params.tau)?,
    })
}

/// What [`optimal_tau`] maximizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TauObjective {
    Qfi,
    /// F(τ)/(τ + τ_oh) with τ_oh taken from the protocol parameters.
    FisherRate,
}

/// Location of the best interaction time inside a bracket.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauOptimum {
    pub tau: f64,
    pub objective_value: f64,
    /// Set when the maximum sits on a bracket endpoint (objective monotone
    /// over the bracket).
    pub at_endpoint: bool,
}

/// Golden-section search on log τ for the maximizer of the strategy's QFI
/// (or Fisher rate), refined to 1e-3 relative.
pub fn optimal_tau(
    strategy: Strategy,
    thermal: &ThermalModeSpec,
    params: &ProtocolParams,
    bracket: (f64, f64),
    objective: TauObjective,
) -> Result<TauOptimum> {
    let (lo, hi) = bracket;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(ThermoError::InvalidArgument(format!(
            "bracket must satisfy 0 < lo < hi, got [{lo}, {hi}]"
        )));
    }
    params.validate()?;
    let eval = |tau: f64| -> f64 {
        let p = params.with_tau(tau);
        let f = strategy_qfi(strategy, thermal, &p).unwrap_or(f64::NAN);
        match objective {
            TauObjective::Qfi => f,
            TauObjective::FisherRate => f / (tau + params.tau_oh),
        }
    };
    let Maximum {
        argmax,
        value,
        at_endpoint,
    } = maximize_log(eval, lo, hi, 1e-3);
    Ok(TauOptimum {
        tau: argmax,
        objective_value: value,
        at_endpoint,
    })
}

/// Reference QFI from central differences of (C, Φ) in temperature, fed
/// through [`bloch_qfi`]. Used as an oracle for the analytic expressions.
///
/// Derivatives use one Richardson step, (4 D(h/2) - D(h))/3, with
/// h = rel_step·T.
pub fn finite_difference_qfi(
    strategy: Strategy,
    thermal: &ThermalModeSpec,
    params: &ProtocolParams,
    rel_step: f64,
) -> Result<f64> {
    if !(rel_step > 0.0 && rel_step <= 1e-3) {
        return Err(domain("relative step must lie in (0, 1e-3]", rel_step));
    }
    let t = thermal.temperature();
    if t == 0.0 {
        return Ok(0.0);
    }
    let at =
        |temp: f64| -> Result<CoherencePoint> { strategy_envelope(strategy, &thermal.with_temperature(temp)?, params) };
    let central = |h: f64| -> Result<(f64, f64)> {
        let up = at(t + h)?;
        let down = at(t - h)?;
        Ok((
            (up.amplitude - down.amplitude) / (2.0 * h),
            (up.phase - down.phase) / (2.0 * h),
        ))
    };
    let h = rel_step * t;
    let (dc1, dp1) = central(h)?;
    let (dc2, dp2) = central(0.5 * h)?;
    let dc = (4.0 * dc2 - dc1) / 3.0;
    let dphi = (4.0 * dp2 - dp1) / 3.0;
    let mid = at(t)?;
    bloch_qfi(mid.amplitude, dc, mid.phase, dphi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physics::{angular, HBAR, K_B};
    use approx::assert_relative_eq;

    fn ghz_mode(t: f64) -> ThermalModeSpec {
        ThermalModeSpec::from_hz(1e9, 0.0, t).unwrap()
    }

    fn ghz_params(tau: f64) -> ProtocolParams {
        ProtocolParams::new(angular(5e4), tau, 10_000, 0.0, 2.0).unwrap()
    }

    #[test]
    fn bloch_qfi_branches() {
        assert_relative_eq!(
            bloch_qfi(0.5, 0.3, 0.0, 0.0).unwrap(),
            0.09 / 0.75,
            max_relative = 1e-15
        );
        assert_eq!(bloch_qfi(1.0, 0.0, 0.0, 3.0).unwrap(), 9.0);
        assert_eq!(bloch_qfi(1.0, 0.1, 0.0, 3.0).unwrap(), f64::INFINITY);
        assert!(bloch_qfi(1.1, 0.0, 0.0, 0.0).is_err());
        assert!(bloch_qfi(-0.1, 0.0, 0.0, 0.0).is_err());
        let f = bloch_qfi(0.5296, -157.5, 0.0, 0.0).unwrap();
        assert_relative_eq!(f, 3.45e4, max_relative = 5e-3);
    }

    #[test]
    fn coherence_reference_point() {
        let r = qfi_coherence(&ghz_mode(0.01), &ghz_params(1e-5)).unwrap();
        // independent evaluation of the chain at n̄ = 8.3044e-3
        assert_relative_eq!(r.qfi, 34_483.085_6, max_relative = 1e-6);
        assert_relative_eq!(r.sensitivity, 53.85e-6, max_relative = 1e-3);
        assert!(r.sensitivity > 40e-6 && r.sensitivity < 80e-6);
    }

    #[test]
    fn coherence_zero_temperature_and_zero_alpha() {
        let cold = ThermalModeSpec::with_occupancy(angular(1e9), 0.0, 0.0).unwrap();
        assert_eq!(qfi_coherence(&cold, &ghz_params(1e-5)).unwrap().qfi, 0.0);
        let very_cold = ghz_mode(1e-4);
        let f = qfi_coherence(&very_cold, &ghz_params(1e-5)).unwrap().qfi;
        assert!((0.0..1e-150).contains(&f));
        let mut p = ghz_params(1e-5);
        p.alpha = 0.0;
        assert_eq!(qfi_coherence(&ghz_mode(0.01), &p).unwrap().qfi, 0.0);
        assert_eq!(qfi_coherence_weak(&ghz_mode(0.01), &p), 0.0);
    }

    #[test]
    fn weak_dephasing_agreement() {
        // rescale λ so that Γ_φ = 1e-4 at T = 10 mK, τ = 10 µs
        let mode = ghz_mode(0.01);
        let n = mode.occupancy();
        let tau = 1e-5;
        let lambda = (1e-4 / (n * (n + 1.0))).sqrt() / tau;
        let p = ProtocolParams::new(lambda, tau, 1, 0.0, 2.0).unwrap();
        let full = qfi_coherence(&mode, &p).unwrap().qfi;
        let weak = qfi_coherence_weak(&mode, &p);
        assert_relative_eq!(full, weak, max_relative = 0.05);
        // τ² scaling
        let w2 = qfi_coherence_weak(&mode, &p.with_tau(2.0 * tau));
        assert_relative_eq!(w2, 4.0 * weak, max_relative = 1e-14);
    }

    #[test]
    fn phase_reference_point() {
        let r = qfi_phase(&ghz_mode(0.01), angular(5e4), 1e-5).unwrap().with_nu(10_000);
        assert_relative_eq!(r.qfi, 159.383_102_469_302, max_relative = 1e-9);
        assert_relative_eq!(r.sensitivity, 7.92e-4, max_relative = 1e-3);
        assert_eq!(qfi_phase(&ghz_mode(0.01), 0.0, 1e-5).unwrap().qfi, 0.0);
        let a = qfi_phase(&ghz_mode(0.02), angular(5e4), 1e-5).unwrap().qfi;
        let b = qfi_phase(&ghz_mode(0.02), angular(5e4), 3e-5).unwrap().qfi;
        assert_relative_eq!(b, 9.0 * a, max_relative = 1e-15);
    }

    #[test]
    fn phase_matches_pure_state_normalization() {
        let mode = ghz_mode(0.015);
        let (lambda, tau) = (angular(5e4), 2e-5);
        let dphi = lambda * tau * mode.occupancy_derivative();
        let pure = qfi_phase_pure_state(1.0, dphi).unwrap();
        assert_eq!(qfi_phase(&mode, lambda, tau).unwrap().qfi, pure / 4.0);
        assert_eq!(qfi_phase_pure_state(0.0, 5.0).unwrap(), 0.0);
        assert_eq!(qfi_phase_pure_state(1.0, 1.0).unwrap(), 4.0);
        assert_relative_eq!(qfi_phase_pure_state(2.0, 12.65).unwrap(), 2560.36, max_relative = 1e-6);
    }

    #[test]
    fn phase_saturates_at_high_temperature() {
        let omega = angular(1e9);
        let t = 50.0 * HBAR * omega / K_B;
        let mode = ThermalModeSpec::at_temperature(omega, 0.0, t).unwrap();
        let (lambda, tau) = (angular(5e4), 1e-5);
        let f = qfi_phase(&mode, lambda, tau).unwrap().qfi;
        let limit = (lambda * tau * K_B / (HBAR * omega)).powi(2);
        assert_relative_eq!(f, limit, max_relative = 0.05);
    }

    #[test]
    fn sensitivity_and_rate() {
        assert_relative_eq!(sensitivity(160.0, 10_000), 7.9e-4, max_relative = 1e-3);
        assert_relative_eq!(sensitivity(3.0, 400), sensitivity(3.0, 100) / 2.0, max_relative = 1e-15);
        assert_eq!(sensitivity(0.0, 10), f64::INFINITY);

        let c = 3.0;
        assert_relative_eq!(fisher_rate(|t| c * t * t, 2.0, 0.0).unwrap(), 6.0, max_relative = 1e-15);
        assert!(fisher_rate(|t| t, 0.0, 0.0).is_err());
        assert!(fisher_rate(|t| t * t, 1.0, 1e30).unwrap() < 1e-29);
    }

    #[test]
    fn rate_optimum_for_exponential_decay() {
        // F ∝ τ² e^{-2Γτ} → F/τ maximal at τ = 1/(2Γ)
        let gamma = 3.0e4;
        let m = maximize_log(
            |t| fisher_rate(|t| t * t * (-2.0 * gamma * t).exp(), t, 0.0).unwrap(),
            1e-7,
            1e-2,
            1e-6,
        );
        assert_relative_eq!(m.argmax, 1.0 / (2.0 * gamma), max_relative = 1e-4);
    }

    #[test]
    fn optimal_tau_examples() {
        let mode = ghz_mode(0.01);
        let p = ghz_params(1e-5);
        let opt = optimal_tau(Strategy::CoherenceMediated, &mode, &p, (1e-7, 1e-3), TauObjective::Qfi).unwrap();
        assert!(!opt.at_endpoint);
        assert!(opt.tau > 5e-6 && opt.tau < 20e-6, "τ* = {}", opt.tau);

        let opt = optimal_tau(Strategy::PhaseShift, &mode, &p, (1e-7, 1e-3), TauObjective::FisherRate).unwrap();
        assert!(opt.at_endpoint);
        assert_eq!(opt.tau, 1e-3);

        assert!(optimal_tau(Strategy::PhaseShift, &mode, &p, (1e-3, 1e-7), TauObjective::Qfi).is_err());
    }

    #[test]
    fn finite_difference_oracle_examples() {
        let mode = ghz_mode(0.01);
        let p = ghz_params(1e-5).with_chi_a(angular(2e4));
        let fd = finite_difference_qfi(Strategy::CoherenceMediated, &mode, &p, 1e-4).unwrap();
        let an = qfi_coherence(&mode, &p).unwrap().qfi;
        assert_relative_eq!(fd, an, max_relative = 1e-4);
        let fd = finite_difference_qfi(Strategy::PhaseShift, &mode, &p, 1e-4).unwrap();
        let an = qfi_phase(&mode, p.lambda, p.tau).unwrap().qfi;
        assert_relative_eq!(fd, an, max_relative = 1e-6);
        let mut zero = p;
        zero.lambda = 0.0;
        assert_eq!(
            finite_difference_qfi(Strategy::PhaseShift, &mode, &zero, 1e-4).unwrap(),
            0.0
        );
        assert_eq!(
            finite_difference_qfi(Strategy::CoherenceMediated, &mode, &zero, 1e-4).unwrap(),
            0.0
        );
        assert!(finite_difference_qfi(Strategy::PhaseShift, &mode, &p, 1e-2).is_err());
    }

    #[test]
    fn qubit_only_limits() {
        let cold = ThermalModeSpec::with_occupancy(angular(1e9), angular(1e3), 0.0).unwrap();
        assert_eq!(qfi_qubit_only(&cold, angular(2e4), 5e-5).unwrap().qfi, 0.0);
        let mode = ThermalModeSpec::from_hz(1e9, 1e3, 0.01).unwrap();
        let p = ghz_params(4e-5).with_chi_a(angular(2e4));
        let fd = finite_difference_qfi(Strategy::QubitOnly, &mode, &p, 1e-4).unwrap();
        let an = qfi_qubit_only(&mode, p.chi_a, p.tau).unwrap().qfi;
        assert_relative_eq!(fd, an, max_relative = 1e-5);
    }

    #[test]
    fn strategy_parsing() {
        for s in Strategy::ALL {
            assert_eq!(s.name().parse::<Strategy>().unwrap(), s);
        }
        assert!("bogus".parse::<Strategy>().is_err());
    }
}
