//! Coherence envelopes and visibility functions.
//!
//! Two evaluators exist for the coherent-probe envelope. The closed form
//! `exp[-2α²(1 - e^{-Γ})]` is the one every QFI routine uses. The exact
//! Gaussian phase average `e^{-2α²} Σ_k I_k(2α²) e^{-k²σ²/2}` is kept next
//! to it as an oracle; the two are not the same function (the closed form
//! decays twice as fast at weak dephasing and saturates at `e^{-2α²}`
//! instead of `e^{-2α²} I_0(2α²)`).

use crate::error::{domain, Result};
use crate::numerics::{gauss_hermite, scaled_bessel_i, KahanSum};

/// Amplitude and phase of a complex visibility `C e^{iΦ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherencePoint {
    pub amplitude: f64,
    pub phase: f64,
}

impl CoherencePoint {
    pub fn new(amplitude: f64, phase: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&amplitude) {
            return Err(domain("coherence amplitude must lie in [0, 1]", amplitude));
        }
        if !phase.is_finite() {
            return Err(domain("phase must be finite", phase));
        }
        Ok(Self { amplitude, phase })
    }

    /// Unit amplitude, zero phase.
    pub const FULL: CoherencePoint = CoherencePoint {
        amplitude: 1.0,
        phase: 0.0,
    };
}

/// Rates and windows entering the dephasing formulas (all angular units).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DephasingParams {
    pub lambda: f64,
    pub tau: f64,
    pub chi_a: f64,
    pub chi_b: f64,
    pub tau_r: f64,
}

impl DephasingParams {
    pub fn new(lambda: f64, tau: f64, chi_a: f64, chi_b: f64, tau_r: f64) -> Result<Self> {
        if !(tau >= 0.0) {
            return Err(domain("interaction time must be nonnegative", tau));
        }
        if !(tau_r >= 0.0) {
            return Err(domain("Ramsey window must be nonnegative", tau_r));
        }
        Ok(Self {
            lambda,
            tau,
            chi_a,
            chi_b,
            tau_r,
        })
    }
}

/// Phase variance σ² = (λτ)² n̄(n̄+1) imprinted by the thermal mode.
pub fn phase_variance(lambda: f64, tau: f64, n_bar: f64) -> Result<f64> {
    if !(tau >= 0.0) {
        return Err(domain("interaction time must be nonnegative", tau));
    }
    if !(n_bar >= 0.0) {
        return Err(domain("occupancy must be nonnegative", n_bar));
    }
    let lt = lambda * tau;
    Ok(lt * lt * n_bar * (n_bar + 1.0))
}

/// Closed-form probe envelope exp[-2α²(1 - e^{-Γ_φ})].
pub fn coherence_envelope_closed(alpha: f64, gamma_phi: f64) -> Result<f64> {
    if !(gamma_phi >= 0.0) {
        return Err(domain("dephasing strength must be nonnegative", gamma_phi));
    }
    // 1 - e^{-Γ} = -expm1(-Γ)
    Ok((2.0 * alpha * alpha * (-gamma_phi).exp_m1()).exp())
}

const SERIES_REL_CUTOFF: f64 = 1e-14;

/// Exact Gaussian phase average of the coherent-state overlap, evaluated as
/// the modified-Bessel series e^{-2α²} Σ_k I_k(2α²) e^{-k²σ²/2}.
pub fn coherence_envelope_exact(alpha: f64, sigma_sq: f64) -> Result<f64> {
    if !(sigma_sq >= 0.0) {
        return Err(domain("phase variance must be nonnegative", sigma_sq));
    }
    if sigma_sq == 0.0 || alpha == 0.0 {
        return Ok(1.0);
    }
    let weights = scaled_bessel_i(2.0 * alpha * alpha);
    let mut sum = KahanSum::new();
    sum.add(weights[0]);
    for (k, w) in weights.iter().enumerate().skip(1) {
        let kf = k as f64;
        let term = 2.0 * w * (-0.5 * kf * kf * sigma_sq).exp();
        sum.add(term);
        if term < SERIES_REL_CUTOFF * sum.value() {
            break;
        }
    }
    Ok(sum.value().clamp(0.0, 1.0))
}

const QUADRATURE_START: usize = 200;
const QUADRATURE_MAX: usize = 6400;
const QUADRATURE_AGREEMENT: f64 = 1e-12;

/// Same quantity as [`coherence_envelope_exact`], by Gauss-Hermite
/// quadrature of ∫dφ P(φ) e^{-2α²(1-cos φ)}. Starts at order 200 and
/// doubles until successive results agree within 1e-12 (capped at 6400).
pub fn coherence_envelope_exact_quadrature(alpha: f64, sigma_sq: f64) -> Result<f64> {
    if !(sigma_sq >= 0.0) {
        return Err(domain("phase variance must be nonnegative", sigma_sq));
    }
    if sigma_sq == 0.0 {
        return Ok(1.0);
    }
    let two_a2 = 2.0 * alpha * alpha;
    // 1 - cos φ = 2 sin²(φ/2)
    let integrand = |phi: f64| {
        let s = (0.5 * phi).sin();
        (-2.0 * two_a2 * s * s).exp()
    };
    let mut order = QUADRATURE_START;
    let mut prev = gauss_hermite(order).gaussian_expectation(sigma_sq, integrand);
    while order < QUADRATURE_MAX {
        order *= 2;
        let next = gauss_hermite(order).gaussian_expectation(sigma_sq, integrand);
        if (next - prev).abs() <= QUADRATURE_AGREEMENT {
            return Ok(next);
        }
        prev = next;
    }
    Ok(prev)
}

/// f_κ(τ) = (κτ - 1 + e^{-κτ})/κ², with the κ → 0 limit τ²/2.
pub fn filter_function(kappa: f64, tau: f64) -> Result<f64> {
    if !(kappa >= 0.0) {
        return Err(domain("linewidth must be nonnegative", kappa));
    }
    if !(tau >= 0.0) {
        return Err(domain("time must be nonnegative", tau));
    }
    let x = kappa * tau;
    if x == 0.0 {
        return Ok(0.5 * tau * tau);
    }
    if x < 1e-3 {
        // x - 1 + e^{-x} = x²/2 - x³/6 + x⁴/24 - ...
        let series = 0.5 - x / 6.0 + x * x / 24.0 - x * x * x / 120.0;
        return Ok(tau * tau * series);
    }
    Ok((x + (-x).exp_m1()) / (kappa * kappa))
}

/// Qubit Ramsey envelope from direct dispersive coupling to the thermal
/// mode: amplitude exp[-(2χ_a)² n̄(n̄+1) f_κ(τ)], phase 2χ_a n̄ τ.
pub fn qubit_only_envelope(chi_a: f64, n_bar: f64, kappa_a: f64, tau: f64) -> Result<CoherencePoint> {
    let gamma = qubit_only_dephasing(chi_a, n_bar, kappa_a, tau)?;
    Ok(CoherencePoint {
        amplitude: (-gamma).exp(),
        phase: 2.0 * chi_a * n_bar * tau,
    })
}

/// Γ_q = (2χ_a)² n̄(n̄+1) f_κ(τ).
pub fn qubit_only_dephasing(chi_a: f64, n_bar: f64, kappa_a: f64, tau: f64) -> Result<f64> {
    if !(n_bar >= 0.0) {
        return Err(domain("occupancy must be nonnegative", n_bar));
    }
    let f = filter_function(kappa_a, tau)?;
    Ok(4.0 * chi_a * chi_a * n_bar * (n_bar + 1.0) * f)
}

/// Ramsey visibility under a parasitic dispersive coupling χ_m to a mode
/// with number variance `var_n` and linewidth κ_m.
pub fn parasitic_envelope(chi_m: f64, var_n: f64, kappa_m: f64, tau_r: f64) -> Result<f64> {
    if !(var_n >= 0.0) {
        return Err(domain("number variance must be nonnegative", var_n));
    }
    let f = filter_function(kappa_m, tau_r)?;
    Ok((-4.0 * chi_m * chi_m * var_n * f).exp())
}

/// Markovian dephasing rate 4χ² Var(n)/κ.
pub fn markovian_dephasing_rate(chi: f64, var_n: f64, kappa: f64) -> Result<f64> {
    if !(kappa > 0.0) {
        return Err(domain("Markovian rate needs a positive linewidth", kappa));
    }
    if !(var_n >= 0.0) {
        return Err(domain("number variance must be nonnegative", var_n));
    }
    Ok(4.0 * chi * chi * var_n / kappa)
}

/// Gain of the phase-to-quadrature mapping block, g_m = 2|β|χ_b τ_s.
pub fn mapping_gain(beta: f64, chi_b: f64, tau_s: f64) -> f64 {
    2.0 * beta.abs() * chi_b * tau_s
}

/// Qubit angle g_m·2α·cos(φ_b - θ) acquired in the mapping window.
pub fn mapped_angle(g_m: f64, alpha: f64, phi_b: f64, theta: f64) -> f64 {
    g_m * 2.0 * alpha * (phi_b - theta).cos()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physics::angular;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    #[test]
    fn phase_variance_examples() {
        let s = phase_variance(angular(5e4), 1e-5, 8.318e-3).unwrap();
        // π² · 8.318e-3 · 1.008318
        assert_relative_eq!(s, PI * PI * 8.318e-3 * 1.008318, max_relative = 1e-12);
        assert_relative_eq!(s, 0.08278, max_relative = 1e-3);
        assert_eq!(phase_variance(1.0, 1.0, 0.0).unwrap(), 0.0);
        let s2 = phase_variance(angular(5e4), 2e-5, 8.318e-3).unwrap();
        assert_relative_eq!(s2, 4.0 * s, max_relative = 1e-14);
        assert!(phase_variance(1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn closed_envelope_examples() {
        // 50-digit reference: exp(-8(1 - e^{-0.08278}))
        assert_relative_eq!(
            coherence_envelope_closed(2.0, 0.08278).unwrap(),
            0.529_633_073_669_575_3,
            max_relative = 1e-13
        );
        assert_eq!(coherence_envelope_closed(2.0, 0.0).unwrap(), 1.0);
        assert_relative_eq!(
            coherence_envelope_closed(2.0, 1e4).unwrap(),
            (-8f64).exp(),
            max_relative = 1e-14
        );
        assert!(coherence_envelope_closed(2.0, -0.1).is_err());
    }

    #[test]
    fn exact_envelope_examples() {
        assert_eq!(coherence_envelope_exact(2.0, 0.0).unwrap(), 1.0);
        // 50-digit quadrature of the Gaussian average
        assert_relative_eq!(
            coherence_envelope_exact(2.0, 0.08278).unwrap(),
            0.777_562_881_489_883_6,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            coherence_envelope_exact(1.3, 2.5).unwrap(),
            0.337_372_547_553_691_1,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            coherence_envelope_exact(2.0, 1e3).unwrap(),
            0.143_431_781_856_850_3,
            max_relative = 1e-12
        );
    }

    #[test]
    fn exact_envelope_weak_dephasing_slope() {
        // C ≈ 1 - α²σ² for small σ²
        let s = 1e-4;
        let slope = (1.0 - coherence_envelope_exact(2.0, s).unwrap()) / s;
        assert_relative_eq!(slope, 4.0, max_relative = 1e-3);
        let closed = (1.0 - coherence_envelope_closed(2.0, s).unwrap()) / s;
        assert_relative_eq!(closed / slope, 2.0, max_relative = 2e-3);
    }

    #[test]
    fn bessel_and_quadrature_routes_agree() {
        for i in 0..=8 {
            let alpha = 0.5 * i as f64;
            for j in 0..=10 {
                let s = j as f64;
                let a = coherence_envelope_exact(alpha, s).unwrap();
                let b = coherence_envelope_exact_quadrature(alpha, s).unwrap();
                assert!((a - b).abs() <= 1e-10, "alpha={alpha} s={s}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn envelopes_monotone_on_grid() {
        for alpha in [0.3, 1.0, 2.0, 4.0] {
            let mut pc = 1.0 + 1e-15;
            let mut pe = 1.0 + 1e-15;
            for k in 0..200 {
                let g = 1e-4 * 1.07f64.powi(k);
                let c = coherence_envelope_closed(alpha, g).unwrap();
                let e = coherence_envelope_exact(alpha, g).unwrap();
                assert!(c <= pc && e <= pe + 1e-15);
                assert!((0.0..=1.0).contains(&c) && (0.0..=1.0).contains(&e));
                pc = c;
                pe = e;
            }
        }
    }

    #[test]
    fn filter_function_limits() {
        assert_eq!(filter_function(5.0, 0.0).unwrap(), 0.0);
        assert_eq!(filter_function(0.0, 2.0).unwrap(), 2.0);
        let f = filter_function(angular(1e3), 1e-6).unwrap();
        assert_relative_eq!(f, 5.0e-13, max_relative = 3e-3);
        let f = filter_function(angular(1e6), 1e-3).unwrap();
        assert_relative_eq!(f, 1e-3 / angular(1e6), max_relative = 1e-3);
        // analytic κ→0 branch vs general formula at κτ = 1e-4
        let (kappa, tau): (f64, f64) = (1e-4, 1.0);
        let general = (kappa * tau + (-kappa * tau).exp_m1()) / (kappa * kappa);
        assert_relative_eq!(filter_function(0.0, tau).unwrap(), general, max_relative = 1e-4);
        assert_relative_eq!(filter_function(kappa, tau).unwrap(), general, max_relative = 1e-8);
    }

    #[test]
    fn qubit_only_examples() {
        let n = 8.318e-3;
        let chi = angular(2e4);
        let quasi = qubit_only_envelope(chi, n, 0.0, 50e-6).unwrap();
        assert_relative_eq!(-quasi.amplitude.ln(), 0.66, max_relative = 0.01);
        assert_relative_eq!(quasi.phase, 0.105, max_relative = 0.01);
        let full = qubit_only_envelope(chi, n, angular(1e3), 50e-6).unwrap();
        let kt = angular(1e3) * 50e-6;
        let f = (kt - 1.0 + (-kt).exp()) / angular(1e3).powi(2);
        assert_relative_eq!(
            -full.amplitude.ln(),
            4.0 * chi * chi * n * (1.0 + n) * f,
            max_relative = 1e-12
        );
        assert_eq!(qubit_only_envelope(chi, 0.0, 1.0, 1e-3).unwrap(), CoherencePoint::FULL);
        // Markovian limit
        let kappa = angular(1e6);
        let tau = 1e-2;
        let g = qubit_only_dephasing(chi, n, kappa, tau).unwrap();
        let markov = 4.0 * chi * chi * n * (n + 1.0) * tau / kappa;
        assert_relative_eq!(g, markov, max_relative = 1e-4);
    }

    #[test]
    fn qubit_only_amplitude_monotone() {
        let tau = 40e-6;
        let mut prev = 1.0;
        for k in 0..50 {
            let n = 1e-3 * 1.2f64.powi(k);
            let a = qubit_only_envelope(angular(2e4), n, angular(1e3), tau)
                .unwrap()
                .amplitude;
            assert!(a <= prev);
            prev = a;
        }
        let mut prev = 1.0;
        for k in 0..50 {
            let chi = angular(100.0) * 1.2f64.powi(k);
            let a = qubit_only_envelope(-chi, 0.01, angular(1e3), tau).unwrap().amplitude;
            assert!(a <= prev);
            prev = a;
        }
    }

    #[test]
    fn parasitic_and_markovian() {
        assert_eq!(parasitic_envelope(1.0, 0.0, 1.0, 1.0).unwrap(), 1.0);
        let chi_b = angular(2e4);
        let v = parasitic_envelope(chi_b, 4.0, 0.0, 3e-6).unwrap();
        assert_relative_eq!(v, (-2.0 * chi_b * chi_b * 4.0 * 9e-12).exp(), max_relative = 1e-14);
        assert_relative_eq!(v, 0.32, max_relative = 0.01);

        let rate = markovian_dephasing_rate(angular(1e3), 8.387e-3, angular(1e7)).unwrap();
        assert_relative_eq!(rate, 2.107_883_006_852_6e-2, max_relative = 1e-12);
        assert_eq!(markovian_dephasing_rate(1.0, 0.0, 1.0).unwrap(), 0.0);
        let r2 = markovian_dephasing_rate(angular(1e3), 8.387e-3, angular(2e7)).unwrap();
        assert_relative_eq!(r2, rate / 2.0, max_relative = 1e-14);
        assert!(markovian_dephasing_rate(1.0, 1.0, 0.0).is_err());

        // long windows decay at the Markovian rate
        let kappa = angular(1e6);
        let chi = angular(1e3);
        let t1 = 1e-3;
        let t2 = 2e-3;
        let l1 = parasitic_envelope(chi, 0.5, kappa, t1).unwrap().ln();
        let l2 = parasitic_envelope(chi, 0.5, kappa, t2).unwrap().ln();
        let rate = markovian_dephasing_rate(chi, 0.5, kappa).unwrap();
        assert_relative_eq!(-(l2 - l1) / (t2 - t1), rate, max_relative = 1e-9);
    }

    #[test]
    fn mapping_examples() {
        assert_eq!(mapping_gain(0.0, 1.0, 1.0), 0.0);
        let g = mapping_gain(0.1, angular(2e4), 1e-6);
        assert_relative_eq!(g, 0.0251, max_relative = 2e-3);
        assert_relative_eq!(mapping_gain(-0.2, angular(2e4), 1e-6), 2.0 * g, max_relative = 1e-14);
        assert_relative_eq!(mapped_angle(g, 2.0, 0.3, 0.3), 4.0 * g, max_relative = 1e-14);
        assert_abs_diff_eq!(mapped_angle(g, 2.0, FRAC_PI_2, 0.0), 0.0, epsilon = 1e-16);
        assert_relative_eq!(mapped_angle(0.0251, 2.0, FRAC_PI_4, 0.0), 0.0710, max_relative = 1e-3);
    }

    proptest! {
        #[test]
        fn envelopes_bounded(alpha in 0.0f64..4.0, s in 0.0f64..50.0) {
            let c = coherence_envelope_closed(alpha, s).unwrap();
            let e = coherence_envelope_exact(alpha, s).unwrap();
            prop_assert!((0.0..=1.0).contains(&c));
            prop_assert!((0.0..=1.0).contains(&e));
            prop_assert!(c >= (-2.0 * alpha * alpha).exp() * (1.0 - 1e-12));
        }

        #[test]
        fn filter_function_nonnegative_increasing(k in 0.0f64..1e7, t in 0.0f64..1e-2) {
            let a = filter_function(k, t).unwrap();
            let b = filter_function(k, t * 1.01 + 1e-12).unwrap();
            prop_assert!(a >= 0.0);
            prop_assert!(b >= a);
        }
    }
}
