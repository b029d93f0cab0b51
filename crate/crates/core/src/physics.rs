//! Physical constants, unit helpers and Bose-Einstein occupancy.
//!
//! Internally every frequency is an angular frequency in rad/s and every
//! temperature is in kelvin. Constructors that accept ordinary frequencies
//! (hertz) say so in their name.

use std::f64::consts::TAU;

use crate::error::{domain, Result, ThermoError};

/// Reduced Planck constant, J·s (CODATA 2018).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K (CODATA 2018, exact).
pub const K_B: f64 = 1.380_649e-23;

/// Above this value of ħω/k_BT the occupancy is reported as exactly zero.
pub const UNDERFLOW_EXPONENT: f64 = 700.0;

/// Converts an ordinary frequency (Hz) to an angular frequency (rad/s).
#[inline]
pub fn angular(freq_hz: f64) -> f64 {
    TAU * freq_hz
}

/// Converts an angular frequency (rad/s) to an ordinary frequency (Hz).
#[inline]
pub fn hertz(omega: f64) -> f64 {
    omega / TAU
}

/// The pair of constants used throughout the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants {
    pub hbar: f64,
    pub k_b: f64,
}

impl Constants {
    pub const CODATA_2018: Constants = Constants { hbar: HBAR, k_b: K_B };
}

fn check_omega(omega: f64) -> Result<()> {
    if omega > 0.0 && omega.is_finite() {
        Ok(())
    } else {
        Err(domain("angular frequency must be positive", omega))
    }
}

fn check_temperature(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(domain("temperature must be positive", t))
    }
}

/// ħω / k_B T.
#[inline]
fn reduced_energy(omega: f64, t: f64) -> f64 {
    HBAR * omega / (K_B * t)
}

/// Bose-Einstein occupancy n̄ = 1/(exp(ħω/k_BT) − 1).
///
/// Returns exactly 0 once ħω/k_BT exceeds [`UNDERFLOW_EXPONENT`].
pub fn occupancy(omega: f64, t: f64) -> Result<f64> {
    check_omega(omega)?;
    check_temperature(t)?;
    let x = reduced_energy(omega, t);
    if x > UNDERFLOW_EXPONENT {
        return Ok(0.0);
    }
    Ok(1.0 / x.exp_m1())
}

/// ∂n̄/∂T = (ħω/k_BT²)·n̄(n̄+1), in 1/K.
pub fn occupancy_derivative(omega: f64, t: f64) -> Result<f64> {
    let n = occupancy(omega, t)?;
    let x = reduced_energy(omega, t);
    Ok(x / t * n * (n + 1.0))
}

/// Photon-number variance of a thermal state, n̄(n̄+1).
pub fn thermal_variance(n_bar: f64) -> Result<f64> {
    if !(n_bar >= 0.0) {
        return Err(domain("occupancy must be nonnegative", n_bar));
    }
    Ok(n_bar * (n_bar + 1.0))
}

/// Photon-number variance of a displaced thermal state,
/// n̄_b(1+n̄_b) + α²(1+2n̄_b).
pub fn displaced_thermal_variance(n_bar_b: f64, alpha: f64) -> Result<f64> {
    if !(n_bar_b >= 0.0) {
        return Err(domain("residual occupancy must be nonnegative", n_bar_b));
    }
    if !(alpha >= 0.0) {
        return Err(domain("coherent amplitude must be nonnegative", alpha));
    }
    Ok(n_bar_b * (1.0 + n_bar_b) + alpha * alpha * (1.0 + 2.0 * n_bar_b))
}

/// Inverse of [`occupancy`]: T = ħω / (k_B ln(1 + 1/n̄)).
pub fn temperature_from_occupancy(omega: f64, n_bar: f64) -> Result<f64> {
    check_omega(omega)?;
    if !(n_bar > 0.0) || !n_bar.is_finite() {
        return Err(domain("occupancy must be positive", n_bar));
    }
    Ok(HBAR * omega / (K_B * (1.0 / n_bar).ln_1p()))
}

/// How the thermal mode's state was specified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThermalState {
    Temperature(f64),
    Occupancy(f64),
}

/// The thermal (sensing) mode `a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalModeSpec {
    /// Angular frequency, rad/s.
    pub omega_a: f64,
    /// Linewidth, rad/s.
    pub kappa_a: f64,
    pub state: ThermalState,
}

impl ThermalModeSpec {
    pub fn at_temperature(omega_a: f64, kappa_a: f64, temperature: f64) -> Result<Self> {
        check_omega(omega_a)?;
        check_temperature(temperature)?;
        Self::check_kappa(kappa_a)?;
        Ok(Self {
            omega_a,
            kappa_a,
            state: ThermalState::Temperature(temperature),
        })
    }

    pub fn with_occupancy(omega_a: f64, kappa_a: f64, occupancy: f64) -> Result<Self> {
        check_omega(omega_a)?;
        Self::check_kappa(kappa_a)?;
        if !(occupancy >= 0.0) || !occupancy.is_finite() {
            return Err(domain("occupancy must be nonnegative", occupancy));
        }
        Ok(Self {
            omega_a,
            kappa_a,
            state: ThermalState::Occupancy(occupancy),
        })
    }

    /// Same as [`Self::at_temperature`] with frequencies in hertz.
    pub fn from_hz(freq_a_hz: f64, kappa_a_hz: f64, temperature: f64) -> Result<Self> {
        Self::at_temperature(angular(freq_a_hz), angular(kappa_a_hz), temperature)
    }

    fn check_kappa(kappa: f64) -> Result<()> {
        if kappa >= 0.0 && kappa.is_finite() {
            Ok(())
        } else {
            Err(domain("linewidth must be nonnegative", kappa))
        }
    }

    /// Temperature in kelvin. For an occupancy-specified mode this inverts
    /// the Bose-Einstein relation; zero occupancy maps to 0 K.
    pub fn temperature(&self) -> f64 {
        match self.state {
            ThermalState::Temperature(t) => t,
            ThermalState::Occupancy(0.0) => 0.0,
            ThermalState::Occupancy(n) => {
                temperature_from_occupancy(self.omega_a, n).expect("validated at construction")
            }
        }
    }

    pub fn occupancy(&self) -> f64 {
        match self.state {
            ThermalState::Temperature(t) => occupancy(self.omega_a, t).expect("validated at construction"),
            ThermalState::Occupancy(n) => n,
        }
    }

    /// ∂n̄/∂T at the mode's temperature; 0 at absolute zero.
    pub fn occupancy_derivative(&self) -> f64 {
        let t = self.temperature();
        if t == 0.0 {
            return 0.0;
        }
        occupancy_derivative(self.omega_a, t).expect("validated at construction")
    }

    /// A copy of this mode held at a different temperature.
    pub fn with_temperature(&self, temperature: f64) -> Result<Self> {
        Self::at_temperature(self.omega_a, self.kappa_a, temperature)
    }
}

/// The coherent probe mode `b`. The coherent amplitude is stored as |α|.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeSpec {
    pub omega_b: f64,
    pub kappa_b: f64,
    pub alpha: f64,
    pub residual_occupancy: f64,
}

impl ProbeSpec {
    pub fn new(omega_b: f64, kappa_b: f64, alpha: f64, residual_occupancy: f64) -> Result<Self> {
        check_omega(omega_b)?;
        if !(kappa_b >= 0.0) {
            return Err(domain("probe linewidth must be nonnegative", kappa_b));
        }
        if !(alpha >= 0.0) {
            return Err(domain("coherent amplitude must be nonnegative", alpha));
        }
        if !(residual_occupancy >= 0.0) {
            return Err(domain("residual occupancy must be nonnegative", residual_occupancy));
        }
        Ok(Self {
            omega_b,
            kappa_b,
            alpha,
            residual_occupancy,
        })
    }

    /// Photon-number variance of the displaced thermal probe state.
    pub fn number_variance(&self) -> f64 {
        displaced_thermal_variance(self.residual_occupancy, self.alpha).expect("validated at construction")
    }
}

impl TryFrom<(f64, f64, f64)> for ThermalModeSpec {
    type Error = ThermoError;

    /// `(omega_a, kappa_a, temperature)` in rad/s, rad/s, K.
    fn try_from((omega_a, kappa_a, t): (f64, f64, f64)) -> Result<Self> {
        Self::at_temperature(omega_a, kappa_a, t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    const GHZ: f64 = 1e9;

    // 50-digit mpmath evaluation with the CODATA 2018 constants.
    const N_1GHZ_10MK: f64 = 8.304_373_388_861_986e-3;
    const DN_1GHZ_10MK: f64 = 4.018_567_480_431_016;

    #[test]
    fn occupancy_reference_point() {
        let n = occupancy(angular(GHZ), 0.01).unwrap();
        assert_relative_eq!(n, N_1GHZ_10MK, max_relative = 1e-12);
    }

    #[test]
    fn occupancy_is_one_at_ln2() {
        let omega = angular(GHZ);
        let t = HBAR * omega / (K_B * std::f64::consts::LN_2);
        assert_relative_eq!(occupancy(omega, t).unwrap(), 1.0, max_relative = 1e-12);
        assert_relative_eq!(
            occupancy_derivative(omega, t).unwrap(),
            2.0 * std::f64::consts::LN_2 / t,
            max_relative = 1e-12
        );
    }

    #[test]
    fn occupancy_vanishes_toward_zero_temperature() {
        let omega = angular(GHZ);
        assert!(occupancy(omega, 1e-4).unwrap() < 1e-200);
        // exponent > 700 is clamped
        assert_eq!(occupancy(omega, 1e-5).unwrap(), 0.0);
        assert_eq!(occupancy_derivative(omega, 1e-5).unwrap(), 0.0);
    }

    #[test]
    fn occupancy_rejects_bad_domain() {
        assert!(occupancy(angular(GHZ), 0.0).is_err());
        assert!(occupancy(angular(GHZ), -1.0).is_err());
        assert!(occupancy(0.0, 0.01).is_err());
        assert!(temperature_from_occupancy(1.0, 0.0).is_err());
        assert!(thermal_variance(-0.1).is_err());
        assert!(displaced_thermal_variance(0.0, -1.0).is_err());
    }

    #[test]
    fn derivative_reference_point() {
        let dn = occupancy_derivative(angular(GHZ), 0.01).unwrap();
        assert_relative_eq!(dn, DN_1GHZ_10MK, max_relative = 1e-12);
        // central finite difference, step 1e-7·T
        let h = 1e-9;
        let fd = (occupancy(angular(GHZ), 0.01 + h).unwrap() - occupancy(angular(GHZ), 0.01 - h).unwrap()) / (2.0 * h);
        assert_relative_eq!(dn, fd, max_relative = 1e-6);
    }

    #[test]
    fn variances() {
        assert_eq!(thermal_variance(0.0).unwrap(), 0.0);
        assert_eq!(thermal_variance(1.0).unwrap(), 2.0);
        assert_relative_eq!(thermal_variance(8.318e-3).unwrap(), 8.387e-3, max_relative = 1e-3);
        assert_eq!(displaced_thermal_variance(0.0, 2.0).unwrap(), 4.0);
        assert_eq!(displaced_thermal_variance(1.0, 0.0).unwrap(), 2.0);
        assert_relative_eq!(
            displaced_thermal_variance(0.1, 2.0).unwrap(),
            4.91,
            max_relative = 1e-14
        );
    }

    #[test]
    fn inverse_of_occupancy() {
        let omega = angular(GHZ);
        assert_relative_eq!(
            temperature_from_occupancy(omega, 1.0).unwrap(),
            HBAR * omega / (K_B * std::f64::consts::LN_2),
            max_relative = 1e-14
        );
        let t = temperature_from_occupancy(omega, 8.318e-3).unwrap();
        assert_relative_eq!(t, 0.01, max_relative = 1e-3);
    }

    #[test]
    fn log_grid_monotone_and_consistent() {
        let omega = angular(GHZ);
        let mut prev = -1.0;
        for i in 0..=60 {
            let t = 1e-3 * 1e3f64.powf(i as f64 / 60.0);
            let n = occupancy(omega, t).unwrap();
            assert!(n > prev && n.is_finite());
            prev = n;
            let h = 1e-5 * t;
            let fd = (occupancy(omega, t + h).unwrap() - occupancy(omega, t - h).unwrap()) / (2.0 * h);
            let dn = occupancy_derivative(omega, t).unwrap();
            assert!(dn > 0.0);
            assert_relative_eq!(dn, fd, max_relative = 1e-6);
            let back = temperature_from_occupancy(omega, n).unwrap();
            assert_relative_eq!(back, t, max_relative = 1e-12);
        }
    }

    #[test]
    fn thermal_mode_spec_accessors() {
        let m = ThermalModeSpec::from_hz(GHZ, 1e3, 0.01).unwrap();
        assert_relative_eq!(m.occupancy(), N_1GHZ_10MK, max_relative = 1e-12);
        let by_n = ThermalModeSpec::with_occupancy(m.omega_a, m.kappa_a, m.occupancy()).unwrap();
        assert_relative_eq!(by_n.temperature(), 0.01, max_relative = 1e-12);
        let empty = ThermalModeSpec::with_occupancy(m.omega_a, 0.0, 0.0).unwrap();
        assert_eq!(empty.temperature(), 0.0);
        assert_eq!(empty.occupancy_derivative(), 0.0);
        assert!(ThermalModeSpec::from_hz(GHZ, -1.0, 0.01).is_err());
        assert!(ProbeSpec::new(1.0, 0.0, -2.0, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn occupancy_decreases_with_frequency(f in 0.1f64..20.0, t in 1e-3f64..1.0) {
            let lo = occupancy(angular(f * GHZ), t).unwrap();
            let hi = occupancy(angular(f * 1.01 * GHZ), t).unwrap();
            prop_assert!(hi <= lo);
            prop_assert!(lo >= 0.0 && lo.is_finite());
        }
    }
}
