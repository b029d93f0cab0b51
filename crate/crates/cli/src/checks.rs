//! Oracle comparisons shared by `validate` and the acceptance tests.

use thermoq::estimation::{finite_difference_qfi, strategy_envelope, strategy_qfi, ProtocolParams, Strategy};
use thermoq::physics::ThermalModeSpec;
use thermoq::Result;

/// Relative step used for the finite-difference QFI.
pub const FD_REL_STEP: f64 = 1e-4;

/// Amplitude changes below this fraction of C are lost to rounding in the
/// central difference, so the oracle says nothing at such points.
pub const RESOLUTION: f64 = 1e-12;

/// Analytic vs finite-difference QFI over a (T, τ) grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeReport {
    pub strategy: Strategy,
    pub compared: usize,
    /// Points with C ≥ 0.999.
    pub skipped_coherent: usize,
    /// Points where the amplitude difference is below [`RESOLUTION`].
    pub skipped_unresolved: usize,
    pub worst_rel_error: f64,
    pub worst_at: (f64, f64),
}

/// Compares analytic and finite-difference QFI at every (T, τ). The
/// phase-shift strategy has C ≡ 1 and is compared everywhere.
pub fn derivative_oracle(
    strategy: Strategy,
    mode: &ThermalModeSpec,
    params: &ProtocolParams,
    temps: &[f64],
    taus: &[f64],
) -> Result<DerivativeReport> {
    let mut r = DerivativeReport {
        strategy,
        compared: 0,
        skipped_coherent: 0,
        skipped_unresolved: 0,
        worst_rel_error: 0.0,
        worst_at: (f64::NAN, f64::NAN),
    };
    for &t in temps {
        let thermal = mode.with_temperature(t)?;
        for &tau in taus {
            let p = params.with_tau(tau);
            if strategy != Strategy::PhaseShift {
                let c = strategy_envelope(strategy, &thermal, &p)?.amplitude;
                if c >= 0.999 {
                    r.skipped_coherent += 1;
                    continue;
                }
                let h = FD_REL_STEP * t;
                let up = strategy_envelope(strategy, &mode.with_temperature(t + h)?, &p)?.amplitude;
                let down = strategy_envelope(strategy, &mode.with_temperature(t - h)?, &p)?.amplitude;
                if (up - down).abs() < RESOLUTION * c {
                    r.skipped_unresolved += 1;
                    continue;
                }
            }
            let analytic = strategy_qfi(strategy, &thermal, &p)?;
            let fd = finite_difference_qfi(strategy, &thermal, &p, FD_REL_STEP)?;
            let err = if analytic == 0.0 {
                if fd == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            } else {
                ((fd - analytic) / analytic).abs()
            };
            r.compared += 1;
            if err.is_nan() || err > r.worst_rel_error {
                r.worst_rel_error = err;
                r.worst_at = (t, tau);
            }
        }
    }
    Ok(r)
}

/// `n` log-spaced points spanning [lo, hi].
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp())
        .collect()
}
