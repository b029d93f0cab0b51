//! Monte Carlo against closed forms and exact references.

use num_complex::Complex64;
use thermoq::envelopes::{coherence_envelope_closed, coherence_envelope_exact, filter_function, qubit_only_envelope};
use thermoq::physics::angular;
use thermoq::stochastic::{lagged_covariance, mc_gaussian_envelope, mc_qubit_only_envelope, RngSeed, MIN_SHOTS};

use super::{par_map, CliError, Context, Outcome};
use crate::config::{ConfigError, SweepConfig, Unit};
use crate::output::{Cell, Table};

/// Monte Carlo settings read from `[fixed]`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct McPlan {
    pub alphas: Vec<f64>,
    pub sigma_sqs: Vec<f64>,
    pub n_bar: f64,
    /// Γ_q targets for the trajectory checks.
    pub gamma_q: Vec<f64>,
    /// Thermal-mode linewidth, rad/s.
    pub kappa: f64,
    /// κτ values of the trajectory checks.
    pub kappa_tau: Vec<f64>,
    /// Autocorrelation lags in units of 1/κ.
    pub kappa_lag: Vec<f64>,
    pub shots: usize,
    pub trajectory_shots: usize,
}

pub(crate) const PLAN_KEYS: [&str; 8] = [
    "alpha_grid",
    "sigma_sq_grid",
    "n_bar",
    "gamma_q",
    "kappa",
    "kappa_tau",
    "kappa_lag",
    "trajectory_shots",
];

impl McPlan {
    pub fn from(cfg: &SweepConfig, ctx: &Context) -> Result<Self, CliError> {
        let d = Unit::Dimensionless;
        let trajectory_shots = cfg.scalar_or("trajectory_shots", d, 20_000.0)?;
        if !(trajectory_shots >= MIN_SHOTS as f64 && trajectory_shots.fract() == 0.0) {
            return Err(ConfigError::general(format!("`trajectory_shots` must be an integer ≥ {MIN_SHOTS}")).into());
        }
        if ctx.shots < MIN_SHOTS {
            return Err(ConfigError::general(format!("shots must be at least {MIN_SHOTS}")).into());
        }
        Ok(Self {
            alphas: cfg.list("alpha_grid", d)?,
            sigma_sqs: cfg.list("sigma_sq_grid", d)?,
            n_bar: cfg.scalar("n_bar", d)?,
            gamma_q: cfg.list("gamma_q", d)?,
            kappa: angular(cfg.scalar("kappa", Unit::Hz)?),
            kappa_tau: cfg.list("kappa_tau", d)?,
            kappa_lag: cfg.list("kappa_lag", d)?,
            shots: ctx.shots,
            trajectory_shots: (trajectory_shots as usize).min(ctx.shots),
        })
    }
}

/// One Monte Carlo comparison.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct McRow {
    pub check: &'static str,
    pub x: f64,
    pub y: f64,
    pub closed_form: f64,
    /// Exact reference where one exists, NaN otherwise.
    pub exact: f64,
    pub mean: f64,
    pub std_error: f64,
    /// Standard scores against the closed form and the exact reference.
    pub z_closed: f64,
    pub z_exact: f64,
}

/// Gaussian-phase envelope over the (α, σ²) grid. x = σ², y = α.
pub(crate) fn gaussian_rows(plan: &McPlan, seed: u64, stream0: u64) -> Result<Vec<McRow>, CliError> {
    let ns = plan.sigma_sqs.len();
    par_map(plan.alphas.len() * ns, |i| {
        let (alpha, s2) = (plan.alphas[i / ns], plan.sigma_sqs[i % ns]);
        let est = mc_gaussian_envelope(alpha, s2, plan.shots, RngSeed::new(seed, stream0 + i as u64))?;
        let closed = coherence_envelope_closed(alpha, s2)?;
        let exact = coherence_envelope_exact(alpha, s2)?;
        Ok(McRow {
            check: "gaussian_envelope",
            x: s2,
            y: alpha,
            closed_form: closed,
            exact,
            mean: est.mean,
            std_error: est.std_error,
            z_closed: est.z_score(closed),
            z_exact: est.z_score(exact),
        })
    })
}

/// Qubit-only envelope along jump trajectories. x = Γ_q, y = κτ; χ is set
/// so the closed form gives the requested Γ_q. Means are projected on the
/// closed-form phase direction.
pub(crate) fn qubit_rows(plan: &McPlan, seed: u64, stream0: u64) -> Result<Vec<McRow>, CliError> {
    let nk = plan.kappa_tau.len();
    par_map(plan.gamma_q.len() * nk, |i| {
        let (gamma, kt) = (plan.gamma_q[i / nk], plan.kappa_tau[i % nk]);
        let n = plan.n_bar;
        let tau = kt / plan.kappa;
        let f = filter_function(plan.kappa, tau)?;
        let chi = (gamma / (4.0 * n * (n + 1.0) * f)).sqrt();
        let cp = qubit_only_envelope(chi, n, plan.kappa, tau)?;
        let closed = Complex64::from_polar(cp.amplitude, -cp.phase);
        let est = mc_qubit_only_envelope(
            chi,
            n,
            plan.kappa,
            tau,
            plan.trajectory_shots,
            RngSeed::new(seed, stream0 + i as u64),
        )?;
        // frozen photon number: E[e^{-iθn}] = 1/(1 + n̄(1 - e^{-iθ})), θ = 2χτ
        let quasi_static = kt <= 1e-2;
        let exact = if quasi_static {
            let theta = 2.0 * chi * tau;
            Some(Complex64::new(1.0, 0.0) / (1.0 + n * (1.0 - Complex64::from_polar(1.0, -theta))))
        } else {
            None
        };
        let rot = Complex64::from_polar(1.0, cp.phase);
        let (c, s) = (cp.phase.cos(), cp.phase.sin());
        let std_error = (est.std_error_re * c).hypot(est.std_error_im * s);
        Ok(McRow {
            check: if quasi_static {
                "qubit_only_quasi_static"
            } else {
                "qubit_only_markovian"
            },
            x: gamma,
            y: kt,
            closed_form: cp.amplitude,
            exact: exact.map_or(f64::NAN, |e| (e * rot).re),
            mean: (est.mean * rot).re,
            std_error,
            z_closed: est.z_score(closed),
            z_exact: exact.map_or(f64::NAN, |e| est.z_score(e)),
        })
    })
}

/// Stationary autocovariance at lags κΔt. x = κΔt, y = n̄.
pub(crate) fn autocorrelation_rows(plan: &McPlan, seed: u64, stream0: u64) -> Result<Vec<McRow>, CliError> {
    par_map(plan.kappa_lag.len(), |i| {
        let kl = plan.kappa_lag[i];
        let n = plan.n_bar;
        let est = lagged_covariance(
            n,
            plan.kappa,
            kl / plan.kappa,
            plan.trajectory_shots,
            RngSeed::new(seed, stream0 + i as u64),
        )?;
        let reference = n * (n + 1.0) * (-kl).exp();
        Ok(McRow {
            check: "autocorrelation",
            x: kl,
            y: n,
            closed_form: reference,
            exact: reference,
            mean: est.mean,
            std_error: est.std_error,
            z_closed: est.z_score(reference),
            z_exact: est.z_score(reference),
        })
    })
}

/// Every Monte Carlo comparison, with disjoint RNG streams per row.
pub(crate) fn all_rows(plan: &McPlan, seed: u64) -> Result<Vec<McRow>, CliError> {
    let mut rows = gaussian_rows(plan, seed, 0)?;
    rows.extend(qubit_rows(plan, seed, 1 << 16)?);
    rows.extend(autocorrelation_rows(plan, seed, 2 << 16)?);
    Ok(rows)
}

pub(crate) fn rows_table(rows: &[McRow]) -> Table {
    let mut t = Table::new(
        "",
        &[
            "check",
            "x",
            "y",
            "closed_form",
            "exact",
            "mc_mean",
            "mc_std_error",
            "z_closed",
            "z_exact",
        ],
    );
    for r in rows {
        t.push(vec![
            Cell::from(r.check),
            r.x.into(),
            r.y.into(),
            r.closed_form.into(),
            r.exact.into(),
            r.mean.into(),
            r.std_error.into(),
            r.z_closed.into(),
            r.z_exact.into(),
        ]);
    }
    t
}

pub fn run(cfg: &SweepConfig, ctx: &Context) -> Result<Outcome, CliError> {
    cfg.only_fixed(&PLAN_KEYS)?;
    if !cfg.axes.is_empty() {
        return Err(ConfigError::at(cfg.axes[0].line, "mc-validate takes no axes").into());
    }
    let plan = McPlan::from(cfg, ctx)?;
    let rows = all_rows(&plan, ctx.seed)?;
    let mut report = String::from("check                      x           y           |z| closed  |z| exact\n");
    for r in &rows {
        report.push_str(&format!(
            "{:<26} {:<11.4e} {:<11.4e} {:<11.3} {:.3}\n",
            r.check,
            r.x,
            r.y,
            r.z_closed.abs(),
            r.z_exact.abs()
        ));
    }
    Ok(Outcome {
        tables: vec![rows_table(&rows)],
        report: Some(report),
        ..Outcome::default()
    })
}
