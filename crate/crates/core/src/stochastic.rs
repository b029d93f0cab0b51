//! Seeded Monte Carlo oracles for the closed-form envelopes.
//!
//! Every estimator splits its shots into fixed-size batches. Batch `b` of a
//! call seeded with `(master_seed, stream_index)` draws from ChaCha8 keyed by
//! `master_seed`, on stream `stream_index`, starting at word `b << 40`.
//! Batches run on the current rayon pool and are reduced in batch order, so
//! results do not depend on the number of worker threads.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use rayon::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{domain, Result, ThermoError};
use crate::numerics::KahanSum;

/// Shots per batch.
pub const BATCH: usize = 4096;
/// Smallest accepted shot count.
pub const MIN_SHOTS: usize = 100;
/// Jump guard for a single trajectory.
pub const MAX_JUMPS: usize = 10_000_000;

/// Identifies one reproducible random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngSeed {
    pub master_seed: u64,
    pub stream_index: u64,
}

impl RngSeed {
    pub const fn new(master_seed: u64, stream_index: u64) -> Self {
        Self {
            master_seed,
            stream_index,
        }
    }

    /// Generator for batch `batch` of this stream.
    pub fn rng(&self, batch: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_index);
        rng.set_word_pos((batch as u128) << 40);
        rng
    }
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    /// sample standard deviation / sqrt(shots)
    pub std_error: f64,
    pub shots: usize,
}

impl McEstimate {
    /// |mean - reference| in units of the standard error (0 when both
    /// the deviation and the error vanish).
    pub fn z_score(&self, reference: f64) -> f64 {
        z(self.mean - reference, self.std_error)
    }
}

/// Complex sample mean; standard errors are given per component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexMcEstimate {
    pub mean: Complex64,
    pub std_error_re: f64,
    pub std_error_im: f64,
    pub shots: usize,
}

impl ComplexMcEstimate {
    /// Largest per-component deviation from `reference` in standard errors.
    pub fn z_score(&self, reference: Complex64) -> f64 {
        let d = self.mean - reference;
        z(d.re, self.std_error_re).max(z(d.im, self.std_error_im))
    }
}

fn z(diff: f64, err: f64) -> f64 {
    if diff == 0.0 {
        0.0
    } else if err == 0.0 {
        f64::INFINITY
    } else {
        diff.abs() / err
    }
}

fn check_shots(shots: usize) -> Result<()> {
    if shots < MIN_SHOTS {
        return Err(ThermoError::InvalidArgument(format!(
            "at least {MIN_SHOTS} shots are required, got {shots}"
        )));
    }
    Ok(())
}

/// Runs `shot` `shots` times in batches and returns the per-shot values in
/// shot order.
fn run_batches<T, F>(shots: usize, seed: RngSeed, shot: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng) -> Result<T> + Sync,
{
    let batches = shots.div_ceil(BATCH);
    let parts: Vec<Result<Vec<T>>> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = seed.rng(b as u64);
            let len = BATCH.min(shots - b * BATCH);
            (0..len).map(|_| shot(&mut rng)).collect()
        })
        .collect();
    let mut out = Vec::with_capacity(shots);
    for part in parts {
        out.extend(part?);
    }
    Ok(out)
}

fn real_estimate(values: &[f64]) -> McEstimate {
    let n = values.len() as f64;
    let mean = values.iter().copied().collect::<KahanSum>().value() / n;
    let ss = values.iter().map(|x| (x - mean).powi(2)).collect::<KahanSum>().value();
    let var = if values.len() > 1 { ss / (n - 1.0) } else { 0.0 };
    McEstimate {
        mean,
        std_error: (var / n).sqrt(),
        shots: values.len(),
    }
}

fn complex_estimate(values: &[Complex64]) -> ComplexMcEstimate {
    let re: Vec<f64> = values.iter().map(|z| z.re).collect();
    let im: Vec<f64> = values.iter().map(|z| z.im).collect();
    let (r, i) = (real_estimate(&re), real_estimate(&im));
    ComplexMcEstimate {
        mean: Complex64::new(r.mean, i.mean),
        std_error_re: r.std_error,
        std_error_im: i.std_error,
        shots: values.len(),
    }
}

/// One Bose-Einstein draw by inverting P(N ≥ n) = qⁿ, q = n̄/(1+n̄).
pub fn sample_bose_einstein_with<R: Rng + ?Sized>(n_bar: f64, rng: &mut R) -> u64 {
    if n_bar == 0.0 {
        return 0;
    }
    let q = n_bar / (1.0 + n_bar);
    let u: f64 = 1.0 - rng.random::<f64>(); // (0, 1]
    (u.ln() / q.ln()).floor() as u64
}

/// One Bose-Einstein draw from batch 0 of `seed`.
pub fn sample_bose_einstein(n_bar: f64, seed: RngSeed) -> Result<u64> {
    check_occupancy(n_bar)?;
    Ok(sample_bose_einstein_with(n_bar, &mut seed.rng(0)))
}

/// `count` Bose-Einstein draws, batched like the estimators.
pub fn sample_bose_einstein_many(n_bar: f64, count: usize, seed: RngSeed) -> Result<Vec<u64>> {
    check_occupancy(n_bar)?;
    run_batches(count, seed, |rng| Ok(sample_bose_einstein_with(n_bar, rng)))
}

fn check_occupancy(n_bar: f64) -> Result<()> {
    if !(n_bar >= 0.0 && n_bar.is_finite()) {
        return Err(domain("occupancy must be finite and nonnegative", n_bar));
    }
    Ok(())
}

/// Photon-number statistics used for the probe phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseStatistics {
    /// φ = λτ n with n Bose-Einstein distributed.
    DiscreteThermal,
    /// φ ~ Normal(0, (λτ)² n̄(n̄+1)).
    Gaussian,
}

fn overlap_decay(two_a2: f64, phi: f64) -> f64 {
    // 1 - cos φ = 2 sin²(φ/2)
    let s = (0.5 * phi).sin();
    (-2.0 * two_a2 * s * s).exp()
}

/// Monte Carlo estimate of E[exp(-2α²(1 - cos φ))].
#[allow(clippy::too_many_arguments)]
pub fn mc_coherence_envelope(
    alpha: f64,
    lambda: f64,
    tau: f64,
    n_bar: f64,
    shots: usize,
    seed: RngSeed,
    statistics: PhaseStatistics,
) -> Result<McEstimate> {
    check_shots(shots)?;
    check_occupancy(n_bar)?;
    if !(tau >= 0.0) {
        return Err(domain("interaction time must be nonnegative", tau));
    }
    let two_a2 = 2.0 * alpha * alpha;
    let lt = lambda * tau;
    let values = match statistics {
        PhaseStatistics::DiscreteThermal => run_batches(shots, seed, |rng| {
            let n = sample_bose_einstein_with(n_bar, rng) as f64;
            Ok(overlap_decay(two_a2, lt * n))
        })?,
        PhaseStatistics::Gaussian => {
            let sigma = (lt * lt * n_bar * (n_bar + 1.0)).sqrt();
            run_batches(shots, seed, |rng| {
                let g: f64 = rng.sample(StandardNormal);
                Ok(overlap_decay(two_a2, sigma * g))
            })?
        }
    };
    Ok(real_estimate(&values))
}

/// Gaussian-phase estimate parameterized directly by the phase variance.
pub fn mc_gaussian_envelope(alpha: f64, sigma_sq: f64, shots: usize, seed: RngSeed) -> Result<McEstimate> {
    check_shots(shots)?;
    if !(sigma_sq >= 0.0) {
        return Err(domain("phase variance must be nonnegative", sigma_sq));
    }
    let two_a2 = 2.0 * alpha * alpha;
    let sigma = sigma_sq.sqrt();
    let values = run_batches(shots, seed, |rng| {
        let g: f64 = rng.sample(StandardNormal);
        Ok(overlap_decay(two_a2, sigma * g))
    })?;
    Ok(real_estimate(&values))
}

/// Piecewise-constant photon-number record.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpTrajectory {
    /// Jump times, starting with 0; strictly increasing.
    pub times: Vec<f64>,
    /// Photon number holding from the matching time until the next one.
    pub photon_numbers: Vec<u64>,
    /// End of the record.
    pub duration: f64,
}

impl JumpTrajectory {
    pub fn value_at(&self, t: f64) -> u64 {
        let k = self.times.partition_point(|&s| s <= t);
        self.photon_numbers[k.saturating_sub(1)]
    }

    /// ∫₀^duration n(t) dt, summed exactly over the constant pieces.
    pub fn integral(&self) -> f64 {
        let mut sum = KahanSum::new();
        for (k, &n) in self.photon_numbers.iter().enumerate() {
            let end = self.times.get(k + 1).copied().unwrap_or(self.duration);
            sum.add(n as f64 * (end - self.times[k]));
        }
        sum.value()
    }

    pub fn jumps(&self) -> usize {
        self.times.len() - 1
    }
}

/// Birth-death walk: calls `visit(start, end, n)` for each constant piece.
fn walk_trajectory<R: Rng + ?Sized, V: FnMut(f64, f64, u64)>(
    n_bar: f64,
    kappa: f64,
    tau: f64,
    rng: &mut R,
    mut visit: V,
) -> Result<()> {
    let mut n = sample_bose_einstein_with(n_bar, rng);
    let mut t = 0.0;
    let mut jumps = 0usize;
    loop {
        let nf = n as f64;
        let up = kappa * n_bar * (nf + 1.0);
        let down = kappa * (n_bar + 1.0) * nf;
        let total = up + down;
        if total == 0.0 {
            visit(t, tau, n);
            return Ok(());
        }
        let wait: f64 = rng.sample::<f64, _>(Exp1) / total;
        let next = t + wait;
        if next >= tau {
            visit(t, tau, n);
            return Ok(());
        }
        visit(t, next, n);
        jumps += 1;
        if jumps > MAX_JUMPS {
            return Err(ThermoError::TrajectoryTooLong { limit: MAX_JUMPS });
        }
        if rng.random::<f64>() * total < up {
            n += 1;
        } else {
            n -= 1;
        }
        t = next;
    }
}

fn check_trajectory_args(n_bar: f64, kappa: f64, tau: f64) -> Result<()> {
    check_occupancy(n_bar)?;
    if !(kappa > 0.0) {
        return Err(domain("linewidth must be positive", kappa));
    }
    if !(tau > 0.0) {
        return Err(domain("duration must be positive", tau));
    }
    Ok(())
}

/// Continuous-time thermal jump process with up-rate κn̄(n+1) and down-rate
/// κ(n̄+1)n, started from the stationary geometric distribution.
pub fn simulate_thermal_trajectory_with<R: Rng + ?Sized>(
    n_bar: f64,
    kappa: f64,
    tau: f64,
    rng: &mut R,
) -> Result<JumpTrajectory> {
    check_trajectory_args(n_bar, kappa, tau)?;
    let mut times = Vec::new();
    let mut photon_numbers = Vec::new();
    walk_trajectory(n_bar, kappa, tau, rng, |start, _, n| {
        times.push(start);
        photon_numbers.push(n);
    })?;
    Ok(JumpTrajectory {
        times,
        photon_numbers,
        duration: tau,
    })
}

pub fn simulate_thermal_trajectory(n_bar: f64, kappa: f64, tau: f64, seed: RngSeed) -> Result<JumpTrajectory> {
    simulate_thermal_trajectory_with(n_bar, kappa, tau, &mut seed.rng(0))
}

/// Monte Carlo estimate of E[e^{-iφ}], φ = 2χ_a ∫₀^τ n(t) dt along thermal
/// jump trajectories. The closed-form counterpart is C e^{-iΦ}.
pub fn mc_qubit_only_envelope(
    chi_a: f64,
    n_bar: f64,
    kappa: f64,
    tau: f64,
    shots: usize,
    seed: RngSeed,
) -> Result<ComplexMcEstimate> {
    check_shots(shots)?;
    check_trajectory_args(n_bar, kappa, tau)?;
    let values = run_batches(shots, seed, |rng| {
        let mut area = KahanSum::new();
        walk_trajectory(n_bar, kappa, tau, rng, |a, b, n| area.add(n as f64 * (b - a)))?;
        let phi = 2.0 * chi_a * area.value();
        Ok(Complex64::new(phi.cos(), -phi.sin()))
    })?;
    Ok(complex_estimate(&values))
}

/// Stationary covariance estimate ⟨(n(0) - n̄)(n(lag) - n̄)⟩ over independent
/// trajectories; the process predicts n̄(n̄+1)e^{-κ·lag}.
pub fn lagged_covariance(n_bar: f64, kappa: f64, lag: f64, trajectories: usize, seed: RngSeed) -> Result<McEstimate> {
    check_shots(trajectories)?;
    check_trajectory_args(n_bar, kappa, lag)?;
    let values = run_batches(trajectories, seed, |rng| {
        let mut first = None;
        let mut last = 0u64;
        walk_trajectory(n_bar, kappa, lag, rng, |_, _, n| {
            first.get_or_insert(n);
            last = n;
        })?;
        let n0 = first.unwrap_or(0) as f64;
        Ok((n0 - n_bar) * (last as f64 - n_bar))
    })?;
    Ok(real_estimate(&values))
}

/// Photon numbers at time `t` of `count` independent trajectories of length
/// `tau`.
pub fn trajectory_marginal(n_bar: f64, kappa: f64, tau: f64, t: f64, count: usize, seed: RngSeed) -> Result<Vec<u64>> {
    check_trajectory_args(n_bar, kappa, tau)?;
    if !(0.0..=tau).contains(&t) {
        return Err(domain("sampling time must lie in [0, tau]", t));
    }
    run_batches(count, seed, |rng| {
        let mut at = 0u64;
        walk_trajectory(n_bar, kappa, tau, rng, |a, b, n| {
            if a <= t && t < b {
                at = n;
            }
        })?;
        Ok(at)
    })
}

/// Pearson chi-squared goodness of fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquaredTest {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Tests `samples` against the geometric law P(n) = n̄ⁿ/(1+n̄)^{n+1}. Bins
/// are single photon numbers while the expected count is at least 5, with
/// everything beyond pooled into a tail bin.
pub fn geometric_chi_squared(samples: &[u64], n_bar: f64) -> Result<ChiSquaredTest> {
    check_occupancy(n_bar)?;
    if n_bar == 0.0 || samples.len() < 10 {
        return Err(ThermoError::InvalidArgument(
            "chi-squared test needs n̄ > 0 and at least 10 samples".into(),
        ));
    }
    let total = samples.len() as f64;
    let q = n_bar / (1.0 + n_bar);
    let mut expected = Vec::new();
    let mut tail = 1.0; // P(N ≥ k)
    let mut k = 0;
    while total * (tail - tail * q) >= 5.0 && total * tail * q >= 5.0 {
        expected.push(total * (tail - tail * q));
        tail *= q;
        k += 1;
    }
    expected.push(total * tail);
    let mut observed = vec![0.0; expected.len()];
    for &s in samples {
        let bin = (s as usize).min(k);
        observed[bin] += 1.0;
    }
    let statistic: f64 = observed.iter().zip(&expected).map(|(o, e)| (o - e).powi(2) / e).sum();
    let dof = expected.len().saturating_sub(1).max(1);
    let dist = ChiSquared::new(dof as f64).map_err(|e| ThermoError::InvalidArgument(e.to_string()))?;
    Ok(ChiSquaredTest {
        statistic,
        dof,
        p_value: 1.0 - dist.cdf(statistic),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envelopes::{coherence_envelope_exact, qubit_only_envelope};
    use crate::physics::angular;

    const SEED: RngSeed = RngSeed::new(20_240_611, 0);

    #[test]
    fn zero_occupancy_is_degenerate() {
        assert_eq!(sample_bose_einstein(0.0, SEED).unwrap(), 0);
        let draws = sample_bose_einstein_many(0.0, 1000, SEED).unwrap();
        assert!(draws.iter().all(|&n| n == 0));
        let t = simulate_thermal_trajectory(0.0, 1.0, 10.0, SEED).unwrap();
        assert_eq!(t.jumps(), 0);
        assert_eq!(t.photon_numbers, vec![0]);
        let e = mc_qubit_only_envelope(1.0, 0.0, 1.0, 5.0, 200, SEED).unwrap();
        assert_eq!(e.mean, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn bose_einstein_moments() {
        let n_bar = 0.5;
        let draws = sample_bose_einstein_many(n_bar, 1_000_000, SEED).unwrap();
        let xs: Vec<f64> = draws.iter().map(|&n| n as f64).collect();
        let est = real_estimate(&xs);
        let var = n_bar * (n_bar + 1.0);
        assert!(est.z_score(n_bar) < 3.0, "mean z = {}", est.z_score(n_bar));
        // variance of the sample variance for a geometric law: (μ4 - σ⁴)/N
        let m4: f64 = xs.iter().map(|x| (x - n_bar).powi(4)).sum::<f64>() / xs.len() as f64;
        let sample_var = est.std_error.powi(2) * xs.len() as f64;
        let se = ((m4 - var * var) / xs.len() as f64).sqrt();
        assert!((sample_var - var).abs() < 3.0 * se);
    }

    #[test]
    fn estimates_are_reproducible_and_pool_independent() {
        let a = mc_gaussian_envelope(2.0, 0.3, 20_000, SEED).unwrap();
        let b = mc_gaussian_envelope(2.0, 0.3, 20_000, SEED).unwrap();
        assert_eq!(a, b);
        let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let c = single.install(|| mc_gaussian_envelope(2.0, 0.3, 20_000, SEED).unwrap());
        assert_eq!(a, c);
        let other = mc_gaussian_envelope(2.0, 0.3, 20_000, RngSeed::new(20_240_611, 1)).unwrap();
        assert_ne!(a.mean, other.mean);
    }

    #[test]
    fn lambda_zero_gives_unit_envelope() {
        for stats in [PhaseStatistics::DiscreteThermal, PhaseStatistics::Gaussian] {
            let e = mc_coherence_envelope(2.0, 0.0, 1e-5, 0.3, 500, SEED, stats).unwrap();
            assert_eq!(e.mean, 1.0);
            assert_eq!(e.std_error, 0.0);
        }
        assert!(mc_coherence_envelope(2.0, 0.0, 1e-5, 0.3, 50, SEED, PhaseStatistics::Gaussian).is_err());
    }

    #[test]
    fn gaussian_mode_matches_exact_reference() {
        let est = mc_gaussian_envelope(2.0, 0.08278, 1_000_000, SEED).unwrap();
        let exact = coherence_envelope_exact(2.0, 0.08278).unwrap();
        assert!(est.z_score(exact) < 3.0, "z = {}", est.z_score(exact));
        // through the physical parameterization
        let n: f64 = 8.304_373_388_861_986e-3;
        let lt = (0.08278 / (n * (n + 1.0))).sqrt();
        let est2 = mc_coherence_envelope(2.0, lt, 1.0, n, 200_000, SEED, PhaseStatistics::Gaussian).unwrap();
        assert!(est2.z_score(exact) < 3.0);
    }

    #[test]
    fn trajectory_integral_is_exact() {
        let t = JumpTrajectory {
            times: vec![0.0, 0.5, 1.25],
            photon_numbers: vec![2, 3, 0],
            duration: 2.0,
        };
        assert_eq!(t.integral(), 2.0 * 0.5 + 3.0 * 0.75);
        assert_eq!(t.value_at(0.7), 3);
        assert_eq!(t.value_at(1.9), 0);
        let traj = simulate_thermal_trajectory(0.5, 1.0, 50.0, SEED).unwrap();
        assert!(traj.times.windows(2).all(|w| w[0] < w[1]));
        assert!(*traj.times.last().unwrap() <= 50.0);
    }

    #[test]
    fn stationary_mean_and_marginal() {
        let n_bar = 0.5;
        let samples = trajectory_marginal(n_bar, 1.0, 20.0, 10.0, 10_000, SEED).unwrap();
        let xs: Vec<f64> = samples.iter().map(|&n| n as f64).collect();
        assert!(real_estimate(&xs).z_score(n_bar) < 3.0);
        let test = geometric_chi_squared(&samples, n_bar).unwrap();
        assert!(test.p_value > 1e-3, "{test:?}");
    }

    #[test]
    fn chi_squared_rejects_wrong_law() {
        let samples = sample_bose_einstein_many(0.8, 20_000, SEED).unwrap();
        assert!(geometric_chi_squared(&samples, 0.5).unwrap().p_value < 1e-6);
        assert!(geometric_chi_squared(&samples, 0.8).unwrap().p_value > 1e-3);
    }

    #[test]
    fn autocorrelation_is_exponential() {
        let n_bar = 0.5;
        for (i, lag) in [0.5, 1.0, 2.0].into_iter().enumerate() {
            let est = lagged_covariance(n_bar, 1.0, lag, 100_000, RngSeed::new(7, i as u64)).unwrap();
            let model = n_bar * (n_bar + 1.0) * (-lag).exp();
            assert!(est.z_score(model) < 3.0, "lag {lag}: {est:?} vs {model}");
        }
    }

    #[test]
    fn qubit_only_mean_phase() {
        // 2χτ = 0.05 rad per photon: higher cumulants far below the noise
        let (chi, n_bar, kappa, tau) = (angular(80.0), 0.2, angular(1e3), 50e-6);
        let est = mc_qubit_only_envelope(chi, n_bar, kappa, tau, 20_000, SEED).unwrap();
        let model = qubit_only_envelope(chi, n_bar, kappa, tau).unwrap();
        let reference = Complex64::from_polar(model.amplitude, -model.phase);
        assert!(est.z_score(reference) < 3.0, "{est:?} vs {reference}");
    }

    #[test]
    fn trajectory_guard() {
        let err = simulate_thermal_trajectory(1.0, 1e9, 1.0, SEED).unwrap_err();
        assert!(matches!(err, ThermoError::TrajectoryTooLong { .. }));
    }
}
