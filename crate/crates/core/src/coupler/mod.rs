//! Engineered cross-Kerr coupling through a two-transmon bridge.
//!
//! Mode a couples to qubit Q1 (g_a1), mode b to Q2 (g_b2), and the qubits
//! exchange excitations (J_XY). Qubits are two-level and every coupling is
//! excitation conserving. The perturbative cross-Kerr is checked against
//! exact diagonalization of the truncated product space.

mod eigen;
mod hamiltonian;

pub use eigen::{eigensolve_symmetric, Eigen, Matrix, MAX_SWEEPS};
pub use hamiltonian::{build_hamiltonian, BareLabel, CouplerHamiltonian, FockTruncation, MAX_ENTRIES};

use crate::error::{domain, Result, ThermoError};
use crate::physics::angular;

/// Dispersive shift χ = -g²/Δ.
pub fn chi_from_g(g: f64, delta: f64) -> Result<f64> {
    if delta == 0.0 || !delta.is_finite() {
        return Err(domain("detuning must be nonzero", delta));
    }
    Ok(-g * g / delta)
}

/// Effective cross-Kerr 8 χ_a1 χ_b2 J² / Δ_12³.
pub fn lambda_perturbative(chi_a1: f64, chi_b2: f64, j_xy: f64, delta_12: f64) -> Result<f64> {
    if delta_12 == 0.0 || !delta_12.is_finite() {
        return Err(domain("qubit-qubit detuning must be nonzero", delta_12));
    }
    Ok(8.0 * chi_a1 * chi_b2 * j_xy * j_xy / (delta_12 * delta_12 * delta_12))
}

/// Product χ_a1χ_b2 on which the perturbative cross-Kerr equals `lambda`.
pub fn chi_product_for_lambda(lambda: f64, j_xy: f64, delta_12: f64) -> Result<f64> {
    if j_xy == 0.0 {
        return Err(domain("exchange coupling must be nonzero", j_xy));
    }
    if delta_12 == 0.0 {
        return Err(domain("qubit-qubit detuning must be nonzero", delta_12));
    }
    Ok(lambda * delta_12.powi(3) / (8.0 * j_xy * j_xy))
}

/// Loss rate κ/2π = (g/Δ)²/(2π T1) inherited from the bridge qubit, in Hz.
pub fn inverse_purcell(g: f64, delta: f64, t1: f64) -> Result<f64> {
    if !(t1 > 0.0) {
        return Err(domain("T1 must be positive", t1));
    }
    if delta == 0.0 {
        return Err(domain("detuning must be nonzero", delta));
    }
    Ok((g / delta).powi(2) / (2.0 * std::f64::consts::PI * t1))
}

/// Bare parameters of the bridge, all in rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplerCircuit {
    pub omega_a: f64,
    pub omega_b: f64,
    pub omega_1: f64,
    pub omega_2: f64,
    pub g_a1: f64,
    pub g_b2: f64,
    pub j_xy: f64,
}

/// Coupling-to-detuning ratios and whether any leaves the dispersive regime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersiveReport {
    pub g_a1_ratio: f64,
    pub g_b2_ratio: f64,
    pub j_ratio: f64,
    /// |g/Δ| > 0.1 on either arm or |J/Δ_12| > 0.2.
    pub outside_dispersive: bool,
}

impl CouplerCircuit {
    pub fn new(
        omega_a: f64,
        omega_b: f64,
        omega_1: f64,
        omega_2: f64,
        g_a1: f64,
        g_b2: f64,
        j_xy: f64,
    ) -> Result<Self> {
        let c = Self {
            omega_a,
            omega_b,
            omega_1,
            omega_2,
            g_a1,
            g_b2,
            j_xy,
        };
        c.validate()?;
        Ok(c)
    }

    /// Same as [`CouplerCircuit::new`] with every argument an ordinary
    /// frequency in Hz.
    #[allow(clippy::too_many_arguments)]
    pub fn from_hz(f_a: f64, f_b: f64, f_1: f64, f_2: f64, g_a1: f64, g_b2: f64, j_xy: f64) -> Result<Self> {
        Self::new(
            angular(f_a),
            angular(f_b),
            angular(f_1),
            angular(f_2),
            angular(g_a1),
            angular(g_b2),
            angular(j_xy),
        )
    }

    /// Couplings set from dimensionless ratios g_a1 = r_arm|Δ_a1|,
    /// g_b2 = r_arm|Δ_b2|, J = r_j|Δ_12|.
    pub fn from_ratios(omega_a: f64, omega_b: f64, omega_1: f64, omega_2: f64, r_arm: f64, r_j: f64) -> Result<Self> {
        Self::new(
            omega_a,
            omega_b,
            omega_1,
            omega_2,
            r_arm * (omega_a - omega_1).abs(),
            r_arm * (omega_b - omega_2).abs(),
            r_j * (omega_1 - omega_2).abs(),
        )
    }

    pub fn validate(&self) -> Result<()> {
        for (what, w) in [
            ("omega_a must be positive", self.omega_a),
            ("omega_b must be positive", self.omega_b),
            ("omega_1 must be positive", self.omega_1),
            ("omega_2 must be positive", self.omega_2),
        ] {
            if !(w > 0.0 && w.is_finite()) {
                return Err(domain(what, w));
            }
        }
        for (what, d) in [
            ("detuning omega_a - omega_1 must be nonzero", self.delta_a1()),
            ("detuning omega_b - omega_2 must be nonzero", self.delta_b2()),
            ("detuning omega_1 - omega_2 must be nonzero", self.delta_12()),
        ] {
            if d == 0.0 {
                return Err(domain(what, d));
            }
        }
        Ok(())
    }

    pub fn delta_a1(&self) -> f64 {
        self.omega_a - self.omega_1
    }

    pub fn delta_b2(&self) -> f64 {
        self.omega_b - self.omega_2
    }

    pub fn delta_12(&self) -> f64 {
        self.omega_1 - self.omega_2
    }

    pub fn chi_a1(&self) -> f64 {
        -self.g_a1 * self.g_a1 / self.delta_a1()
    }

    pub fn chi_b2(&self) -> f64 {
        -self.g_b2 * self.g_b2 / self.delta_b2()
    }

    pub fn lambda_perturbative(&self) -> f64 {
        8.0 * self.chi_a1() * self.chi_b2() * self.j_xy * self.j_xy / self.delta_12().powi(3)
    }

    pub fn dispersive_report(&self) -> DispersiveReport {
        let g_a1_ratio = (self.g_a1 / self.delta_a1()).abs();
        let g_b2_ratio = (self.g_b2 / self.delta_b2()).abs();
        let j_ratio = (self.j_xy / self.delta_12()).abs();
        DispersiveReport {
            g_a1_ratio,
            g_b2_ratio,
            j_ratio,
            outside_dispersive: g_a1_ratio > 0.1 || g_b2_ratio > 0.1 || j_ratio > 0.2,
        }
    }

    /// All three couplings multiplied by `s`.
    pub fn scaled_couplings(&self, s: f64) -> Self {
        Self {
            g_a1: s * self.g_a1,
            g_b2: s * self.g_b2,
            j_xy: s * self.j_xy,
            ..*self
        }
    }

    /// Roles of (a, Q1) and (b, Q2) exchanged.
    pub fn mirrored(&self) -> Self {
        Self {
            omega_a: self.omega_b,
            omega_b: self.omega_a,
            omega_1: self.omega_2,
            omega_2: self.omega_1,
            g_a1: self.g_b2,
            g_b2: self.g_a1,
            j_xy: self.j_xy,
        }
    }
}

/// Dressed eigenstates labelled by their dominant bare component.
#[derive(Debug, Clone, PartialEq)]
pub struct DressedSpectrum {
    pub labels: Vec<BareLabel>,
    /// rad/s, ascending within each excitation block.
    pub energies: Vec<f64>,
    /// |⟨bare|dressed⟩|² for the assigned label.
    pub overlaps: Vec<f64>,
}

impl DressedSpectrum {
    /// Energy of the dressed state adiabatically connected to `label`.
    pub fn energy_of(&self, label: BareLabel) -> Result<f64> {
        let k = self
            .labels
            .iter()
            .position(|l| *l == label)
            .ok_or_else(|| ThermoError::AssignmentAmbiguity {
                label: label.to_string(),
                overlap: 0.0,
            })?;
        if self.overlaps[k] <= 0.5 {
            return Err(ThermoError::AssignmentAmbiguity {
                label: label.to_string(),
                overlap: self.overlaps[k],
            });
        }
        Ok(self.energies[k])
    }

    /// Smallest assigned overlap; below 0.5 the labelling is ambiguous.
    pub fn min_overlap(&self) -> f64 {
        self.overlaps.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Assigns each eigenvector of a block to the bare state carrying its
/// largest weight, ties going to the lowest basis index.
fn assign(labels: &[BareLabel], eig: &Eigen) -> DressedSpectrum {
    let n = labels.len();
    let mut out = DressedSpectrum {
        labels: Vec::with_capacity(n),
        energies: eig.values.clone(),
        overlaps: Vec::with_capacity(n),
    };
    for k in 0..n {
        let mut best = 0;
        let mut best_w = -1.0;
        for i in 0..n {
            let w = eig.vectors[(i, k)].powi(2);
            if w > best_w {
                best_w = w;
                best = i;
            }
        }
        out.labels.push(labels[best]);
        out.overlaps.push(best_w);
    }
    out
}

/// Full dressed spectrum, diagonalized block by block in excitation number.
pub fn dressed_spectrum(c: &CouplerCircuit, trunc: FockTruncation) -> Result<DressedSpectrum> {
    let h = build_hamiltonian(c, trunc)?;
    let mut out = DressedSpectrum {
        labels: Vec::new(),
        energies: Vec::new(),
        overlaps: Vec::new(),
    };
    for block in h.blocks() {
        let labels: Vec<BareLabel> = block.iter().map(|&i| trunc.label(i)).collect();
        let eig = eigensolve_symmetric(&h.matrix.submatrix(&block))?;
        let part = assign(&labels, &eig);
        out.labels.extend(part.labels);
        out.energies.extend(part.energies);
        out.overlaps.extend(part.overlaps);
    }
    Ok(out)
}

/// Dressed-energy shift E - E_bare of the state connected to `target`.
///
/// The block is rebuilt with diagonal entries measured from the target's
/// bare energy (integer combinations of the bare frequencies), so the
/// shift is not computed as a difference of two large energies.
fn dressed_shift(h: &CouplerHamiltonian, c: &CouplerCircuit, target: BareLabel) -> Result<(f64, f64)> {
    let trunc = h.trunc;
    let block = h.block(target.excitations());
    let labels: Vec<BareLabel> = block.iter().map(|&i| trunc.label(i)).collect();
    let mut m = h.matrix.submatrix(&block);
    let q = |b: bool| b as i64 as f64;
    for (r, s) in labels.iter().enumerate() {
        m[(r, r)] = (s.n_a as f64 - target.n_a as f64) * c.omega_a
            + (s.n_b as f64 - target.n_b as f64) * c.omega_b
            + (q(s.q1) - q(target.q1)) * c.omega_1
            + (q(s.q2) - q(target.q2)) * c.omega_2;
    }
    let eig = eigensolve_symmetric(&m)?;
    let spec = assign(&labels, &eig);
    let e = spec.energy_of(target)?;
    let k = spec.labels.iter().position(|l| *l == target).unwrap();
    Ok((e, spec.overlaps[k]))
}

/// Exact cross-Kerr at a single truncation together with the smallest
/// dressed-state overlap of the four states involved.
pub fn lambda_exact_at(c: &CouplerCircuit, trunc: FockTruncation) -> Result<(f64, f64)> {
    c.validate()?;
    let h = build_hamiltonian(c, trunc)?;
    let mut shifts = [0.0; 4];
    let mut min_overlap = f64::INFINITY;
    for (slot, label) in [(0, 0), (1, 0), (0, 1), (1, 1)].iter().enumerate() {
        let (s, ov) = dressed_shift(&h, c, BareLabel::photons(label.0, label.1))?;
        shifts[slot] = s;
        min_overlap = min_overlap.min(ov);
    }
    let [e00, e10, e01, e11] = shifts;
    Ok(((e11 - e10) - (e01 - e00), min_overlap))
}

/// Largest n_max [`lambda_exact`] escalates to.
pub const N_MAX_LIMIT: usize = 6;

/// Outcome of the truncation-converged exact cross-Kerr evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaExact {
    /// E11 - E10 - E01 + E00, rad/s.
    pub lambda: f64,
    /// Truncation at which the value was accepted.
    pub n_max: usize,
    /// Last step changed λ by less than 1%.
    pub converged: bool,
    /// (n_max, λ) for every truncation evaluated.
    pub history: Vec<(usize, f64)>,
    pub min_overlap: f64,
    pub dispersive: DispersiveReport,
}

/// λ_exact with automatic truncation escalation: n_max is raised until one
/// step changes λ by less than 1% or [`N_MAX_LIMIT`] is reached.
pub fn lambda_exact_report(c: &CouplerCircuit, trunc: FockTruncation) -> Result<LambdaExact> {
    let start = FockTruncation::new(trunc.n_max)?.n_max;
    let first = if start >= N_MAX_LIMIT { start - 1 } else { start };
    // absolute floor for values at the round-off level of the block energies
    let floor = 1e-13 * c.omega_a.max(c.omega_b).max(c.omega_1).max(c.omega_2);
    let (mut prev, mut min_overlap) = lambda_exact_at(c, FockTruncation { n_max: first })?;
    let mut history = vec![(first, prev)];
    let mut n = first;
    let mut converged = false;
    while n < N_MAX_LIMIT.max(start) {
        n += 1;
        let (cur, ov) = lambda_exact_at(c, FockTruncation { n_max: n })?;
        history.push((n, cur));
        min_overlap = ov;
        let step = (cur - prev).abs();
        prev = cur;
        if step <= 0.01 * cur.abs() || step <= floor {
            converged = true;
            break;
        }
    }
    Ok(LambdaExact {
        lambda: prev,
        n_max: n,
        converged,
        history,
        min_overlap,
        dispersive: c.dispersive_report(),
    })
}

/// Exact cross-Kerr E11 - E10 - E01 + E00 in rad/s.
pub fn lambda_exact(c: &CouplerCircuit, trunc: FockTruncation) -> Result<f64> {
    Ok(lambda_exact_report(c, trunc)?.lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn two_pi() -> f64 {
        2.0 * std::f64::consts::PI
    }

    fn representative() -> CouplerCircuit {
        CouplerCircuit::from_ratios(angular(1e9), angular(8e9), angular(5.0e9), angular(4.82e9), 0.05, 0.05).unwrap()
    }

    #[test]
    fn chi_examples() {
        assert_eq!(chi_from_g(0.0, 3.0).unwrap(), 0.0);
        assert_relative_eq!(
            chi_from_g(angular(1e8), angular(2e9)).unwrap() / two_pi(),
            -5e6,
            max_relative = 1e-14
        );
        assert_eq!(chi_from_g(2.0, -4.0).unwrap(), -chi_from_g(2.0, 4.0).unwrap());
        assert!(chi_from_g(1.0, 0.0).is_err());
    }

    #[test]
    fn lambda_perturbative_examples() {
        let l = lambda_perturbative(angular(5e6), angular(5e6), angular(3e7), angular(1.8e8)).unwrap();
        assert_relative_eq!(l / two_pi(), 30_864.197_530_864_2, max_relative = 1e-12);
        assert_eq!(lambda_perturbative(0.0, 1.0, 1.0, 1.0).unwrap(), 0.0);
        let product = chi_product_for_lambda(angular(5e4), angular(3e7), angular(1.8e8)).unwrap();
        assert_relative_eq!(product / two_pi().powi(2), 40.5e12, max_relative = 1e-12);
        let l = lambda_perturbative(product, 1.0, angular(3e7), angular(1.8e8)).unwrap();
        assert_relative_eq!(l / two_pi(), 5e4, max_relative = 1e-12);
        assert!(lambda_perturbative(1.0, 1.0, 1.0, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn lambda_perturbative_symmetry(a in -1e7f64..1e7, b in -1e7f64..1e7, j in -1e8f64..1e8, d in 1e6f64..1e9) {
            let x = lambda_perturbative(a, b, j, d).unwrap();
            prop_assert_eq!(x, lambda_perturbative(b, a, j, d).unwrap());
            prop_assert_eq!(-x, lambda_perturbative(a, b, j, -d).unwrap());
        }
    }

    #[test]
    fn inverse_purcell_examples() {
        assert_eq!(inverse_purcell(0.0, 1.0, 1e-4).unwrap(), 0.0);
        assert_relative_eq!(
            inverse_purcell(0.1, 1.0, 300e-6).unwrap(),
            5.305_164_769_729_845,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            inverse_purcell(0.05, 1.0, 300e-6).unwrap(),
            inverse_purcell(0.1, 1.0, 300e-6).unwrap() / 4.0,
            max_relative = 1e-14
        );
        assert!(inverse_purcell(0.1, 1.0, 0.0).is_err());
        assert!(inverse_purcell(0.1, 0.0, 1.0).is_err());
    }

    #[test]
    fn circuit_validation_and_flags() {
        assert!(CouplerCircuit::new(1.0, 2.0, 1.0, 3.0, 0.1, 0.1, 0.1).is_err());
        assert!(CouplerCircuit::new(-1.0, 2.0, 3.0, 4.0, 0.1, 0.1, 0.1).is_err());
        assert!(!representative().dispersive_report().outside_dispersive);
        let strong = CouplerCircuit::from_ratios(1.0, 8.0, 5.0, 4.82, 0.2, 0.05).unwrap();
        assert!(strong.dispersive_report().outside_dispersive);
    }

    #[test]
    fn single_arm_matches_jaynes_cummings() {
        let c = CouplerCircuit::new(1.0, 8.0, 1.3, 7.1, 0.04, 0.0, 0.0).unwrap();
        let spec = dressed_spectrum(&c, FockTruncation::new(2).unwrap()).unwrap();
        let e = spec.energy_of(BareLabel::photons(1, 0)).unwrap();
        let (wa, w1, g) = (1.0f64, 1.3f64, 0.04f64);
        let exact = 0.5 * (wa + w1) - (0.25 * (wa - w1).powi(2) + g * g).sqrt();
        assert_relative_eq!(e, exact, max_relative = 1e-13);
        assert!(spec.min_overlap() > 0.5);
    }

    #[test]
    fn lambda_exact_trivial_cases() {
        let mut c = representative();
        c.g_a1 = 0.0;
        c.g_b2 = 0.0;
        c.j_xy = 0.0;
        assert_eq!(lambda_exact(&c, FockTruncation::DEFAULT).unwrap(), 0.0);
        let mut c = representative();
        c.j_xy = 0.0;
        let l = lambda_exact(&c, FockTruncation::DEFAULT).unwrap();
        assert!(l.abs() <= 1e-10 * c.omega_a, "λ = {l}");
    }

    #[test]
    fn lambda_exact_converges_and_mirrors() {
        let c = representative();
        let r = lambda_exact_report(&c, FockTruncation::DEFAULT).unwrap();
        assert!(r.converged);
        assert!(r.min_overlap > 0.9);
        let m = lambda_exact(&c.mirrored(), FockTruncation::DEFAULT).unwrap();
        assert_relative_eq!(m, r.lambda, max_relative = 1e-6);
    }

    #[test]
    fn ambiguous_assignment_is_reported() {
        // mode a resonant with both qubits: three-way mixing in the N = 1 block
        let c = CouplerCircuit::new(1.0, 8.0, 1.0 + 1e-6, 1.0 - 1e-6, 0.05, 0.01, 0.05).unwrap();
        let err = lambda_exact(&c, FockTruncation::DEFAULT).unwrap_err();
        assert!(matches!(err, ThermoError::AssignmentAmbiguity { .. }));
    }
}
