//! Product-basis Hamiltonian of two bosonic modes bridged by two coupled
//! two-level transmons.

use super::eigen::Matrix;
use super::CouplerCircuit;
use crate::error::{Result, ThermoError};

/// Largest number of matrix entries [`build_hamiltonian`] will allocate.
pub const MAX_ENTRIES: usize = 1_000_000;

/// Photon-number cutoff applied to each bosonic mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockTruncation {
    pub n_max: usize,
}

impl FockTruncation {
    pub const DEFAULT: FockTruncation = FockTruncation { n_max: 3 };

    pub fn new(n_max: usize) -> Result<Self> {
        if n_max < 1 {
            return Err(ThermoError::InvalidArgument("n_max must be at least 1".into()));
        }
        Ok(Self { n_max })
    }

    /// (n_max + 1)² · 4
    pub fn dimension(&self) -> usize {
        (self.n_max + 1) * (self.n_max + 1) * 4
    }

    pub fn index(&self, label: BareLabel) -> Option<usize> {
        if label.n_a > self.n_max || label.n_b > self.n_max {
            return None;
        }
        let m = self.n_max + 1;
        Some(((label.n_a * m + label.n_b) * 2 + label.q1 as usize) * 2 + label.q2 as usize)
    }

    pub fn label(&self, index: usize) -> BareLabel {
        let m = self.n_max + 1;
        BareLabel {
            n_a: index / (4 * m),
            n_b: (index / 4) % m,
            q1: (index / 2) % 2 == 1,
            q2: index % 2 == 1,
        }
    }
}

impl Default for FockTruncation {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Bare product state |n_a, n_b, q1, q2⟩; `true` marks an excited qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BareLabel {
    pub n_a: usize,
    pub n_b: usize,
    pub q1: bool,
    pub q2: bool,
}

impl BareLabel {
    pub const fn photons(n_a: usize, n_b: usize) -> Self {
        Self {
            n_a,
            n_b,
            q1: false,
            q2: false,
        }
    }

    /// Total excitation number, conserved by the coupling.
    pub fn excitations(&self) -> usize {
        self.n_a + self.n_b + self.q1 as usize + self.q2 as usize
    }

    pub fn bare_energy(&self, c: &CouplerCircuit) -> f64 {
        let q = |b: bool| if b { 1.0 } else { 0.0 };
        c.omega_a * self.n_a as f64 + c.omega_b * self.n_b as f64 + c.omega_1 * q(self.q1) + c.omega_2 * q(self.q2)
    }
}

impl std::fmt::Display for BareLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let q = |b: bool| if b { 'e' } else { 'g' };
        write!(f, "|{},{},{}{}⟩", self.n_a, self.n_b, q(self.q1), q(self.q2))
    }
}

/// H = H0 + V in the basis ordered by [`FockTruncation::index`].
///
/// Bare energies are measured from the all-ground vacuum (qubit energies
/// ω_j|e⟩⟨e| instead of ω_jσ_z/2, a constant offset).
#[derive(Debug, Clone)]
pub struct CouplerHamiltonian {
    pub trunc: FockTruncation,
    pub matrix: Matrix,
}

impl CouplerHamiltonian {
    /// Basis indices grouped by excitation number N = 0, 1, 2, ...
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for i in 0..self.trunc.dimension() {
            let n = self.trunc.label(i).excitations();
            if blocks.len() <= n {
                blocks.resize(n + 1, Vec::new());
            }
            blocks[n].push(i);
        }
        blocks
    }

    pub fn block(&self, excitations: usize) -> Vec<usize> {
        (0..self.trunc.dimension())
            .filter(|&i| self.trunc.label(i).excitations() == excitations)
            .collect()
    }
}

pub fn build_hamiltonian(c: &CouplerCircuit, trunc: FockTruncation) -> Result<CouplerHamiltonian> {
    FockTruncation::new(trunc.n_max)?;
    let dim = trunc.dimension();
    if dim.checked_mul(dim).is_none_or(|e| e > MAX_ENTRIES) {
        return Err(ThermoError::DimensionOverflow {
            dim,
            limit: MAX_ENTRIES,
        });
    }
    let mut h = Matrix::zeros(dim);
    for i in 0..dim {
        let s = trunc.label(i);
        h[(i, i)] = s.bare_energy(c);
        // a σ1⁺: photon in a → Q1 excitation
        if s.n_a > 0 && !s.q1 {
            let t = BareLabel {
                n_a: s.n_a - 1,
                q1: true,
                ..s
            };
            set_pair(&mut h, i, trunc.index(t).unwrap(), c.g_a1 * (s.n_a as f64).sqrt());
        }
        // b σ2⁺
        if s.n_b > 0 && !s.q2 {
            let t = BareLabel {
                n_b: s.n_b - 1,
                q2: true,
                ..s
            };
            set_pair(&mut h, i, trunc.index(t).unwrap(), c.g_b2 * (s.n_b as f64).sqrt());
        }
        // σ1⁺σ2⁻ exchange
        if !s.q1 && s.q2 {
            let t = BareLabel {
                q1: true,
                q2: false,
                ..s
            };
            set_pair(&mut h, i, trunc.index(t).unwrap(), c.j_xy);
        }
    }
    Ok(CouplerHamiltonian { trunc, matrix: h })
}

fn set_pair(h: &mut Matrix, i: usize, j: usize, v: f64) {
    h[(i, j)] = v;
    h[(j, i)] = v;
}
