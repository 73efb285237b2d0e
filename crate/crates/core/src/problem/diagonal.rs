use serde::{Deserialize, Serialize};

use super::{Instance, ProblemError, DEFAULT_MAX_QUBITS};

/// The full diagonal of the cost operator over all `2^n` basis states,
/// together with its ground-state data.
///
/// Energies are integer-valued (violated clauses for 3-SAT, uncut edges for
/// MaxCut) but stored as `f64` for direct use in phase application and
/// expectation values. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagonalCost {
    n: usize,
    energies: Vec<f64>,
    ground_energy: f64,
    max_energy: f64,
    ground_states: Vec<u64>,
}

impl DiagonalCost {
    /// Evaluates the instance on every bitstring with the default qubit cap.
    pub fn build(instance: &Instance) -> Result<Self, ProblemError> {
        Self::build_with_cap(instance, DEFAULT_MAX_QUBITS)
    }

    pub fn build_with_cap(instance: &Instance, max_qubits: usize) -> Result<Self, ProblemError> {
        let n = instance.num_qubits();
        if n > max_qubits {
            return Err(ProblemError::TooLarge { n, max: max_qubits });
        }
        let dim = 1usize << n;
        let mut energies = Vec::with_capacity(dim);
        for z in 0..dim as u64 {
            energies.push(f64::from(instance.energy(z)?));
        }
        let ground_energy = energies.iter().copied().fold(f64::INFINITY, f64::min);
        let max_energy = energies.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let ground_states = energies
            .iter()
            .enumerate()
            .filter(|&(_, &e)| e == ground_energy)
            .map(|(z, _)| z as u64)
            .collect();
        Ok(Self { n, energies, ground_energy, max_energy, ground_states })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    #[inline]
    pub fn energy(&self, z: u64) -> f64 {
        self.energies[z as usize]
    }

    pub fn ground_energy(&self) -> f64 {
        self.ground_energy
    }

    pub fn max_energy(&self) -> f64 {
        self.max_energy
    }

    pub fn ground_states(&self) -> &[u64] {
        &self.ground_states
    }

    /// A 3-SAT instance is satisfiable exactly when its ground energy is zero.
    pub fn is_ground_zero(&self) -> bool {
        self.ground_energy == 0.0
    }
}
