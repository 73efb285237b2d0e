//! Exact statevector simulation of the QAOA ansatz.
//!
//! The variational state is built by alternating a diagonal cost phase
//! `exp(-i * gamma * H_C)` and a transverse-field mixer `exp(-i * beta * H_M)`
//! with `H_M = sum_i sigma^x_i`, applied to the uniform superposition. Within
//! each layer the cost phase acts first.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::problem::DiagonalCost;

#[derive(Debug, Error)]
pub enum QaoaError {
    #[error("qubit count {0} outside [1, {1}]")]
    QubitCount(usize, usize),
    #[error("state dimension {found} does not match 2^{qubits}")]
    DimensionMismatch { found: usize, qubits: usize },
    #[error("schedule contains a non-finite angle")]
    NonFiniteAngle,
}

/// Largest qubit count accepted by the simulator.
pub const MAX_QUBITS: usize = 30;

/// An ordered list of `(gamma_i, beta_i)` angle pairs, in radians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Schedule {
    pairs: Vec<(f64, f64)>,
}

impl Schedule {
    pub fn new(pairs: Vec<(f64, f64)>) -> Result<Self, QaoaError> {
        if pairs.iter().any(|&(g, b)| !g.is_finite() || !b.is_finite()) {
            return Err(QaoaError::NonFiniteAngle);
        }
        Ok(Self { pairs })
    }

    pub fn empty() -> Self {
        Self { pairs: Vec::new() }
    }

    /// Builds a schedule from the interleaved turn order
    /// `(gamma_1, beta_1, ..., gamma_P, beta_P)`. The angle count must be even.
    pub fn from_interleaved(angles: &[f64]) -> Result<Self, QaoaError> {
        assert!(angles.len() % 2 == 0, "interleaved angle count must be even");
        Self::new(angles.chunks_exact(2).map(|c| (c[0], c[1])).collect())
    }

    /// Flattens back to the interleaved turn order.
    pub fn interleaved(&self) -> Vec<f64> {
        self.pairs.iter().flat_map(|&(g, b)| [g, b]).collect()
    }

    pub fn depth(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[(f64, f64)] {
        &self.pairs
    }

    pub fn gammas(&self) -> impl Iterator<Item = f64> + '_ {
        self.pairs.iter().map(|&(g, _)| g)
    }

    pub fn betas(&self) -> impl Iterator<Item = f64> + '_ {
        self.pairs.iter().map(|&(_, b)| b)
    }

    /// Schedule with every angle negated.
    pub fn negated(&self) -> Self {
        Self { pairs: self.pairs.iter().map(|&(g, b)| (-g, -b)).collect() }
    }

    /// Effective run time `tau = sum_i (|gamma_i| + |beta_i|)`.
    pub fn run_time(&self) -> f64 {
        self.pairs.iter().map(|&(g, b)| g.abs() + b.abs()).sum()
    }
}

/// A normalized complex amplitude vector over the computational basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    n: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    fn check_dim(&self, n: usize) -> Result<(), QaoaError> {
        if self.n != n {
            return Err(QaoaError::DimensionMismatch { found: self.amps.len(), qubits: n });
        }
        Ok(())
    }
}

/// The uniform superposition `|+>^n`, ground state of the mixer.
pub fn prepare_plus(n: usize) -> Result<Statevector, QaoaError> {
    if n == 0 || n > MAX_QUBITS {
        return Err(QaoaError::QubitCount(n, MAX_QUBITS));
    }
    let dim = 1usize << n;
    let amp = Complex64::new((dim as f64).sqrt().recip(), 0.0);
    Ok(Statevector { n, amps: vec![amp; dim] })
}

/// Multiplies each amplitude by `exp(-i * gamma * E_z)`.
pub fn apply_cost_phase(
    state: &Statevector,
    diagonal: &DiagonalCost,
    gamma: f64,
) -> Result<Statevector, QaoaError> {
    state.check_dim(diagonal.num_qubits())?;
    let mut out = state.clone();
    cost_phase_in_place(&mut out, diagonal, gamma);
    Ok(out)
}

/// Applies `exp(-i * beta * sigma^x)` on every qubit.
pub fn apply_mixer(state: &Statevector, n: usize, beta: f64) -> Result<Statevector, QaoaError> {
    state.check_dim(n)?;
    let mut out = state.clone();
    mixer_in_place(&mut out, beta);
    Ok(out)
}

fn cost_phase_in_place(state: &mut Statevector, diagonal: &DiagonalCost, gamma: f64) {
    for (amp, &e) in state.amps.iter_mut().zip(diagonal.energies()) {
        *amp *= Complex64::from_polar(1.0, -gamma * e);
    }
}

fn mixer_in_place(state: &mut Statevector, beta: f64) {
    let c = Complex64::new(beta.cos(), 0.0);
    let s = Complex64::new(0.0, -beta.sin());
    let dim = state.amps.len();
    for q in 0..state.n {
        let bit = 1usize << q;
        for i in 0..dim {
            if i & bit == 0 {
                let j = i | bit;
                let a = state.amps[i];
                let b = state.amps[j];
                state.amps[i] = c * a + s * b;
                state.amps[j] = s * a + c * b;
            }
        }
    }
}

/// The variational energy and the ground-space overlap of the prepared state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostValue {
    /// `F_P = <gamma, beta| H_C |gamma, beta>`.
    pub energy: f64,
    /// Total probability on the ground states of the diagonal.
    pub ground_overlap: f64,
}

/// Prepares the QAOA state for `schedule` and measures the diagonal cost.
pub fn evaluate_cost(diagonal: &DiagonalCost, schedule: &Schedule) -> CostValue {
    let mut state = prepare_plus(diagonal.num_qubits()).expect("diagonal qubit count in range");
    for &(gamma, beta) in schedule.pairs() {
        cost_phase_in_place(&mut state, diagonal, gamma);
        mixer_in_place(&mut state, beta);
    }
    let mut energy = 0.0;
    for (amp, &e) in state.amps.iter().zip(diagonal.energies()) {
        energy += amp.norm_sqr() * e;
    }
    let ground_overlap = diagonal
        .ground_states()
        .iter()
        .map(|&z| state.amps[z as usize].norm_sqr())
        .sum();
    CostValue { energy, ground_overlap }
}

/// The full statevector after applying every layer of `schedule`.
pub fn prepare_state(diagonal: &DiagonalCost, schedule: &Schedule) -> Statevector {
    let mut state = prepare_plus(diagonal.num_qubits()).expect("diagonal qubit count in range");
    for &(gamma, beta) in schedule.pairs() {
        cost_phase_in_place(&mut state, diagonal, gamma);
        mixer_in_place(&mut state, beta);
    }
    state
}
