//! Shared test oracles, independent of the library's simulation path.

use num_complex::Complex64;
use qaoa_mcts::problem::DiagonalCost;
use qaoa_mcts::qaoa::Schedule;

/// Dense transverse-field matrix: `M[i][j] = 1` when `i` and `j` differ in
/// exactly one bit.
fn mixer_matrix(n: usize) -> Vec<f64> {
    let dim = 1usize << n;
    let mut m = vec![0.0; dim * dim];
    for i in 0..dim {
        for q in 0..n {
            let j = i ^ (1 << q);
            m[i * dim + j] = 1.0;
        }
    }
    m
}

fn mat_mul(a: &[Complex64], b: &[Complex64], dim: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        for k in 0..dim {
            let aik = a[i * dim + k];
            if aik == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..dim {
                out[i * dim + j] += aik * b[k * dim + j];
            }
        }
    }
    out
}

/// `exp(A)` by scaling and squaring with a Taylor series, for a complex
/// matrix given with its infinity norm bound.
fn expm(a: &[Complex64], norm_bound: f64, dim: usize) -> Vec<Complex64> {
    let squarings = if norm_bound > 0.5 {
        (norm_bound / 0.5).log2().ceil().max(0.0) as u32
    } else {
        0
    };
    let scale = 2f64.powi(squarings as i32);
    let scaled: Vec<Complex64> = a.iter().map(|x| x / scale).collect();

    // Taylor series; terms decay faster than (1/2)^k / k!.
    let mut result = vec![Complex64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        result[i * dim + i] = Complex64::new(1.0, 0.0);
    }
    let mut term = result.clone();
    for k in 1..=25 {
        term = mat_mul(&term, &scaled, dim);
        for v in term.iter_mut() {
            *v /= k as f64;
        }
        for (r, t) in result.iter_mut().zip(&term) {
            *r += t;
        }
    }

    for _ in 0..squarings {
        result = mat_mul(&result, &result, dim);
    }
    result
}

/// Prepares the variational state by dense matrix algebra: an exact diagonal
/// phase for the cost factor and a scaling-and-squaring matrix exponential
/// for the mixer factor of every layer.
pub fn dense_state(diagonal: &DiagonalCost, schedule: &Schedule) -> Vec<Complex64> {
    let n = diagonal.num_qubits();
    let dim = 1usize << n;
    let mixer = mixer_matrix(n);

    let mut state = vec![Complex64::new((dim as f64).sqrt().recip(), 0.0); dim];
    for &(gamma, beta) in schedule.pairs() {
        for (z, amp) in state.iter_mut().enumerate() {
            *amp *= Complex64::from_polar(1.0, -gamma * diagonal.energy(z as u64));
        }
        let a: Vec<Complex64> =
            mixer.iter().map(|&m| Complex64::new(0.0, -beta * m)).collect();
        let u = expm(&a, beta.abs() * n as f64, dim);
        let mut next = vec![Complex64::new(0.0, 0.0); dim];
        for i in 0..dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..dim {
                acc += u[i * dim + j] * state[j];
            }
            next[i] = acc;
        }
        state = next;
    }
    state
}

/// The variational energy computed entirely through the dense route.
pub fn dense_energy(diagonal: &DiagonalCost, schedule: &Schedule) -> f64 {
    dense_state(diagonal, schedule)
        .iter()
        .enumerate()
        .map(|(z, amp)| amp.norm_sqr() * diagonal.energy(z as u64))
        .sum()
}
