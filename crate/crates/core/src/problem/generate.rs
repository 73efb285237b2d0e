use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Clause, Literal, MaxCutGraph, ProblemError, SatInstance};

const SAT_ATTEMPT_BUDGET: u64 = 5_000_000;
const GRAPH_ATTEMPT_BUDGET: u64 = 100_000;

/// Rejection-samples a random 3-SAT instance with `m = alpha * n` clauses and
/// exactly one satisfying assignment, verified by exhaustive enumeration.
/// Deterministic for a given seed.
pub fn generate_sat_unique(n: usize, alpha: f64, seed: u64) -> Result<SatInstance, ProblemError> {
    if n == 0 || n > 24 {
        return Err(ProblemError::InvalidInstance(format!(
            "n = {n} outside the brute-force verifiable range [1, 24]"
        )));
    }
    let m_exact = alpha * n as f64;
    let m = m_exact.round();
    if (m_exact - m).abs() > 1e-9 || m < 1.0 {
        return Err(ProblemError::InvalidInstance(format!(
            "alpha * n = {m_exact} is not a positive integer"
        )));
    }
    let m = m as usize;
    if n < 3 {
        return Err(ProblemError::InvalidInstance(
            "clauses need three distinct variables, so n >= 3".into(),
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 1..=SAT_ATTEMPT_BUDGET {
        let clauses: Vec<Clause> = (0..m).map(|_| random_clause(n, &mut rng)).collect();
        let inst = SatInstance::new(n, clauses)?;
        if count_solutions_capped(&inst, 2) == 1 {
            return Ok(inst);
        }
        if attempt == SAT_ATTEMPT_BUDGET {
            break;
        }
    }
    Err(ProblemError::GenerationFailed {
        attempts: SAT_ATTEMPT_BUDGET,
        reason: format!("no unique-solution instance at n = {n}, alpha = {alpha}"),
    })
}

fn random_clause(n: usize, rng: &mut ChaCha8Rng) -> Clause {
    let mut vars = [0usize; 3];
    let mut k = 0;
    while k < 3 {
        let v = rng.gen_range(0..n);
        if !vars[..k].contains(&v) {
            vars[k] = v;
            k += 1;
        }
    }
    [
        Literal { var: vars[0], negated: rng.gen() },
        Literal { var: vars[1], negated: rng.gen() },
        Literal { var: vars[2], negated: rng.gen() },
    ]
}

/// Counts satisfying assignments, stopping early once `cap` are found.
fn count_solutions_capped(inst: &SatInstance, cap: u32) -> u32 {
    let mut found = 0;
    for z in 0..(1u64 << inst.num_vars()) {
        if inst.energy(z).expect("in-range bitstring") == 0 {
            found += 1;
            if found >= cap {
                return found;
            }
        }
    }
    found
}

/// Samples a simple connected degree-regular graph via the pairing model,
/// rejecting any pairing with self-loops, multi-edges, or disconnection.
/// Deterministic for a given seed.
pub fn generate_regular_graph(
    n: usize,
    degree: usize,
    seed: u64,
) -> Result<MaxCutGraph, ProblemError> {
    if degree == 0 || degree >= n {
        return Err(ProblemError::InvalidInstance(format!(
            "degree {degree} impossible on {n} vertices"
        )));
    }
    if n * degree % 2 != 0 {
        return Err(ProblemError::InvalidInstance(format!(
            "n * degree = {} is odd",
            n * degree
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat(v).take(degree)).collect();

    'attempt: for _ in 0..GRAPH_ATTEMPT_BUDGET {
        stubs.shuffle(&mut rng);
        let mut edges = Vec::with_capacity(n * degree / 2);
        for pair in stubs.chunks_exact(2) {
            let (a, b) = (pair[0], pair[1]);
            if a == b {
                continue 'attempt;
            }
            let e = (a.min(b), a.max(b));
            if edges.contains(&e) {
                continue 'attempt;
            }
            edges.push(e);
        }
        let graph = MaxCutGraph::new(n, edges)?;
        if graph.is_connected() {
            return Ok(graph);
        }
    }
    Err(ProblemError::GenerationFailed {
        attempts: GRAPH_ATTEMPT_BUDGET,
        reason: format!("no simple connected {degree}-regular graph on {n} vertices"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::DiagonalCost;

    #[test]
    fn generated_instance_has_expected_shape() {
        let inst = generate_sat_unique(7, 3.0, 1).unwrap();
        assert_eq!(inst.num_vars(), 7);
        assert_eq!(inst.num_clauses(), 21);
        assert_eq!(inst.clause_density(), 3.0);
    }

    #[test]
    fn generation_is_deterministic() {
        let a = generate_sat_unique(7, 3.0, 99).unwrap();
        let b = generate_sat_unique(7, 3.0, 99).unwrap();
        assert_eq!(a, b);
        let c = generate_sat_unique(7, 3.0, 100).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn generated_instance_has_exactly_one_solution() {
        for seed in 0..4 {
            let inst = generate_sat_unique(6, 3.0, seed).unwrap();
            let diag = DiagonalCost::build(&inst.into()).unwrap();
            assert_eq!(diag.ground_energy(), 0.0);
            assert_eq!(diag.ground_states().len(), 1);
        }
    }

    #[test]
    fn non_integer_clause_count_rejected() {
        assert!(generate_sat_unique(7, 3.1, 0).is_err());
    }

    #[test]
    fn four_vertex_cubic_graph_is_k4() {
        for seed in 0..3 {
            let g = generate_regular_graph(4, 3, seed).unwrap();
            assert_eq!(g.num_edges(), 6);
        }
    }

    #[test]
    fn pairing_model_produces_connected_regular_graphs() {
        for seed in 0..5 {
            let g = generate_regular_graph(10, 3, seed).unwrap();
            assert_eq!(g.num_edges(), 15);
            for v in 0..10 {
                assert_eq!(g.degree(v), 3, "vertex {v} degree");
            }
            assert!(g.is_connected());
        }
    }

    #[test]
    fn graph_generation_is_deterministic() {
        let a = generate_regular_graph(10, 3, 5).unwrap();
        let b = generate_regular_graph(10, 3, 5).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn odd_stub_count_rejected() {
        assert!(generate_regular_graph(5, 3, 0).is_err());
    }
}
