//! Classical optimization instances and their diagonal cost spectra.
//!
//! Bitstrings are little-endian: variable / vertex `i` is bit `i` of the
//! integer label, so bitstring `z` assigns `x_i = (z >> i) & 1`.

mod diagonal;
mod generate;
mod io;

pub use diagonal::DiagonalCost;
pub use generate::{generate_regular_graph, generate_sat_unique};
pub use io::{parse_dimacs, parse_edgelist, write_dimacs, write_edgelist};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Hard cap on qubit counts for exhaustive spectrum construction.
pub const DEFAULT_MAX_QUBITS: usize = 24;

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("instance with {n} variables exceeds the {max}-qubit limit")]
    TooLarge { n: usize, max: usize },
    #[error("generation failed after {attempts} attempts: {reason}")]
    GenerationFailed { attempts: u64, reason: String },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// One literal of a 3-SAT clause: a variable index and a negation flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Literal {
    pub var: usize,
    pub negated: bool,
}

impl Literal {
    pub fn positive(var: usize) -> Self {
        Self { var, negated: false }
    }

    pub fn negative(var: usize) -> Self {
        Self { var, negated: true }
    }

    /// Truth value of this literal under the assignment encoded by `z`.
    #[inline]
    pub fn satisfied_by(&self, z: u64) -> bool {
        ((z >> self.var) & 1 == 1) != self.negated
    }
}

/// A clause is a disjunction of exactly three literals.
pub type Clause = [Literal; 3];

/// A 3-SAT formula in conjunctive normal form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SatInstance {
    n: usize,
    clauses: Vec<Clause>,
    /// Precomputed per-clause (mask, pattern) pairs: clause `a` is violated by
    /// `z` exactly when `z & mask == pattern`.
    #[serde(skip)]
    violation_masks: Vec<(u64, u64)>,
}

impl SatInstance {
    pub fn new(n: usize, clauses: Vec<Clause>) -> Result<Self, ProblemError> {
        if n == 0 || n > 63 {
            return Err(ProblemError::InvalidInstance(format!(
                "variable count {n} outside [1, 63]"
            )));
        }
        for (a, clause) in clauses.iter().enumerate() {
            for lit in clause {
                if lit.var >= n {
                    return Err(ProblemError::InvalidInstance(format!(
                        "clause {a} references variable {} but n = {n}",
                        lit.var
                    )));
                }
            }
        }
        let violation_masks = clauses.iter().map(|c| clause_violation_mask(c)).collect();
        Ok(Self { n, clauses, violation_masks })
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    /// Clause density alpha = m / n.
    pub fn clause_density(&self) -> f64 {
        self.clauses.len() as f64 / self.n as f64
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    /// Number of clauses violated by the assignment `z`.
    ///
    /// A clause contributes 1 exactly when all three of its literals are
    /// false, which is the eigenvalue of the projector-product cost operator
    /// on the corresponding basis state.
    pub fn energy(&self, z: u64) -> Result<u32, ProblemError> {
        self.check_bitstring(z)?;
        Ok(self
            .violation_masks
            .iter()
            .filter(|&&(mask, pattern)| z & mask == pattern)
            .count() as u32)
    }

    fn check_bitstring(&self, z: u64) -> Result<(), ProblemError> {
        if self.n < 64 && z >> self.n != 0 {
            return Err(ProblemError::InvalidInstance(format!(
                "bitstring {z} does not fit in {} bits",
                self.n
            )));
        }
        Ok(())
    }
}

fn clause_violation_mask(clause: &Clause) -> (u64, u64) {
    let mut mask = 0u64;
    let mut pattern = 0u64;
    for lit in clause {
        mask |= 1 << lit.var;
        // A positive literal is false on bit 0, a negated one on bit 1.
        if lit.negated {
            pattern |= 1 << lit.var;
        }
    }
    (mask, pattern)
}

/// An undirected simple graph for unweighted MaxCut.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaxCutGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl MaxCutGraph {
    /// Builds a graph from a vertex count and an edge list. Edges are
    /// normalized to `(min, max)` order, deduplicated, and sorted; self-loops
    /// are rejected.
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self, ProblemError> {
        if n == 0 || n > 63 {
            return Err(ProblemError::InvalidInstance(format!(
                "vertex count {n} outside [1, 63]"
            )));
        }
        let mut normalized = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            if a == b {
                return Err(ProblemError::InvalidInstance(format!("self-loop at vertex {a}")));
            }
            if a >= n || b >= n {
                return Err(ProblemError::InvalidInstance(format!(
                    "edge ({a}, {b}) references a vertex >= n = {n}"
                )));
            }
            normalized.push((a.min(b), a.max(b)));
        }
        normalized.sort_unstable();
        normalized.dedup();
        Ok(Self { n, edges: normalized })
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Number of edges whose endpoints receive the same bit value (uncut
    /// edges). The cut size is `num_edges() - energy(z)`.
    pub fn energy(&self, z: u64) -> Result<u32, ProblemError> {
        if self.n < 64 && z >> self.n != 0 {
            return Err(ProblemError::InvalidInstance(format!(
                "bitstring {z} does not fit in {} bits",
                self.n
            )));
        }
        Ok(self
            .edges
            .iter()
            .filter(|&&(a, b)| (z >> a) & 1 == (z >> b) & 1)
            .count() as u32)
    }

    /// Cut size of the partition encoded by `z`.
    pub fn cut_size(&self, z: u64) -> Result<u32, ProblemError> {
        Ok(self.num_edges() as u32 - self.energy(z)?)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut adj = vec![Vec::new(); self.n];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.n
    }
}

/// A problem instance of either supported kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Instance {
    Sat(SatInstance),
    MaxCut(MaxCutGraph),
}

impl Instance {
    pub fn num_qubits(&self) -> usize {
        match self {
            Instance::Sat(s) => s.num_vars(),
            Instance::MaxCut(g) => g.num_vertices(),
        }
    }

    pub fn energy(&self, z: u64) -> Result<u32, ProblemError> {
        match self {
            Instance::Sat(s) => s.energy(z),
            Instance::MaxCut(g) => g.energy(z),
        }
    }

    pub fn diagonal(&self) -> Result<DiagonalCost, ProblemError> {
        DiagonalCost::build(self)
    }
}

impl From<SatInstance> for Instance {
    fn from(s: SatInstance) -> Self {
        Instance::Sat(s)
    }
}

impl From<MaxCutGraph> for Instance {
    fn from(g: MaxCutGraph) -> Self {
        Instance::MaxCut(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    /// Independent oracle: evaluate each clause from the formula text,
    /// counting clauses with no satisfied literal.
    fn direct_violation_count(inst: &SatInstance, z: u64) -> u32 {
        inst.clauses()
            .iter()
            .filter(|clause| !clause.iter().any(|lit| lit.satisfied_by(z)))
            .count() as u32
    }

    fn random_instance(n: usize, m: usize, rng: &mut StdRng) -> SatInstance {
        let mut clauses = Vec::with_capacity(m);
        for _ in 0..m {
            let mut vars = [0usize; 3];
            let mut k = 0;
            while k < 3 {
                let v = rng.gen_range(0..n);
                if !vars[..k].contains(&v) {
                    vars[k] = v;
                    k += 1;
                }
            }
            clauses.push([
                Literal { var: vars[0], negated: rng.gen() },
                Literal { var: vars[1], negated: rng.gen() },
                Literal { var: vars[2], negated: rng.gen() },
            ]);
        }
        SatInstance::new(n, clauses).unwrap()
    }

    #[test]
    fn single_clause_all_false_is_violated() {
        let inst = SatInstance::new(
            3,
            vec![[Literal::positive(0), Literal::positive(1), Literal::positive(2)]],
        )
        .unwrap();
        assert_eq!(inst.energy(0b000).unwrap(), 1);
        assert_eq!(inst.energy(0b001).unwrap(), 0);
        assert_eq!(inst.energy(0b110).unwrap(), 0);
    }

    #[test]
    fn satisfying_assignment_has_zero_energy() {
        // (x0 | ~x1 | x2) & (~x0 | x1 | x2): z = 0b100 satisfies both.
        let inst = SatInstance::new(
            3,
            vec![
                [Literal::positive(0), Literal::negative(1), Literal::positive(2)],
                [Literal::negative(0), Literal::positive(1), Literal::positive(2)],
            ],
        )
        .unwrap();
        assert_eq!(inst.energy(0b100).unwrap(), 0);
    }

    #[test]
    fn sat_energy_matches_direct_clause_oracle() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..50 {
            let inst = random_instance(5, 15, &mut rng);
            for z in 0..32u64 {
                assert_eq!(inst.energy(z).unwrap(), direct_violation_count(&inst, z));
            }
        }
    }

    #[test]
    fn clause_variable_out_of_range_rejected() {
        let err = SatInstance::new(
            2,
            vec![[Literal::positive(0), Literal::positive(1), Literal::positive(2)]],
        )
        .unwrap_err();
        assert!(matches!(err, ProblemError::InvalidInstance(_)));
    }

    #[test]
    fn bitstring_out_of_range_rejected() {
        let inst = SatInstance::new(
            3,
            vec![[Literal::positive(0), Literal::positive(1), Literal::positive(2)]],
        )
        .unwrap();
        assert!(inst.energy(8).is_err());
    }

    fn k4() -> MaxCutGraph {
        MaxCutGraph::new(4, vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap()
    }

    #[test]
    fn all_same_bits_cut_nothing() {
        let g = k4();
        assert_eq!(g.energy(0b0000).unwrap(), 6);
        assert_eq!(g.energy(0b1111).unwrap(), 6);
        assert_eq!(g.cut_size(0b0000).unwrap(), 0);
    }

    #[test]
    fn bipartition_of_bipartite_graph_cuts_everything() {
        // C4 cycle is bipartite with parts {0, 2} and {1, 3}.
        let g = MaxCutGraph::new(4, vec![(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        assert_eq!(g.energy(0b0101).unwrap(), 0);
        assert_eq!(g.cut_size(0b0101).unwrap(), 4);
    }

    #[test]
    fn k4_brute_force_max_cut() {
        let g = k4();
        assert_eq!(g.energy(0b0011).unwrap(), 2);
        assert_eq!(g.cut_size(0b0011).unwrap(), 4);
        let best = (0..16u64).map(|z| g.cut_size(z).unwrap()).max().unwrap();
        assert_eq!(best, 4);
    }

    #[test]
    fn self_loops_and_duplicates_rejected_or_merged() {
        assert!(MaxCutGraph::new(3, vec![(0, 0)]).is_err());
        let g = MaxCutGraph::new(3, vec![(0, 1), (1, 0), (1, 2)]).unwrap();
        assert_eq!(g.num_edges(), 2);
    }

    #[test]
    fn energy_plus_cut_is_edge_count() {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..20 {
            let n = rng.gen_range(2..8);
            let mut edges = Vec::new();
            for a in 0..n {
                for b in (a + 1)..n {
                    if rng.gen_bool(0.5) {
                        edges.push((a, b));
                    }
                }
            }
            let g = MaxCutGraph::new(n, edges).unwrap();
            for _ in 0..16 {
                let z = rng.gen_range(0..(1u64 << n));
                assert_eq!(
                    g.energy(z).unwrap() + g.cut_size(z).unwrap(),
                    g.num_edges() as u32
                );
            }
        }
    }
}
