use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::mcts::MctsError;
use crate::qaoa::Schedule;

/// Per-turn angle grids for a depth-`P` game: `2P` ordered lists of values,
/// turn `t` fixing parameter `t` of the interleaved sequence
/// `(gamma_1, beta_1, ..., gamma_P, beta_P)`.
///
/// An unrestricted space additionally halves the tree through the inversion
/// symmetry `F(-gamma, -beta) = F(gamma, beta)`: of the `b^(2P)` index tuples
/// it keeps the lexicographically first `ceil(b^(2P) / 2)`, which confines the
/// first parameter to `[0, pi)`. Restricted spaces carry no halving.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    grids: Vec<Vec<f64>>,
    /// Largest admitted index tuple (inclusive, lexicographic), present only
    /// on symmetry-halved spaces.
    half_bound: Option<Vec<usize>>,
}

impl SearchSpace {
    /// The standard depth-`p` space: `b` evenly spaced points over `[0, 2pi)`
    /// per turn, with the symmetry halving applied.
    pub fn unrestricted(p: usize, b: usize) -> Result<Self, MctsError> {
        let mut space = Self::full(p, b)?;
        let turns = 2 * p;
        // ceil(b^(2P) / 2) - 1 in base-b digits, most significant first.
        let bound = if b % 2 == 0 {
            let mut d = vec![b - 1; turns];
            d[0] = b / 2 - 1;
            d
        } else {
            vec![(b - 1) / 2; turns]
        };
        space.half_bound = Some(bound);
        Ok(space)
    }

    /// The same grids as [`SearchSpace::unrestricted`] without the halving.
    pub fn full(p: usize, b: usize) -> Result<Self, MctsError> {
        if p == 0 {
            return Err(MctsError::InvalidSpace("depth must be at least 1".into()));
        }
        if b < 2 {
            return Err(MctsError::InvalidSpace(format!("branching factor {b} below 2")));
        }
        let step = TAU / b as f64;
        let grid: Vec<f64> = (0..b).map(|k| k as f64 * step).collect();
        Ok(Self { grids: vec![grid; 2 * p], half_bound: None })
    }

    /// Builds a space from explicit per-turn grids (no halving). Grids must be
    /// non-empty, ascending (ties allowed), and finite, and the turn count
    /// must be even.
    pub fn from_grids(grids: Vec<Vec<f64>>) -> Result<Self, MctsError> {
        if grids.is_empty() || grids.len() % 2 != 0 {
            return Err(MctsError::InvalidSpace(format!(
                "turn count {} is not a positive even number",
                grids.len()
            )));
        }
        for (t, grid) in grids.iter().enumerate() {
            if grid.is_empty() {
                return Err(MctsError::InvalidSpace(format!("turn {t} grid is empty")));
            }
            if grid.iter().any(|v| !v.is_finite()) {
                return Err(MctsError::InvalidSpace(format!("turn {t} grid has a non-finite value")));
            }
            if grid.windows(2).any(|w| w[0] > w[1]) {
                return Err(MctsError::InvalidSpace(format!("turn {t} grid is not ascending")));
            }
        }
        Ok(Self { grids, half_bound: None })
    }

    pub fn turns(&self) -> usize {
        self.grids.len()
    }

    /// Circuit depth `P` (half the turn count).
    pub fn depth(&self) -> usize {
        self.grids.len() / 2
    }

    pub fn is_halved(&self) -> bool {
        self.half_bound.is_some()
    }

    pub fn grid(&self, turn: usize) -> &[f64] {
        &self.grids[turn]
    }

    pub fn grids(&self) -> &[Vec<f64>] {
        &self.grids
    }

    /// Number of admissible choices at turn `prefix.len()` after the choices
    /// in `prefix`. Equals the grid size except on the halving boundary.
    pub fn num_choices(&self, prefix: &[usize]) -> usize {
        let turn = prefix.len();
        debug_assert!(turn < self.turns());
        match &self.half_bound {
            Some(bound) if prefix == &bound[..turn] => bound[turn] + 1,
            _ => self.grids[turn].len(),
        }
    }

    /// The angle fixed by choosing grid index `idx` at `turn`.
    pub fn angle(&self, turn: usize, idx: usize) -> f64 {
        self.grids[turn][idx]
    }

    /// Assembles the schedule selected by a complete index tuple.
    pub fn schedule(&self, indices: &[usize]) -> Schedule {
        assert_eq!(indices.len(), self.turns(), "index tuple must cover every turn");
        let angles: Vec<f64> =
            indices.iter().enumerate().map(|(t, &k)| self.grids[t][k]).collect();
        Schedule::from_interleaved(&angles).expect("grid angles are finite")
    }

    /// Exact leaf count, or `None` when it overflows `u128`.
    pub fn leaf_count(&self) -> Option<u128> {
        match &self.half_bound {
            None => {
                let mut total = 1u128;
                for grid in &self.grids {
                    total = total.checked_mul(grid.len() as u128)?;
                }
                Some(total)
            }
            Some(bound) => {
                // Number of tuples lexicographically <= bound.
                let mut value = 0u128;
                for (t, &d) in bound.iter().enumerate() {
                    value = value
                        .checked_mul(self.grids[t].len() as u128)?
                        .checked_add(d as u128)?;
                }
                value.checked_add(1)
            }
        }
    }

    /// Iterates all admissible index tuples in lexicographic order.
    pub fn leaves(&self) -> LeafIter<'_> {
        LeafIter { space: self, next: Some(vec![0; self.turns()]) }
    }
}

/// Lexicographic iterator over the admissible leaves of a [`SearchSpace`].
pub struct LeafIter<'a> {
    space: &'a SearchSpace,
    next: Option<Vec<usize>>,
}

impl Iterator for LeafIter<'_> {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Self::Item> {
        let current = self.next.take()?;
        // Odometer increment with prefix-dependent radix.
        let mut candidate = current.clone();
        let mut pos = candidate.len();
        loop {
            if pos == 0 {
                self.next = None;
                break;
            }
            pos -= 1;
            candidate[pos] += 1;
            if candidate[pos] < self.space.num_choices(&candidate[..pos]) {
                for v in candidate[pos + 1..].iter_mut() {
                    *v = 0;
                }
                self.next = Some(candidate);
                break;
            }
        }
        Some(current)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn unrestricted_even_branching_counts() {
        let space = SearchSpace::unrestricted(2, 30).unwrap();
        assert_eq!(space.leaf_count(), Some(405_000));
        assert_eq!(space.num_choices(&[]), 15);
        assert_eq!(space.num_choices(&[0]), 30);
        assert_eq!(space.num_choices(&[14, 29]), 30);
    }

    #[test]
    fn unrestricted_odd_branching_counts() {
        let space = SearchSpace::unrestricted(1, 5).unwrap();
        assert_eq!(space.leaf_count(), Some(13));
        assert_eq!(space.num_choices(&[]), 3);
        assert_eq!(space.num_choices(&[0]), 5);
        assert_eq!(space.num_choices(&[1]), 5);
        // On the halving boundary only the first 3 of 5 second-turn values
        // remain admissible.
        assert_eq!(space.num_choices(&[2]), 3);
        assert_eq!(space.leaves().count(), 13);
    }

    #[test]
    fn tiny_halved_space_has_two_leaves() {
        let space = SearchSpace::unrestricted(1, 2).unwrap();
        assert_eq!(space.leaf_count(), Some(2));
        let leaves: Vec<_> = space.leaves().collect();
        assert_eq!(leaves, vec![vec![0, 0], vec![0, 1]]);
    }

    #[test]
    fn first_parameter_confined_below_pi() {
        let space = SearchSpace::unrestricted(3, 30).unwrap();
        let first = space.num_choices(&[]);
        for k in 0..first {
            assert!(space.angle(0, k) < PI + 1e-12);
        }
        // All remaining turns span [0, 2pi).
        for t in 1..space.turns() {
            assert_eq!(space.grid(t).len(), 30);
            assert!(space.angle(t, 29) < TAU);
        }
    }

    #[test]
    fn full_space_has_no_halving() {
        let space = SearchSpace::full(2, 3).unwrap();
        assert_eq!(space.leaf_count(), Some(81));
        assert_eq!(space.leaves().count(), 81);
    }

    #[test]
    fn leaf_iteration_is_lexicographic_and_complete() {
        let space = SearchSpace::unrestricted(1, 30).unwrap();
        let leaves: Vec<_> = space.leaves().collect();
        assert_eq!(leaves.len(), 450);
        assert!(leaves.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(leaves[0], vec![0, 0]);
        assert_eq!(leaves[449], vec![14, 29]);
    }

    #[test]
    fn schedule_assembly_uses_grid_angles() {
        let space =
            SearchSpace::from_grids(vec![vec![0.0, 0.5, 1.0], vec![0.25, 0.75, 1.25]]).unwrap();
        let sched = space.schedule(&[2, 0]);
        assert_eq!(sched.pairs(), &[(1.0, 0.25)]);
    }

    #[test]
    fn invalid_grids_rejected() {
        assert!(SearchSpace::from_grids(vec![]).is_err());
        assert!(SearchSpace::from_grids(vec![vec![0.0]]).is_err());
        assert!(SearchSpace::from_grids(vec![vec![1.0, 0.0], vec![0.0]]).is_err());
        assert!(SearchSpace::from_grids(vec![vec![f64::NAN], vec![0.0]]).is_err());
        assert!(SearchSpace::unrestricted(0, 30).is_err());
        assert!(SearchSpace::unrestricted(1, 1).is_err());
    }

    #[test]
    fn degenerate_grids_allowed() {
        let space = SearchSpace::from_grids(vec![vec![0.3; 4], vec![0.0, 0.1, 0.2, 0.3]]).unwrap();
        assert_eq!(space.leaf_count(), Some(16));
    }
}
