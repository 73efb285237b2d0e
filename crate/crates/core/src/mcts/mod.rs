//! Monte Carlo Tree Search over discretized QAOA angle grids.
//!
//! Each game fixes the `2P` interleaved angles `(gamma_1, beta_1, ...,
//! gamma_P, beta_P)` one turn at a time. A turn runs a budgeted number of
//! four-stage cycles — UCT selection, uniform expansion, uniform-random
//! rollout, backpropagation — and then commits one move. Rewards map the
//! rollout energy through `exp(-nu * F)`; an optional Gaussian perturbation of
//! the energy models measurement noise. The single-player variant memorizes
//! the best rollout path seen and expands it into the stored tree between
//! turns.

mod game;
mod node;
mod space;

pub use game::{
    final_move, perturb_reward, play_game, reward, run_cycle, uct_select, GameResult,
    RolloutRecord,
};
pub use node::TreeNode;
pub use space::SearchSpace;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MctsError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("selection from a node with zero visits")]
    ZeroVisitParent,
    #[error("selection from a node with no children")]
    NoChildren,
    #[error("final move requested but no child has been visited")]
    NoVisitedChildren,
    #[error("best-path final move requested but no rollout path is memorized")]
    NoMemorizedPath,
    #[error("invalid search space: {0}")]
    InvalidSpace(String),
}

/// Which tree-policy modifications are active.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Plain UCT play.
    Vanilla,
    /// Memorize the best rollout path and expand it between turns.
    SinglePlayer,
}

/// Criterion for committing a move once a turn's cycles are exhausted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FinalMove {
    /// Child with the highest mean score `w/n`.
    MaxChild,
    /// Child with the highest visit count.
    RobustChild,
    /// Child on the memorized best rollout path.
    BestPath,
}

/// Cycle allotment per game.
///
/// With subtree reuse (the default), the first turn runs `initial + per_turn`
/// cycles, intermediate turns run `per_turn`, and the final turn runs none —
/// its best move is read off the retained statistics. The total for a
/// depth-`P` game is therefore `initial + per_turn * (2P - 1)`. Without
/// subtree reuse no statistics survive a commit, so the final turn runs
/// `per_turn` cycles like any other.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleBudget {
    pub initial: u32,
    pub per_turn: u32,
}

impl CycleBudget {
    pub fn new(initial: u32, per_turn: u32) -> Self {
        Self { initial, per_turn }
    }

    /// The benchmark allotment: 1000 initial cycles plus 800 per turn.
    pub fn benchmark() -> Self {
        Self { initial: 1000, per_turn: 800 }
    }

    /// Total evaluations for a depth-`p` game with subtree reuse:
    /// `initial + per_turn * (2p - 1)`.
    pub fn total(&self, p: usize) -> u64 {
        if p == 0 {
            return 0;
        }
        u64::from(self.initial) + u64::from(self.per_turn) * (2 * p as u64 - 1)
    }

    pub(crate) fn cycles_for_turn(&self, turn: usize, total_turns: usize, reuse: bool) -> u64 {
        let is_final = turn + 1 == total_turns;
        if is_final && reuse {
            0
        } else if turn == 0 {
            u64::from(self.initial) + u64::from(self.per_turn)
        } else {
            u64::from(self.per_turn)
        }
    }
}

/// Knobs of a single MCTS game.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MctsConfig {
    /// Exploration constant `C` in the UCT rule.
    pub exploration: f64,
    /// Reward exponent `nu` in `exp(-nu * F)`.
    pub reward_exponent: f64,
    pub budget: CycleBudget,
    /// Standard deviation of the Gaussian energy perturbation applied to
    /// rollout rewards; the final assessment is always noiseless.
    pub noise_sigma: f64,
    pub variant: Variant,
    pub final_move: FinalMove,
    /// Keep the committed child's subtree statistics across turns.
    pub reuse_subtree: bool,
    pub seed: u64,
}

impl Default for MctsConfig {
    fn default() -> Self {
        Self {
            exploration: std::f64::consts::SQRT_2,
            reward_exponent: 0.5,
            budget: CycleBudget::benchmark(),
            noise_sigma: 0.0,
            variant: Variant::Vanilla,
            final_move: FinalMove::MaxChild,
            reuse_subtree: true,
            seed: 0,
        }
    }
}

impl MctsConfig {
    /// Checks the config against the space it will play on. Every non-final
    /// turn must afford at least one cycle per child.
    pub fn validate(&self, space: &SearchSpace) -> Result<(), MctsError> {
        if !(self.exploration.is_finite() && self.exploration >= 0.0) {
            return Err(MctsError::InvalidConfig("exploration constant must be >= 0".into()));
        }
        if !(self.reward_exponent.is_finite() && self.reward_exponent > 0.0) {
            return Err(MctsError::InvalidConfig("reward exponent must be > 0".into()));
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return Err(MctsError::InvalidConfig("noise sigma must be >= 0".into()));
        }
        if space.turns() == 0 {
            return Err(MctsError::InvalidSpace("search space has no turns".into()));
        }
        let widest = (0..space.turns()).map(|t| space.grid(t).len()).max().unwrap_or(0);
        if u64::from(self.budget.per_turn) < widest as u64 {
            return Err(MctsError::InvalidConfig(format!(
                "per-turn budget {} below branching factor {widest}",
                self.budget.per_turn
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn benchmark_budget_totals() {
        let b = CycleBudget::benchmark();
        assert_eq!(b.total(1), 1800);
        assert_eq!(b.total(2), 3400);
        assert_eq!(b.total(10), 16200);
    }

    #[test]
    fn per_turn_split_matches_total() {
        let b = CycleBudget::new(1000, 800);
        for p in 1..=10usize {
            let turns = 2 * p;
            let sum: u64 = (0..turns).map(|t| b.cycles_for_turn(t, turns, true)).sum();
            assert_eq!(sum, b.total(p));
            assert_eq!(b.cycles_for_turn(turns - 1, turns, true), 0);
        }
    }

    #[test]
    fn no_reuse_gives_the_final_turn_cycles() {
        let b = CycleBudget::new(100, 60);
        assert_eq!(b.cycles_for_turn(1, 2, false), 60);
        let sum: u64 = (0..4).map(|t| b.cycles_for_turn(t, 4, false)).sum();
        assert_eq!(sum, 100 + 60 * 4);
    }

    #[test]
    fn config_validation_checks_budget_against_branching() {
        let space = SearchSpace::unrestricted(1, 30).unwrap();
        let mut cfg = MctsConfig { budget: CycleBudget::new(0, 29), ..Default::default() };
        assert!(cfg.validate(&space).is_err());
        cfg.budget = CycleBudget::new(0, 30);
        assert!(cfg.validate(&space).is_ok());
        cfg.reward_exponent = 0.0;
        assert!(cfg.validate(&space).is_err());
    }
}
