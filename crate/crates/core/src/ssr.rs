//! Search-space restriction and the iterative depth-by-depth protocol.
//!
//! Once a depth-`P` optimum `(gamma*_1, beta*_1, ..., gamma*_P, beta*_P)` is
//! known, the depth `P+1` search runs on `b`-point grids confined to the
//! intervals between consecutive previous optima,
//!
//! ```text
//! gamma~_i in [gamma*_(i-1) (1 - delta), gamma*_i (1 + delta)]
//! beta~_i  in [beta*_(i-1)  (1 - delta), beta*_i  (1 + delta)]
//! ```
//!
//! for `i = 1 ..= P+1`, where `delta` softens the boundaries. The edge values
//! `gamma*_0`, `gamma*_(P+1)`, `beta*_0`, `beta*_(P+1)` default to the bounds
//! of the original action space, oriented along the regular structure of QAOA
//! schedules (`gamma` ascends with the layer index, `beta` descends): the
//! first gamma interval opens downward to `gamma_low` and the last one upward
//! to `gamma_high`, while for beta the first interval opens upward to
//! `beta_high` and the last one downward to `beta_low`. Inverted intervals
//! produced by the multiplicative softening are normalized by swapping.
//!
//! Iterating from the unrestricted, symmetry-halved `P = 1` search gives the
//! full protocol; the restriction breaks inversion symmetry, so restricted
//! trees carry the full `b^(2(P+1))` leaves. The per-depth trees still grow
//! exponentially in `P` even though each depth is only sampled with a
//! linearly growing cycle budget.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mcts::{play_game, GameResult, MctsConfig, MctsError, SearchSpace};
use crate::problem::DiagonalCost;
use crate::qaoa::{evaluate_cost, Schedule};
use crate::seeding::derive_seed;

#[derive(Debug, Error)]
pub enum SsrError {
    #[error("invalid restriction parameters: {0}")]
    Invalid(String),
    #[error(transparent)]
    Mcts(#[from] MctsError),
    #[error("checkpoint I/O failed: {0}")]
    Io(#[from] std::io::Error),
    #[error("checkpoint is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
}

/// Per-depth softening constants `delta_P`, indexed from depth 1. Depths past
/// the end of the list reuse the last entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SofteningSchedule {
    deltas: Vec<f64>,
}

impl SofteningSchedule {
    pub fn new(deltas: Vec<f64>) -> Result<Self, SsrError> {
        if deltas.is_empty() {
            return Err(SsrError::Invalid("softening schedule is empty".into()));
        }
        if deltas.iter().any(|d| !d.is_finite() || *d < 0.0) {
            return Err(SsrError::Invalid("softening constants must be finite and >= 0".into()));
        }
        Ok(Self { deltas })
    }

    /// The benchmark schedule: `delta_1 = delta_2 = 0`, then a nonlinear
    /// decrease from 0.1 down to 0.01.
    pub fn benchmark() -> Self {
        Self { deltas: vec![0.0, 0.0, 0.1, 0.05, 0.04, 0.03, 0.02, 0.01, 0.01] }
    }

    pub fn constant(delta: f64) -> Result<Self, SsrError> {
        Self::new(vec![delta])
    }

    /// `delta_P` for a 1-based depth, extending past the list with the last
    /// listed value.
    pub fn delta_for_depth(&self, p: usize) -> f64 {
        assert!(p >= 1, "depths are 1-based");
        self.deltas[(p - 1).min(self.deltas.len() - 1)]
    }

    pub fn deltas(&self) -> &[f64] {
        &self.deltas
    }
}

/// Boundary values standing in for the edge optima `gamma*_0`,
/// `gamma*_(P+1)`, `beta*_0`, and `beta*_(P+1)` in the restriction intervals.
///
/// With `epsilon_pinch` set, each edge is moved a fraction `epsilon` of the
/// way from its configured value toward the adjacent previous optimum, which
/// keeps the edge grids from losing resolution at large depth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RestrictionEdges {
    pub gamma_low: f64,
    pub gamma_high: f64,
    pub beta_low: f64,
    pub beta_high: f64,
    pub epsilon_pinch: Option<f64>,
}

impl Default for RestrictionEdges {
    fn default() -> Self {
        Self {
            gamma_low: 0.0,
            gamma_high: std::f64::consts::TAU,
            beta_low: 0.0,
            beta_high: std::f64::consts::TAU,
            epsilon_pinch: None,
        }
    }
}

impl RestrictionEdges {
    fn validate(&self) -> Result<(), SsrError> {
        let vals = [self.gamma_low, self.gamma_high, self.beta_low, self.beta_high];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(SsrError::Invalid("edge bounds must be finite".into()));
        }
        if self.gamma_low > self.gamma_high || self.beta_low > self.beta_high {
            return Err(SsrError::Invalid("edge bounds must satisfy low <= high".into()));
        }
        if let Some(eps) = self.epsilon_pinch {
            if !(0.0..1.0).contains(&eps) {
                return Err(SsrError::Invalid(format!("epsilon pinch {eps} outside [0, 1)")));
            }
        }
        Ok(())
    }
}

/// Builds the depth `P+1` search space confined around a depth-`P` optimum.
///
/// Every grid has `b` evenly spaced points spanning its softened interval
/// inclusive of both ends; a degenerate interval collapses to `b` copies of
/// one value. Bounds that sit exactly at zero, where the multiplicative
/// softening is inert, are pushed outward by one grid cell's worth of margin,
/// `delta * pi / b`.
pub fn restrict(
    previous: &Schedule,
    delta: f64,
    edges: &RestrictionEdges,
    b: usize,
) -> Result<SearchSpace, SsrError> {
    if b < 2 {
        return Err(SsrError::Invalid(format!("branching factor {b} below 2")));
    }
    if !delta.is_finite() || delta < 0.0 {
        return Err(SsrError::Invalid(format!("softening constant {delta} must be >= 0")));
    }
    edges.validate()?;
    let p_old = previous.depth();
    if p_old == 0 {
        return Err(SsrError::Invalid("previous optimum must have depth >= 1".into()));
    }

    let gammas: Vec<f64> = previous.gammas().collect();
    let betas: Vec<f64> = previous.betas().collect();

    // gamma ascends with the layer index, beta descends; orient the edge
    // stand-ins accordingly and optionally pinch them toward the previous
    // edge optima.
    let pinch = |edge: f64, toward: f64| match edges.epsilon_pinch {
        Some(eps) => edge + eps * (toward - edge),
        None => edge,
    };
    let gamma_first = pinch(edges.gamma_low, gammas[0]);
    let gamma_last = pinch(edges.gamma_high, gammas[p_old - 1]);
    let beta_first = pinch(edges.beta_high, betas[0]);
    let beta_last = pinch(edges.beta_low, betas[p_old - 1]);

    let gamma_star = |i: usize| -> f64 {
        if i == 0 {
            gamma_first
        } else if i <= p_old {
            gammas[i - 1]
        } else {
            gamma_last
        }
    };
    let beta_star = |i: usize| -> f64 {
        if i == 0 {
            beta_first
        } else if i <= p_old {
            betas[i - 1]
        } else {
            beta_last
        }
    };

    let p_new = p_old + 1;
    let mut grids = Vec::with_capacity(2 * p_new);
    for i in 1..=p_new {
        grids.push(softened_grid(gamma_star(i - 1), gamma_star(i), delta, b));
        grids.push(softened_grid(beta_star(i - 1), beta_star(i), delta, b));
    }
    Ok(SearchSpace::from_grids(grids)?)
}

fn softened_grid(lower_star: f64, upper_star: f64, delta: f64, b: usize) -> Vec<f64> {
    let mut lo = lower_star * (1.0 - delta);
    let mut hi = upper_star * (1.0 + delta);
    if lo > hi {
        std::mem::swap(&mut lo, &mut hi);
    }
    let margin = delta * PI / b as f64;
    if lo == 0.0 {
        lo = -margin;
    }
    if hi == 0.0 {
        hi = margin;
    }
    linspace(lo, hi, b)
}

fn linspace(lo: f64, hi: f64, b: usize) -> Vec<f64> {
    let step = (hi - lo) / (b - 1) as f64;
    (0..b).map(|k| if k == b - 1 { hi } else { lo + k as f64 * step }).collect()
}

/// Whether the spectrum is invariant under the global bit flip, which makes
/// every mixer angle individually pi-periodic (true for MaxCut, generally
/// false for 3-SAT).
pub fn is_flip_invariant(diagonal: &DiagonalCost) -> bool {
    let mask = (diagonal.dim() - 1) as u64;
    (0..diagonal.dim() as u64).all(|z| diagonal.energy(z) == diagonal.energy(!z & mask))
}

/// Wraps `x` into `[-window, period - window)`.
fn wrap_with_window(x: f64, period: f64, window: f64) -> f64 {
    (x + window).rem_euclid(period) - window
}

/// Maps a committed schedule onto its canonical symmetric representative so
/// the restriction intervals line up with the regular schedule structure:
/// all angles are reduced modulo their period (2 pi, or pi for the mixer
/// angles of flip-invariant spectra), keeping a small window below zero so
/// margin values are not thrown across the period. The represented state is
/// unchanged.
pub fn canonicalize_schedule(schedule: &Schedule, flip_invariant: bool, b: usize) -> Schedule {
    use std::f64::consts::TAU;
    let window = PI / (2 * b.max(2)) as f64;
    let pairs = schedule
        .pairs()
        .iter()
        .map(|&(gamma, beta)| {
            let gamma = wrap_with_window(gamma, TAU, window);
            let beta = if flip_invariant {
                wrap_with_window(beta, PI, window)
            } else {
                wrap_with_window(beta, TAU, window)
            };
            (gamma, beta)
        })
        .collect();
    Schedule::new(pairs).expect("wrapped angles are finite")
}

/// Runs the iterative protocol on one instance: depth 1 plays on the
/// unrestricted symmetry-halved space, and every subsequent depth on the
/// restriction around the previous depth's committed schedule. Returns one
/// result per depth `1 ..= p_max`.
///
/// Committed schedules are canonicalized through exact symmetries of the
/// instance before each restriction (see [`canonicalize_schedule`]); for
/// flip-invariant spectra the first-beta edge also tightens from the default
/// `2 pi` to the symmetry-reduced `pi`. Both keep the restriction intervals
/// aligned with the regular schedule structure the method relies on.
///
/// Per-depth RNG seeds derive from `config.seed` and the depth, so a full run
/// is a pure function of its arguments. With `checkpoint_dir` set, each depth
/// is written to `depth_<P>.json` after it finishes and is loaded instead of
/// replayed on a rerun.
pub fn run_iterative(
    diagonal: &DiagonalCost,
    p_max: usize,
    config: &MctsConfig,
    branching: usize,
    softening: &SofteningSchedule,
    edges: &RestrictionEdges,
    checkpoint_dir: Option<&Path>,
) -> Result<Vec<GameResult>, SsrError> {
    if p_max < 1 {
        return Err(SsrError::Invalid("p_max must be at least 1".into()));
    }
    if let Some(dir) = checkpoint_dir {
        fs::create_dir_all(dir)?;
    }

    let flip_invariant = is_flip_invariant(diagonal);
    let mut edges = *edges;
    if flip_invariant && edges.beta_high == std::f64::consts::TAU {
        edges.beta_high = PI;
    }

    let mut results: Vec<GameResult> = Vec::with_capacity(p_max);
    let mut space = SearchSpace::unrestricted(1, branching)?;

    for p in 1..=p_max {
        let checkpoint = checkpoint_dir.map(|d| d.join(format!("depth_{p:02}.json")));
        let result = match checkpoint.as_ref().filter(|path| path.exists()) {
            Some(path) => serde_json::from_str::<GameResult>(&fs::read_to_string(path)?)?,
            None => {
                let depth_config =
                    MctsConfig { seed: derive_seed(config.seed, &[p as u64]), ..*config };
                let result = play_game(
                    &space,
                    |_: &[usize], s: &Schedule| evaluate_cost(diagonal, s).energy,
                    &depth_config,
                )?;
                if let Some(path) = &checkpoint {
                    fs::write(path, serde_json::to_string_pretty(&result)?)?;
                }
                result
            }
        };

        if p < p_max {
            let anchor = canonicalize_schedule(&result.schedule, flip_invariant, branching);
            let delta = softening.delta_for_depth(p + 1);
            space = restrict(&anchor, delta, &edges, branching)?;
        }
        results.push(result);
    }
    Ok(results)
}
