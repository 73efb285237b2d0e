//! Hybrid optimizers combining tree search with quasi-Newton local descent.
//!
//! Two schemes are provided. In the first, plain MCTS proposes a schedule
//! that seeds a local minimization over the continuous angles
//! ([`mcts_then_descend`]); even high-energy proposals often sit on the slope
//! of a good minimum. In the second, every rollout endpoint is locally
//! minimized and the *minimized* energy becomes the reward
//! ([`basin_rollout_game`]), so the search sees a landscape of flat basins.
//! Minimizations are memoized per leaf, but each rollout still costs a full
//! descent the first time its leaf is reached, so cycle budgets are kept
//! modest.
//!
//! The local minimizer is a BFGS update with central finite-difference
//! gradients and a backtracking Armijo line search.

use std::cell::RefCell;
use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mcts::{play_game, GameResult, MctsConfig, MctsError, SearchSpace};
use crate::problem::DiagonalCost;
use crate::qaoa::{evaluate_cost, Schedule};
use crate::seeding::derive_seed;

#[derive(Debug, Error)]
pub enum HybridError {
    #[error("minimizer failed: {0}")]
    MinimizerFailure(String),
    #[error(transparent)]
    Mcts(#[from] MctsError),
    #[error("invalid arguments: {0}")]
    Invalid(String),
    #[error("trace I/O failed: {0}")]
    Io(#[from] std::io::Error),
    #[error("trace is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
}

/// Settings of the finite-difference BFGS minimizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalMinimizerConfig {
    /// Central finite-difference step, radians.
    pub fd_step: f64,
    /// Convergence tolerance on the gradient norm.
    pub grad_tol: f64,
    pub max_iters: usize,
}

impl Default for LocalMinimizerConfig {
    fn default() -> Self {
        Self { fd_step: 1e-5, grad_tol: 1e-6, max_iters: 500 }
    }
}

impl LocalMinimizerConfig {
    fn validate(&self) -> Result<(), HybridError> {
        if !(self.fd_step.is_finite() && self.fd_step > 0.0) {
            return Err(HybridError::Invalid("finite-difference step must be > 0".into()));
        }
        if !(self.grad_tol.is_finite() && self.grad_tol > 0.0) {
            return Err(HybridError::Invalid("gradient tolerance must be > 0".into()));
        }
        Ok(())
    }
}

/// Result of one local minimization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Descent {
    pub schedule: Schedule,
    pub energy: f64,
    /// Finite-difference gradient norm at the returned point.
    pub grad_norm: f64,
    pub iterations: usize,
    /// Cost evaluations consumed, line search and gradients included.
    pub n_fev: u64,
    /// Whether the gradient tolerance was met before the iteration cap.
    pub converged: bool,
}

/// Locally minimizes the exact QAOA energy from `start`.
pub fn local_minimize(
    diagonal: &DiagonalCost,
    start: &Schedule,
    config: &LocalMinimizerConfig,
) -> Result<Descent, HybridError> {
    minimize_with(
        |angles| {
            let schedule = Schedule::from_interleaved(angles).expect("finite iterates");
            evaluate_cost(diagonal, &schedule).energy
        },
        start,
        config,
    )
}

/// BFGS descent of an arbitrary cost over the interleaved angle vector.
/// Iterates decrease monotonically, so the returned energy never exceeds the
/// start energy. A non-finite cost value aborts with diagnostics.
pub fn minimize_with<F>(
    mut f: F,
    start: &Schedule,
    config: &LocalMinimizerConfig,
) -> Result<Descent, HybridError>
where
    F: FnMut(&[f64]) -> f64,
{
    config.validate()?;
    let mut x = start.interleaved();
    let dim = x.len();
    let mut n_fev = 0u64;
    let mut fx = eval_checked(&mut f, &x, &mut n_fev)?;

    if dim == 0 {
        return Ok(Descent {
            schedule: start.clone(),
            energy: fx,
            grad_norm: 0.0,
            iterations: 0,
            n_fev,
            converged: true,
        });
    }

    let h = config.fd_step;
    let mut grad = central_gradient(&mut f, &x, h, &mut n_fev)?;
    let mut h_inv = identity(dim);
    let mut iterations = 0;
    let mut converged = norm(&grad) <= config.grad_tol;

    while !converged && iterations < config.max_iters {
        iterations += 1;

        let mut dir = neg_matvec(&h_inv, &grad, dim);
        let mut slope = dot(&dir, &grad);
        if !(slope < 0.0) {
            // Curvature information went bad; restart from steepest descent.
            h_inv = identity(dim);
            dir = grad.iter().map(|g| -g).collect();
            slope = -dot(&grad, &grad);
            if slope == 0.0 {
                break;
            }
        }

        // Backtracking Armijo line search.
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let cand: Vec<f64> = x.iter().zip(&dir).map(|(xi, di)| xi + alpha * di).collect();
            let fc = eval_checked(&mut f, &cand, &mut n_fev)?;
            if fc <= fx + 1e-4 * alpha * slope {
                accepted = Some((cand, fc));
                break;
            }
            alpha *= 0.5;
        }
        let Some((x_new, f_new)) = accepted else {
            break;
        };

        let grad_new = central_gradient(&mut f, &x_new, h, &mut n_fev)?;
        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = grad_new.iter().zip(&grad).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * norm(&s) * norm(&y) {
            bfgs_update(&mut h_inv, &s, &y, sy, dim);
        }

        x = x_new;
        fx = f_new;
        grad = grad_new;
        converged = norm(&grad) <= config.grad_tol;
    }

    Ok(Descent {
        schedule: Schedule::from_interleaved(&x)
            .map_err(|_| HybridError::MinimizerFailure("non-finite iterate".into()))?,
        energy: fx,
        grad_norm: norm(&grad),
        iterations,
        n_fev,
        converged,
    })
}

fn eval_checked<F: FnMut(&[f64]) -> f64>(
    f: &mut F,
    x: &[f64],
    n_fev: &mut u64,
) -> Result<f64, HybridError> {
    *n_fev += 1;
    let value = f(x);
    if !value.is_finite() {
        return Err(HybridError::MinimizerFailure(format!(
            "cost returned {value} at {x:?} after {n_fev} evaluations"
        )));
    }
    Ok(value)
}

/// Central finite differences, `(f(x + h e_i) - f(x - h e_i)) / 2h`.
pub fn central_gradient<F: FnMut(&[f64]) -> f64>(
    f: &mut F,
    x: &[f64],
    h: f64,
    n_fev: &mut u64,
) -> Result<Vec<f64>, HybridError> {
    let mut grad = vec![0.0; x.len()];
    let mut probe = x.to_vec();
    for i in 0..x.len() {
        probe[i] = x[i] + h;
        let fp = eval_checked(f, &probe, n_fev)?;
        probe[i] = x[i] - h;
        let fm = eval_checked(f, &probe, n_fev)?;
        probe[i] = x[i];
        grad[i] = (fp - fm) / (2.0 * h);
    }
    Ok(grad)
}

fn identity(dim: usize) -> Vec<f64> {
    let mut m = vec![0.0; dim * dim];
    for i in 0..dim {
        m[i * dim + i] = 1.0;
    }
    m
}

fn neg_matvec(m: &[f64], v: &[f64], dim: usize) -> Vec<f64> {
    (0..dim).map(|i| -(0..dim).map(|j| m[i * dim + j] * v[j]).sum::<f64>()).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

/// `H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T` with `rho = 1 / s^T y`.
fn bfgs_update(h_inv: &mut [f64], s: &[f64], y: &[f64], sy: f64, dim: usize) {
    let rho = 1.0 / sy;
    let hy: Vec<f64> = (0..dim).map(|i| (0..dim).map(|j| h_inv[i * dim + j] * y[j]).sum()).collect();
    let yhy = dot(y, &hy);
    let coeff = rho * (1.0 + rho * yhy);
    for i in 0..dim {
        for j in 0..dim {
            h_inv[i * dim + j] +=
                coeff * s[i] * s[j] - rho * (s[i] * hy[j] + hy[i] * s[j]);
        }
    }
}

/// One repeat of the initialization hybrid: the raw game and the descent
/// seeded by its schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HybridRun {
    pub game: GameResult,
    pub descent: Descent,
}

/// Outcome of [`mcts_then_descend`] over all repeats.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HybridReport {
    pub runs: Vec<HybridRun>,
    /// Index of the lowest descended energy.
    pub best: usize,
    /// Tree-search evaluations, summed over repeats.
    pub mcts_fev: u64,
    /// Minimizer evaluations, summed over repeats.
    pub minimizer_fev: u64,
}

impl HybridReport {
    pub fn best_run(&self) -> &HybridRun {
        &self.runs[self.best]
    }

    pub fn best_energy(&self) -> f64 {
        self.runs[self.best].descent.energy
    }
}

/// Runs `repeats` independent unrestricted games at depth `p` and locally
/// minimizes each suggested schedule, keeping the best result. Per-repeat
/// seeds derive from `mcts.seed` and the repeat index.
pub fn mcts_then_descend(
    diagonal: &DiagonalCost,
    p: usize,
    branching: usize,
    mcts: &MctsConfig,
    minimizer: &LocalMinimizerConfig,
    repeats: usize,
) -> Result<HybridReport, HybridError> {
    if repeats == 0 {
        return Err(HybridError::Invalid("repeats must be at least 1".into()));
    }
    let space = SearchSpace::unrestricted(p, branching)?;
    let mut runs = Vec::with_capacity(repeats);
    let mut mcts_fev = 0u64;
    let mut minimizer_fev = 0u64;
    for r in 0..repeats {
        let config = MctsConfig { seed: derive_seed(mcts.seed, &[r as u64]), ..*mcts };
        let game = play_game(
            &space,
            |_: &[usize], s: &Schedule| evaluate_cost(diagonal, s).energy,
            &config,
        )?;
        let descent = local_minimize(diagonal, &game.schedule, minimizer)?;
        mcts_fev += game.n_fev;
        minimizer_fev += descent.n_fev;
        runs.push(HybridRun { game, descent });
    }
    let best = runs
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| a.descent.energy.total_cmp(&b.descent.energy))
        .map(|(i, _)| i)
        .expect("repeats >= 1");
    Ok(HybridReport { runs, best, mcts_fev, minimizer_fev })
}

/// A game whose rollout rewards are post-minimization energies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasinGameResult {
    /// `game.schedule` holds the continuous minimized schedule of the
    /// committed leaf and `game.energy` its minimized energy; `game.n_fev`
    /// counts rollouts as usual.
    pub game: GameResult,
    /// Underlying cost evaluations spent inside the minimizer.
    pub minimizer_fev: u64,
    /// Distinct leaves that triggered a minimization; revisits hit the memo.
    pub unique_leaves: usize,
}

/// Plays a game where each rollout endpoint's reward comes from the locally
/// minimized energy of its schedule, memoized by leaf indices.
pub fn basin_rollout_game(
    diagonal: &DiagonalCost,
    space: &SearchSpace,
    mcts: &MctsConfig,
    minimizer: &LocalMinimizerConfig,
) -> Result<BasinGameResult, HybridError> {
    basin_game_with(
        |angles| {
            let schedule = Schedule::from_interleaved(angles).expect("finite iterates");
            evaluate_cost(diagonal, &schedule).energy
        },
        space,
        mcts,
        minimizer,
    )
}

/// [`basin_rollout_game`] over an arbitrary continuous cost.
pub fn basin_game_with<F>(
    f: F,
    space: &SearchSpace,
    mcts: &MctsConfig,
    minimizer: &LocalMinimizerConfig,
) -> Result<BasinGameResult, HybridError>
where
    F: FnMut(&[f64]) -> f64,
{
    let cost = RefCell::new(f);
    let cache: RefCell<HashMap<Vec<usize>, (Schedule, f64)>> = RefCell::new(HashMap::new());
    let minimizer_fev = RefCell::new(0u64);
    let failure: RefCell<Option<HybridError>> = RefCell::new(None);

    let oracle = |indices: &[usize], schedule: &Schedule| -> f64 {
        if let Some((_, energy)) = cache.borrow().get(indices) {
            return *energy;
        }
        let mut f = cost.borrow_mut();
        match minimize_with(|x| f(x), schedule, minimizer) {
            Ok(descent) => {
                *minimizer_fev.borrow_mut() += descent.n_fev;
                let energy = descent.energy;
                cache.borrow_mut().insert(indices.to_vec(), (descent.schedule, energy));
                energy
            }
            Err(err) => {
                failure.borrow_mut().get_or_insert(err);
                f64::INFINITY
            }
        }
    };

    let game = play_game(space, oracle, mcts)?;
    if let Some(err) = failure.into_inner() {
        return Err(err);
    }

    let unique_leaves = cache.borrow().len();
    let (schedule, energy) = cache
        .into_inner()
        .remove(&game.per_turn_choices)
        .expect("committed leaf was evaluated");
    Ok(BasinGameResult {
        game: GameResult { schedule, energy, ..game },
        minimizer_fev: minimizer_fev.into_inner(),
        unique_leaves,
    })
}

/// An optimization trace produced by an external optimizer, imported for
/// side-by-side comparison with tree-search runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExternalTrace {
    pub optimizer: String,
    pub evaluations: Vec<TraceEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    /// Interleaved angles `(gamma_1, beta_1, ...)`.
    pub schedule: Vec<f64>,
    pub energy: f64,
}

impl ExternalTrace {
    pub fn from_json(text: &str) -> Result<Self, HybridError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, HybridError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn n_fev(&self) -> usize {
        self.evaluations.len()
    }

    pub fn best(&self) -> Option<&TraceEntry> {
        self.evaluations.iter().min_by(|a, b| a.energy.total_cmp(&b.energy))
    }

    pub fn best_energy(&self) -> Option<f64> {
        self.best().map(|e| e.energy)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mcts::CycleBudget;
    use crate::mcts::{FinalMove, Variant};
    use crate::problem::SatInstance;
    use crate::problem::{generate_sat_unique, Literal, MaxCutGraph};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::TAU;

    fn one_clause_diag() -> DiagonalCost {
        let inst = SatInstance::new(
            3,
            vec![[Literal::positive(0), Literal::positive(1), Literal::positive(2)]],
        )
        .unwrap();
        DiagonalCost::build(&inst.into()).unwrap()
    }

    #[test]
    fn quadratic_bowl_converges_to_center() {
        let target = [0.7, -0.3, 1.9, 0.2];
        let f = |x: &[f64]| {
            x.iter().zip(&target).map(|(xi, ti)| (xi - ti) * (xi - ti)).sum::<f64>()
        };
        let start = Schedule::new(vec![(0.0, 0.0), (0.0, 0.0)]).unwrap();
        let out = minimize_with(f, &start, &LocalMinimizerConfig::default()).unwrap();
        assert!(out.converged);
        assert!(out.grad_norm <= 1e-6);
        for (xi, ti) in out.schedule.interleaved().iter().zip(&target) {
            assert!((xi - ti).abs() < 1e-6);
        }
    }

    #[test]
    fn descent_property_on_qaoa_costs() {
        let inst = generate_sat_unique(4, 3.0, 6).unwrap();
        let diag = DiagonalCost::build(&inst.into()).unwrap();
        let mut rng = StdRng::seed_from_u64(0);
        for _ in 0..20 {
            let start = Schedule::new(
                (0..2).map(|_| (rng.gen_range(0.0..TAU), rng.gen_range(0.0..TAU))).collect(),
            )
            .unwrap();
            let start_energy = evaluate_cost(&diag, &start).energy;
            let out = local_minimize(&diag, &start, &LocalMinimizerConfig::default()).unwrap();
            assert!(out.energy <= start_energy + 1e-9);
        }
    }

    #[test]
    fn gradient_error_shrinks_quadratically_in_h() {
        let f = |x: &[f64]| x[0].sin() + x[1] * x[1] * x[1];
        let x = [0.9_f64, 1.3];
        let analytic = [x[0].cos(), 3.0 * x[1] * x[1]];
        let err = |h: f64| {
            let mut fev = 0;
            let mut fc = f;
            let g = central_gradient(&mut fc, &x, h, &mut fev).unwrap();
            g.iter().zip(&analytic).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
        };
        let e1 = err(1e-3);
        let e2 = err(5e-4);
        let ratio = e1 / e2;
        assert!((3.0..5.0).contains(&ratio), "O(h^2) expected, got ratio {ratio}");
    }

    #[test]
    fn descents_land_on_scan_local_minima() {
        // Dense (gamma, beta) scan of the P = 1 landscape as the oracle: every
        // descended energy must match some local minimum of the scan.
        let diag = one_clause_diag();
        let m = 250;
        let step = TAU / m as f64;
        let mut scan = vec![0.0; m * m];
        for i in 0..m {
            for j in 0..m {
                let s = Schedule::new(vec![(i as f64 * step, j as f64 * step)]).unwrap();
                scan[i * m + j] = evaluate_cost(&diag, &s).energy;
            }
        }
        let mut local_minima = Vec::new();
        for i in 0..m {
            for j in 0..m {
                let v = scan[i * m + j];
                let neighbors = [
                    scan[((i + m - 1) % m) * m + j],
                    scan[((i + 1) % m) * m + j],
                    scan[i * m + (j + m - 1) % m],
                    scan[i * m + (j + 1) % m],
                ];
                if neighbors.iter().all(|&nb| v <= nb) {
                    local_minima.push(v);
                }
            }
        }
        let mut rng = StdRng::seed_from_u64(12);
        for _ in 0..20 {
            let start =
                Schedule::new(vec![(rng.gen_range(0.0..TAU), rng.gen_range(0.0..TAU))]).unwrap();
            let out = local_minimize(&diag, &start, &LocalMinimizerConfig::default()).unwrap();
            let nearest =
                local_minima.iter().map(|v| (v - out.energy).abs()).fold(f64::INFINITY, f64::min);
            assert!(nearest < 1e-3, "descended to {} with no nearby scan minimum", out.energy);
        }
    }

    #[test]
    fn descend_after_search_never_hurts() {
        let diag = one_clause_diag();
        let mcts = MctsConfig { budget: CycleBudget::new(60, 40), seed: 11, ..Default::default() };
        let report = mcts_then_descend(
            &diag,
            1,
            8,
            &mcts,
            &LocalMinimizerConfig::default(),
            1,
        )
        .unwrap();
        let run = &report.runs[0];
        assert!(run.descent.energy <= run.game.energy + 1e-9);
        assert_eq!(report.best, 0);
        assert_eq!(report.mcts_fev, run.game.n_fev);
    }

    #[test]
    fn depth_one_hybrid_matches_refined_scan_optimum() {
        // Coarse scan plus a descent from its argmin gives the oracle value
        // for the global P = 1 minimum. K4 has a narrow minimum in an almost
        // flat landscape, so the search runs with the single-player variant,
        // which commits to the best rollout seen.
        let g = MaxCutGraph::new(4, vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let diag = DiagonalCost::build(&g.into()).unwrap();
        let m = 80;
        let step = TAU / m as f64;
        let mut best_scan = (f64::INFINITY, Schedule::empty());
        for i in 0..m {
            for j in 0..m {
                let s = Schedule::new(vec![(i as f64 * step, j as f64 * step)]).unwrap();
                let e = evaluate_cost(&diag, &s).energy;
                if e < best_scan.0 {
                    best_scan = (e, s);
                }
            }
        }
        let oracle =
            local_minimize(&diag, &best_scan.1, &LocalMinimizerConfig::default()).unwrap();

        let mcts = MctsConfig {
            budget: CycleBudget::new(200, 150),
            variant: Variant::SinglePlayer,
            final_move: FinalMove::BestPath,
            seed: 2,
            ..Default::default()
        };
        let report = mcts_then_descend(
            &diag,
            1,
            12,
            &mcts,
            &LocalMinimizerConfig::default(),
            4,
        )
        .unwrap();
        assert!(
            (report.best_energy() - oracle.energy).abs() < 1e-3,
            "hybrid {} vs oracle {}",
            report.best_energy(),
            oracle.energy
        );
    }

    #[test]
    fn basin_memoization_spends_nothing_on_revisits() {
        let calls = RefCell::new(0u64);
        let f = |x: &[f64]| {
            *calls.borrow_mut() += 1;
            (x[0] - 0.4) * (x[0] - 0.4) + (x[1] - 0.9) * (x[1] - 0.9)
        };
        let space = SearchSpace::from_grids(vec![vec![0.0, 1.0], vec![0.0, 1.0]]).unwrap();
        let mcts = MctsConfig { budget: CycleBudget::new(50, 50), seed: 3, ..Default::default() };
        let out =
            basin_game_with(|x| f(x), &space, &mcts, &LocalMinimizerConfig::default()).unwrap();
        assert_eq!(out.unique_leaves, 4);
        assert_eq!(out.game.n_fev, 100);
        let after_first = *calls.borrow();
        assert_eq!(after_first, out.minimizer_fev);

        // Doubling the cycle budget revisits only memoized leaves: the
        // underlying cost is evaluated exactly as often as before.
        let calls2 = RefCell::new(0u64);
        let f2 = |x: &[f64]| {
            *calls2.borrow_mut() += 1;
            (x[0] - 0.4) * (x[0] - 0.4) + (x[1] - 0.9) * (x[1] - 0.9)
        };
        let mcts2 = MctsConfig { budget: CycleBudget::new(150, 50), ..mcts };
        let out2 =
            basin_game_with(|x| f2(x), &space, &mcts2, &LocalMinimizerConfig::default()).unwrap();
        assert_eq!(out2.game.n_fev, 200);
        assert_eq!(*calls2.borrow(), after_first);
    }

    #[test]
    fn basin_game_prefers_the_deeper_basin() {
        // Two quadratic wells; the deeper one is also wider. Every leaf's
        // reward is its basin's bottom, so the game must land in the deep one.
        let f = |x: &[f64]| {
            let shallow = 2.0 + 6.0 * ((x[0] - 0.4).powi(2) + (x[1] - 0.4).powi(2));
            let deep = 0.5 * ((x[0] - 1.6).powi(2) + (x[1] - 1.6).powi(2));
            shallow.min(deep)
        };
        let grid: Vec<f64> = (0..6).map(|k| k as f64 * 0.4).collect();
        let space = SearchSpace::from_grids(vec![grid.clone(), grid]).unwrap();
        let mcts = MctsConfig {
            budget: CycleBudget::new(50, 50),
            variant: Variant::SinglePlayer,
            final_move: FinalMove::BestPath,
            seed: 8,
            ..Default::default()
        };
        let out = basin_game_with(f, &space, &mcts, &LocalMinimizerConfig::default()).unwrap();
        assert!(out.game.energy < 1e-6, "energy {}", out.game.energy);
        let angles = out.game.schedule.interleaved();
        assert!((angles[0] - 1.6).abs() < 1e-4 && (angles[1] - 1.6).abs() < 1e-4);
        // Single-player guarantee: the committed energy equals the best
        // minimized energy seen in any rollout.
        assert_eq!(out.game.energy, out.game.best_rollout_energy);
    }

    #[test]
    fn basin_game_on_qaoa_runs_end_to_end() {
        let diag = one_clause_diag();
        let space = SearchSpace::unrestricted(1, 6).unwrap();
        let mcts = MctsConfig { budget: CycleBudget::new(20, 10), seed: 1, ..Default::default() };
        let out =
            basin_rollout_game(&diag, &space, &mcts, &LocalMinimizerConfig::default()).unwrap();
        assert!(out.game.energy <= 0.125 + 1e-9);
        assert!(out.minimizer_fev > 0);
    }

    #[test]
    fn external_trace_round_trip() {
        let trace = ExternalTrace {
            optimizer: "external".into(),
            evaluations: vec![
                TraceEntry { schedule: vec![0.1, 0.2], energy: 2.0 },
                TraceEntry { schedule: vec![0.3, 0.4], energy: 1.25 },
            ],
        };
        let text = serde_json::to_string(&trace).unwrap();
        let parsed = ExternalTrace::from_json(&text).unwrap();
        assert_eq!(parsed, trace);
        assert_eq!(parsed.best_energy(), Some(1.25));
        assert_eq!(parsed.n_fev(), 2);
        assert!(ExternalTrace::from_json("not json").is_err());
    }

    #[test]
    fn non_finite_cost_reports_failure() {
        let start = Schedule::new(vec![(1.0, 1.0)]).unwrap();
        let err = minimize_with(|_| f64::NAN, &start, &LocalMinimizerConfig::default());
        assert!(matches!(err, Err(HybridError::MinimizerFailure(_))));
    }
}
