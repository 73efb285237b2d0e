use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{FinalMove, MctsConfig, MctsError, SearchSpace, TreeNode, Variant};
use crate::qaoa::Schedule;

/// Nonlinear energy-to-reward mapping `r = exp(-nu * energy)`, strictly
/// decreasing with `r(0) = 1`. Rewards are not clipped to `[0, 1]`.
pub fn reward(energy: f64, nu: f64) -> f64 {
    (-nu * energy).exp()
}

/// Adds one Gaussian draw `N(0, sigma)` to a rollout energy, modeling
/// measurement uncertainty. Applied before the reward mapping; `sigma = 0` is
/// the exact identity and consumes no randomness.
pub fn perturb_reward<R: Rng>(energy: f64, sigma: f64, rng: &mut R) -> f64 {
    if sigma <= 0.0 {
        return energy;
    }
    let normal = Normal::new(0.0, sigma).expect("sigma validated non-negative finite");
    energy + normal.sample(rng)
}

/// UCT selection: the child grid index maximizing
/// `w/n + C * sqrt(2 ln n_parent / n_child)`, ties broken by lowest index.
/// Intended for fully expanded nodes; unvisited children are skipped.
pub fn uct_select(node: &TreeNode, exploration: f64) -> Result<usize, MctsError> {
    if node.num_slots() == 0 {
        return Err(MctsError::NoChildren);
    }
    if node.visits() == 0 {
        return Err(MctsError::ZeroVisitParent);
    }
    let ln_parent = (node.visits() as f64).ln();
    let mut best: Option<(usize, f64)> = None;
    for (idx, child) in node.children() {
        if child.visits() == 0 {
            continue;
        }
        let bonus = exploration * (2.0 * ln_parent / child.visits() as f64).sqrt();
        let score = child.mean() + bonus;
        if best.map_or(true, |(_, b)| score > b) {
            best = Some((idx, score));
        }
    }
    best.map(|(idx, _)| idx).ok_or(MctsError::NoVisitedChildren)
}

/// Commits a move by the configured criterion, over visited children only.
/// `memorized` is the first move of the best memorized rollout path, required
/// by [`FinalMove::BestPath`]. Ties break to the lowest grid index.
pub fn final_move(
    node: &TreeNode,
    criterion: FinalMove,
    memorized: Option<usize>,
) -> Result<usize, MctsError> {
    match criterion {
        FinalMove::BestPath => memorized.ok_or(MctsError::NoMemorizedPath),
        FinalMove::MaxChild => {
            let mut best: Option<(usize, f64)> = None;
            for (idx, child) in node.children() {
                if child.visits() == 0 {
                    continue;
                }
                if best.map_or(true, |(_, b)| child.mean() > b) {
                    best = Some((idx, child.mean()));
                }
            }
            best.map(|(idx, _)| idx).ok_or(MctsError::NoVisitedChildren)
        }
        FinalMove::RobustChild => {
            let mut best: Option<(usize, u64)> = None;
            for (idx, child) in node.children() {
                if child.visits() == 0 {
                    continue;
                }
                if best.map_or(true, |(_, b)| child.visits() > b) {
                    best = Some((idx, child.visits()));
                }
            }
            best.map(|(idx, _)| idx).ok_or(MctsError::NoVisitedChildren)
        }
    }
}

/// Outcome of one cycle's rollout: the complete index tuple reached, its
/// noiseless energy, the energy after noise perturbation, and the
/// backpropagated reward.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RolloutRecord {
    pub indices: Vec<usize>,
    pub energy: f64,
    pub perturbed_energy: f64,
    pub reward: f64,
}

/// Runs one selection / expansion / rollout / backpropagation cycle on the
/// tree rooted at the position reached by `committed`. Exactly one cost
/// evaluation is performed.
pub fn run_cycle<F, R>(
    root: &mut TreeNode,
    committed: &[usize],
    space: &SearchSpace,
    cost: &mut F,
    config: &MctsConfig,
    rng: &mut R,
) -> RolloutRecord
where
    F: FnMut(&[usize], &Schedule) -> f64,
    R: Rng,
{
    let mut prefix = committed.to_vec();
    descend(root, &mut prefix, space, cost, config, rng)
}

fn descend<F, R>(
    node: &mut TreeNode,
    prefix: &mut Vec<usize>,
    space: &SearchSpace,
    cost: &mut F,
    config: &MctsConfig,
    rng: &mut R,
) -> RolloutRecord
where
    F: FnMut(&[usize], &Schedule) -> f64,
    R: Rng,
{
    if node.is_terminal() {
        // A stored complete assignment: the rollout is the node itself.
        let record = rollout(prefix, space, cost, config, rng);
        node.record(record.reward);
        return record;
    }
    if node.is_fully_expanded() {
        let idx = uct_select(node, config.exploration)
            .expect("fully expanded nodes have visited children");
        prefix.push(idx);
        let child = node.child_mut(idx).expect("fully expanded");
        let record = descend(child, prefix, space, cost, config, rng);
        node.record(record.reward);
        record
    } else {
        // Expansion: open one unexpanded child uniformly at random.
        let options: Vec<usize> = node.unexpanded().collect();
        let idx = options[rng.gen_range(0..options.len())];
        prefix.push(idx);
        let slots = if prefix.len() == space.turns() { 0 } else { space.num_choices(prefix) };
        let child = node.insert_child(idx, TreeNode::new(prefix.len(), Some(idx), slots));
        let record = rollout(prefix, space, cost, config, rng);
        child.record(record.reward);
        node.record(record.reward);
        record
    }
}

/// Uniform-random moves down to a leaf, then one cost evaluation.
fn rollout<F, R>(
    prefix: &[usize],
    space: &SearchSpace,
    cost: &mut F,
    config: &MctsConfig,
    rng: &mut R,
) -> RolloutRecord
where
    F: FnMut(&[usize], &Schedule) -> f64,
    R: Rng,
{
    let mut indices = prefix.to_vec();
    while indices.len() < space.turns() {
        let choices = space.num_choices(&indices);
        indices.push(rng.gen_range(0..choices));
    }
    let schedule = space.schedule(&indices);
    let energy = cost(&indices, &schedule);
    let perturbed_energy = perturb_reward(energy, config.noise_sigma, rng);
    let r = reward(perturbed_energy, config.reward_exponent);
    RolloutRecord { indices, energy, perturbed_energy, reward: r }
}

/// Best rollout path memorized by the single-player variant, stored relative
/// to the current root. Paths are ranked by perturbed energy, which orders
/// identically to the reward but never saturates in floating point.
struct MemorizedPath {
    perturbed_energy: f64,
    reward: f64,
    suffix: Vec<usize>,
}

/// Stores a memorized path into the tree, node by node. Newly created nodes
/// receive the memorized reward once; existing nodes are left untouched, so
/// no extra cost evaluation is ever needed.
fn expand_memorized_path(
    root: &mut TreeNode,
    committed: &[usize],
    suffix: &[usize],
    path_reward: f64,
    space: &SearchSpace,
) {
    let mut node = root;
    let mut prefix = committed.to_vec();
    for &idx in suffix {
        prefix.push(idx);
        if node.child(idx).is_none() {
            let slots = if prefix.len() == space.turns() { 0 } else { space.num_choices(&prefix) };
            let mut fresh = TreeNode::new(prefix.len(), Some(idx), slots);
            fresh.record(path_reward);
            node.insert_child(idx, fresh);
        }
        node = node.child_mut(idx).expect("present or just inserted");
    }
}

/// The outcome of a completed game.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameResult {
    /// The committed schedule.
    pub schedule: Schedule,
    /// Noiseless energy of the committed schedule.
    pub energy: f64,
    /// Lowest noiseless energy seen at any rollout endpoint.
    pub best_rollout_energy: f64,
    /// Cost evaluations consumed (one per cycle).
    pub n_fev: u64,
    /// Grid index committed at each turn.
    pub per_turn_choices: Vec<usize>,
    pub seed: u64,
}

/// Plays a full game: for each of the `2P` turns, runs the budgeted cycles,
/// then commits a move by the configured criterion; the committed child
/// becomes the new root. With subtree reuse the final turn selects the best
/// child directly from the retained statistics, without further rollouts.
///
/// In the single-player variant the best rollout path seen (by backpropagated
/// reward) is memorized and expanded into the stored tree between turns, and
/// [`FinalMove::BestPath`] commits moves along it.
///
/// The cost closure receives the complete index tuple and its schedule, and
/// must return the noiseless energy; reward noise is injected afterwards.
/// The reported `energy` is always noiseless and is read from the rollout
/// that reached the committed leaf, so `n_fev` matches the configured budget
/// exactly.
pub fn play_game<F>(
    space: &SearchSpace,
    mut cost: F,
    config: &MctsConfig,
) -> Result<GameResult, MctsError>
where
    F: FnMut(&[usize], &Schedule) -> f64,
{
    config.validate(space)?;
    let turns = space.turns();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut committed: Vec<usize> = Vec::with_capacity(turns);
    let mut root = TreeNode::new(0, None, space.num_choices(&[]));
    let mut leaf_energies: HashMap<Vec<usize>, f64> = HashMap::new();
    let mut best_rollout_energy = f64::INFINITY;
    let mut memo: Option<MemorizedPath> = None;
    let mut n_fev: u64 = 0;

    for turn in 0..turns {
        let cycles = config.budget.cycles_for_turn(turn, turns, config.reuse_subtree);
        for _ in 0..cycles {
            let record = run_cycle(&mut root, &committed, space, &mut cost, config, &mut rng);
            n_fev += 1;
            if record.energy < best_rollout_energy {
                best_rollout_energy = record.energy;
            }
            if config.variant == Variant::SinglePlayer
                && memo.as_ref().map_or(true, |m| record.perturbed_energy < m.perturbed_energy)
            {
                memo = Some(MemorizedPath {
                    perturbed_energy: record.perturbed_energy,
                    reward: record.reward,
                    suffix: record.indices[committed.len()..].to_vec(),
                });
            }
            leaf_energies.insert(record.indices, record.energy);
        }

        if config.variant == Variant::SinglePlayer {
            if let Some(m) = &memo {
                expand_memorized_path(&mut root, &committed, &m.suffix, m.reward, space);
            }
        }

        let memo_head = memo.as_ref().and_then(|m| m.suffix.first().copied());
        let choice = match final_move(&root, config.final_move, memo_head) {
            Ok(c) => c,
            // Degenerate budgets can leave the last root without visited
            // children; fall back deterministically.
            Err(MctsError::NoVisitedChildren) | Err(MctsError::NoMemorizedPath) => {
                memo_head.unwrap_or(0)
            }
            Err(e) => return Err(e),
        };
        committed.push(choice);

        if turn + 1 < turns {
            root = if config.reuse_subtree {
                match root.take_child(choice) {
                    Some(child) => *child,
                    None => {
                        TreeNode::new(committed.len(), Some(choice), space.num_choices(&committed))
                    }
                }
            } else {
                TreeNode::new(committed.len(), Some(choice), space.num_choices(&committed))
            };
        }

        if let Some(m) = &mut memo {
            if m.suffix.first() == Some(&choice) {
                m.suffix.remove(0);
            } else {
                memo = None;
            }
        }
    }

    let schedule = space.schedule(&committed);
    let energy = match leaf_energies.get(&committed) {
        Some(&e) => e,
        // Only reachable through the degenerate fallback above.
        None => {
            n_fev += 1;
            cost(&committed, &schedule)
        }
    };

    Ok(GameResult {
        schedule,
        energy,
        best_rollout_energy,
        n_fev,
        per_turn_choices: committed,
        seed: config.seed,
    })
}
