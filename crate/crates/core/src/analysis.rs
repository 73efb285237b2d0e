//! Landscape and result diagnostics: exhaustive leaf enumeration, tree
//! distance, approximation ratios, and aggregation of game results.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mcts::{GameResult, SearchSpace};
use crate::problem::DiagonalCost;
use crate::qaoa::{evaluate_cost, Schedule};

/// Performance guarantee of the Goemans-Williamson algorithm on 3-regular
/// graphs, used as a MaxCut reference line.
pub const GOEMANS_WILLIAMSON_CUBIC: f64 = 0.9326;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("index vectors have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("enumeration requires {required} leaf evaluations, above the cap of {cap}")]
    CapExceeded { required: u128, cap: u64 },
    #[error("approximation ratio undefined: the maximum cut is zero")]
    UndefinedRatio,
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("empty input")]
    Empty,
}

/// Euclidean distance between two leaves' grid-index vectors,
/// `d^2 = sum_i (c_i - c'_i)^2`.
pub fn tree_distance(c: &[usize], c_prime: &[usize]) -> Result<f64, AnalysisError> {
    if c.len() != c_prime.len() {
        return Err(AnalysisError::LengthMismatch(c.len(), c_prime.len()));
    }
    let sq: f64 = c
        .iter()
        .zip(c_prime)
        .map(|(&a, &b)| {
            let d = a as f64 - b as f64;
            d * d
        })
        .sum();
    Ok(sq.sqrt())
}

/// Periodic variant: each per-turn index difference wraps modulo that turn's
/// grid size before squaring.
pub fn tree_distance_periodic(
    c: &[usize],
    c_prime: &[usize],
    grid_sizes: &[usize],
) -> Result<f64, AnalysisError> {
    if c.len() != c_prime.len() {
        return Err(AnalysisError::LengthMismatch(c.len(), c_prime.len()));
    }
    if c.len() != grid_sizes.len() {
        return Err(AnalysisError::LengthMismatch(c.len(), grid_sizes.len()));
    }
    let sq: f64 = c
        .iter()
        .zip(c_prime)
        .zip(grid_sizes)
        .map(|((&a, &b), &size)| {
            let diff = a.abs_diff(b);
            let wrapped = diff.min(size - diff) as f64;
            wrapped * wrapped
        })
        .sum();
    Ok(sq.sqrt())
}

/// Which index metric leaf records are referenced with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TreeMetric {
    #[default]
    Euclidean,
    PeriodicEuclidean,
}

/// Limits and options for exhaustive enumeration.
#[derive(Debug, Clone, Copy)]
pub struct LeafEnumConfig {
    /// Refuse to enumerate spaces with more leaves than this.
    pub cap: u64,
    /// Leaves evaluated per parallel batch.
    pub chunk: usize,
    pub metric: TreeMetric,
}

impl Default for LeafEnumConfig {
    fn default() -> Self {
        Self { cap: 10_000_000, chunk: 16_384, metric: TreeMetric::Euclidean }
    }
}

/// One enumerated leaf, referenced to the global optimum of its space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeafRecord {
    /// Position in lexicographic enumeration order.
    pub leaf_index: u64,
    pub indices: Vec<usize>,
    pub schedule: Schedule,
    pub energy: f64,
    /// `F(theta) - F(theta*)`, never negative.
    pub energy_gap: f64,
    /// Index-space distance to the optimal leaf.
    pub tree_distance: f64,
    /// `tau = sum_i (|gamma_i| + |beta_i|)`.
    pub run_time: f64,
}

/// Exhaustive evaluation of every leaf of a search space.
///
/// Construction performs one full sweep (parallelized in batches) to store
/// all energies and locate the optimum; [`LeafEnumeration::iter`] then streams
/// records in lexicographic order without re-evaluating, so callers can write
/// them out chunk by chunk instead of materializing them.
pub struct LeafEnumeration<'a> {
    space: &'a SearchSpace,
    energies: Vec<f64>,
    optimum_index: usize,
    optimum_leaf: Vec<usize>,
    metric: TreeMetric,
}

impl<'a> LeafEnumeration<'a> {
    pub fn new(
        diagonal: &DiagonalCost,
        space: &'a SearchSpace,
        config: &LeafEnumConfig,
    ) -> Result<Self, AnalysisError> {
        let required = space.leaf_count().unwrap_or(u128::MAX);
        if required > u128::from(config.cap) {
            return Err(AnalysisError::CapExceeded { required, cap: config.cap });
        }

        let mut energies = Vec::with_capacity(required as usize);
        let mut batch: Vec<Vec<usize>> = Vec::with_capacity(config.chunk);
        let mut leaves = space.leaves();
        loop {
            batch.clear();
            batch.extend(leaves.by_ref().take(config.chunk));
            if batch.is_empty() {
                break;
            }
            energies.par_extend(
                batch
                    .par_iter()
                    .map(|leaf| evaluate_cost(diagonal, &space.schedule(leaf)).energy),
            );
        }

        // Global argmin; ties resolve to the lowest lexicographic index.
        let optimum_index = energies
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| a.total_cmp(b))
            .map(|(i, _)| i)
            .ok_or(AnalysisError::Empty)?;
        let optimum_leaf =
            space.leaves().nth(optimum_index).expect("optimum index within enumeration");

        Ok(Self { space, energies, optimum_index, optimum_leaf, metric: config.metric })
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    pub fn optimum_energy(&self) -> f64 {
        self.energies[self.optimum_index]
    }

    pub fn optimum_leaf(&self) -> &[usize] {
        &self.optimum_leaf
    }

    /// Streams all records in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = LeafRecord> + '_ {
        let sizes: Vec<usize> = (0..self.space.turns()).map(|t| self.space.grid(t).len()).collect();
        self.space.leaves().zip(self.energies.iter()).enumerate().map(move |(i, (leaf, &energy))| {
            let distance = match self.metric {
                TreeMetric::Euclidean => tree_distance(&leaf, &self.optimum_leaf),
                TreeMetric::PeriodicEuclidean => {
                    tree_distance_periodic(&leaf, &self.optimum_leaf, &sizes)
                }
            }
            .expect("leaves share the space's turn count");
            let schedule = self.space.schedule(&leaf);
            let run_time = schedule.run_time();
            LeafRecord {
                leaf_index: i as u64,
                indices: leaf,
                schedule,
                energy,
                energy_gap: energy - self.optimum_energy(),
                tree_distance: distance,
                run_time,
            }
        })
    }
}

/// Formats a float with 12 significant digits, the precision used across all
/// emitted tables.
pub fn fmt_sig12(value: f64) -> String {
    format!("{value:.11e}")
}

/// Streams every leaf record as CSV with columns
/// `leaf_index, c_1..c_2P, energy, energy_gap, tree_distance, run_time`.
/// Returns the number of rows written.
pub fn write_leaf_csv<W: Write>(
    enumeration: &LeafEnumeration<'_>,
    out: &mut W,
) -> io::Result<u64> {
    let turns = enumeration.space.turns();
    write!(out, "leaf_index")?;
    for t in 1..=turns {
        write!(out, ",c_{t}")?;
    }
    writeln!(out, ",energy,energy_gap,tree_distance,run_time")?;

    let mut rows = 0u64;
    for record in enumeration.iter() {
        write!(out, "{}", record.leaf_index)?;
        for c in &record.indices {
            write!(out, ",{c}")?;
        }
        writeln!(
            out,
            ",{},{},{},{}",
            fmt_sig12(record.energy),
            fmt_sig12(record.energy_gap),
            fmt_sig12(record.tree_distance),
            fmt_sig12(record.run_time)
        )?;
        rows += 1;
    }
    Ok(rows)
}

/// Population statistics of a set of energies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyStats {
    pub count: usize,
    pub mean: f64,
    /// Population standard deviation (divides by `count`).
    pub std: f64,
    /// Minimum energy.
    pub best: f64,
}

pub fn aggregate(energies: &[f64]) -> Result<EnergyStats, AnalysisError> {
    if energies.is_empty() {
        return Err(AnalysisError::Empty);
    }
    let count = energies.len();
    let mean = energies.iter().sum::<f64>() / count as f64;
    let var = energies.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / count as f64;
    let best = energies.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(EnergyStats { count, mean, std: var.sqrt(), best })
}

pub fn aggregate_results(results: &[GameResult]) -> Result<EnergyStats, AnalysisError> {
    let energies: Vec<f64> = results.iter().map(|r| r.energy).collect();
    aggregate(&energies)
}

/// Per-depth statistics across several iterative runs. All runs must cover
/// the same depth range.
pub fn aggregate_depth_series(
    runs: &[Vec<GameResult>],
) -> Result<Vec<(usize, EnergyStats)>, AnalysisError> {
    if runs.is_empty() {
        return Err(AnalysisError::Empty);
    }
    let depths = runs[0].len();
    if runs.iter().any(|r| r.len() != depths) {
        return Err(AnalysisError::Invalid("runs cover different depth ranges".into()));
    }
    (0..depths)
        .map(|d| {
            let energies: Vec<f64> = runs.iter().map(|r| r[d].energy).collect();
            Ok((d + 1, aggregate(&energies)?))
        })
        .collect()
}

/// One row of an aggregation table, keyed by depth or noise level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub key: String,
    pub stats: EnergyStats,
    /// Master seed of the runs behind this row.
    pub seed: u64,
}

/// Writes rows as CSV with columns `depth_or_ns, mean, std, best, seed`.
pub fn write_aggregate_csv<W: Write>(rows: &[AggregateRow], out: &mut W) -> io::Result<()> {
    writeln!(out, "depth_or_ns,mean,std,best,seed")?;
    for row in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            row.key,
            fmt_sig12(row.stats.mean),
            fmt_sig12(row.stats.std),
            fmt_sig12(row.stats.best),
            row.seed
        )?;
    }
    Ok(())
}

/// MaxCut approximation ratio `r = (N_E - energy) / (N_E - E_0)` for a
/// diagonal whose maximum energy is the edge count (true for every MaxCut
/// spectrum, where the all-equal partition cuts nothing).
pub fn approximation_ratio(diagonal: &DiagonalCost, energy: f64) -> Result<f64, AnalysisError> {
    let edges = diagonal.max_energy();
    let ground = diagonal.ground_energy();
    if !(energy.is_finite() && (0.0..=edges + 1e-9).contains(&energy)) {
        return Err(AnalysisError::Invalid(format!(
            "energy {energy} outside the spectrum range [0, {edges}]"
        )));
    }
    let max_cut = edges - ground;
    if max_cut <= 0.0 {
        return Err(AnalysisError::UndefinedRatio);
    }
    Ok((edges - energy) / max_cut)
}
