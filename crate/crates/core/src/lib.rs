//! Tree-search optimization of QAOA variational schedules.
//!
//! This crate implements a gradient-free optimizer for the Quantum Approximate
//! Optimization Algorithm (QAOA) applied to MAX-3-SAT and unweighted MaxCut
//! instances. The variational angles are discretized into a decision tree and
//! explored with Monte Carlo Tree Search (MCTS); an iterative search-space
//! restriction (SSR) scheme reuses the optimum found at circuit depth `P` to
//! confine the depth `P+1` search to the region where regular schedules live.
//!
//! The main pieces:
//!
//! - [`problem`] — 3-SAT and MaxCut instances, generators, DIMACS/edge-list
//!   I/O, and precomputed diagonal cost spectra.
//! - [`qaoa`] — exact statevector simulation of the QAOA ansatz and the
//!   variational cost `F_P`.
//! - [`mcts`] — the four-stage MCTS cycle over discretized angle grids, with
//!   single-player modifications, reward noise, and final-move criteria.
//! - [`ssr`] — search-space restriction from previous-depth optima and the
//!   iterative depth-by-depth driver.
//! - [`hybrid`] — quasi-Newton local descent combined with MCTS, either as a
//!   post-processing step or inside the rollout reward.
//! - [`analysis`] — exhaustive leaf enumeration, tree distance, run time,
//!   approximation ratios, and result aggregation.
//! - [`experiment`] — declarative experiment configs and the orchestration
//!   behind the `qaoa-mcts` command-line tool.
//!
//! Every stochastic component is seeded; identical inputs produce bit-identical
//! results. See the `examples/` directory for one runnable program per major
//! capability.

pub mod analysis;
pub mod data;
pub mod experiment;
pub mod hybrid;
pub mod mcts;
pub mod problem;
pub mod qaoa;
pub mod seeding;
pub mod ssr;

pub use problem::{DiagonalCost, Instance, MaxCutGraph, ProblemError, SatInstance};
pub use qaoa::{CostValue, Schedule, Statevector};
