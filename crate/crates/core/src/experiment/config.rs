use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::hybrid::LocalMinimizerConfig;
use crate::mcts::{CycleBudget, FinalMove, MctsConfig, Variant};
use crate::ssr::{RestrictionEdges, SofteningSchedule};

use super::ExperimentError;

/// Environment variable holding the default output root.
pub const OUTDIR_ENV: &str = "QAOA_MCTS_OUTDIR";

/// Which optimization protocol a run executes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[clap(rename_all = "snake_case")]
pub enum Protocol {
    /// One unrestricted game per depth.
    Vanilla,
    /// One unrestricted single-player game per depth.
    Sp,
    /// Iterative search-space restriction.
    Ssr,
    /// Iterative restriction with single-player games.
    SsrSp,
    /// Unrestricted games seeding local descents, best of k.
    HybridInit,
    /// Games whose rollout rewards are post-minimization energies.
    HybridBasin,
}

impl Protocol {
    pub fn dir_name(self) -> &'static str {
        match self {
            Protocol::Vanilla => "vanilla",
            Protocol::Sp => "sp",
            Protocol::Ssr => "ssr",
            Protocol::SsrSp => "ssr_sp",
            Protocol::HybridInit => "hybrid_init",
            Protocol::HybridBasin => "hybrid_basin",
        }
    }

    pub fn is_hybrid(self) -> bool {
        matches!(self, Protocol::HybridInit | Protocol::HybridBasin)
    }
}

/// A declarative experiment: problem source, protocol, search knobs, and
/// output location. Parsed from a TOML document; command-line flags override
/// individual values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemSection,
    #[serde(default)]
    pub protocol: ProtocolSection,
    #[serde(default)]
    pub mcts: MctsSection,
    #[serde(default)]
    pub ssr: SsrSection,
    #[serde(default)]
    pub minimizer: MinimizerSection,
    #[serde(default)]
    pub hybrid: HybridSection,
    #[serde(default)]
    pub noise_study: NoiseStudySection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    Sat,
    Maxcut,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSection {
    pub kind: ProblemKind,
    /// Instance source: a DIMACS/edge-list file, a directory of them, or the
    /// literal `builtin:cubic10` for the bundled 3-regular benchmark graphs.
    /// Absent means instances are generated.
    #[serde(default)]
    pub path: Option<PathBuf>,
    /// Generator size (variables or vertices).
    #[serde(default)]
    pub n: Option<usize>,
    /// 3-SAT clause density.
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// MaxCut regular-graph degree.
    #[serde(default = "default_degree")]
    pub degree: usize,
    /// Number of generated instances.
    #[serde(default = "default_count")]
    pub count: usize,
}

fn default_alpha() -> f64 {
    3.0
}
fn default_degree() -> usize {
    3
}
fn default_count() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProtocolSection {
    pub name: Protocol,
    pub p_min: usize,
    pub p_max: usize,
    /// Independent repeats per instance.
    pub repeats: usize,
    /// Noise grid for `noise-study`.
    pub noise: Vec<f64>,
}

impl Default for ProtocolSection {
    fn default() -> Self {
        Self { name: Protocol::Ssr, p_min: 1, p_max: 4, repeats: 1, noise: vec![0.0] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MctsSection {
    pub branching: usize,
    pub exploration: f64,
    pub reward_exponent: f64,
    pub cycles_initial: u32,
    pub cycles_per_turn: u32,
    pub noise_sigma: f64,
    /// Overrides the protocol's default final-move criterion.
    pub final_move: Option<FinalMove>,
    pub reuse_subtree: bool,
}

impl Default for MctsSection {
    fn default() -> Self {
        Self {
            branching: 30,
            exploration: std::f64::consts::SQRT_2,
            reward_exponent: 0.5,
            cycles_initial: 1000,
            cycles_per_turn: 800,
            noise_sigma: 0.0,
            final_move: None,
            reuse_subtree: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SsrSection {
    /// Softening constants per depth; absent means the benchmark schedule.
    pub deltas: Option<Vec<f64>>,
    pub epsilon_pinch: Option<f64>,
    pub gamma_low: f64,
    pub gamma_high: f64,
    pub beta_low: f64,
    pub beta_high: f64,
}

impl Default for SsrSection {
    fn default() -> Self {
        let edges = RestrictionEdges::default();
        Self {
            deltas: None,
            epsilon_pinch: None,
            gamma_low: edges.gamma_low,
            gamma_high: edges.gamma_high,
            beta_low: edges.beta_low,
            beta_high: edges.beta_high,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MinimizerSection {
    pub fd_step: f64,
    pub grad_tol: f64,
    pub max_iters: usize,
}

impl Default for MinimizerSection {
    fn default() -> Self {
        let c = LocalMinimizerConfig::default();
        Self { fd_step: c.fd_step, grad_tol: c.grad_tol, max_iters: c.max_iters }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HybridSection {
    /// Games per instance for the init hybrid (best of k).
    pub repeats: usize,
    /// Per-turn cycles for basin-rollout games.
    pub basin_cycles_per_turn: u32,
}

impl Default for HybridSection {
    fn default() -> Self {
        Self { repeats: 10, basin_cycles_per_turn: 100 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseStudySection {
    /// Restriction steps `P -> P+1` to study, given by their starting depths.
    pub steps: Vec<usize>,
}

impl Default for NoiseStudySection {
    fn default() -> Self {
        Self { steps: vec![1] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    /// Output root; falls back to `QAOA_MCTS_OUTDIR`, then `results`.
    pub outdir: Option<PathBuf>,
    pub experiment: String,
    pub seed: u64,
    /// Worker threads for independent runs; 0 means one per CPU.
    pub jobs: usize,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { outdir: None, experiment: "experiment".into(), seed: 1, jobs: 0 }
    }
}

/// Values passed on the command line, overriding the config file.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct CliOverrides {
    /// Master seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads for independent runs (0 = one per CPU).
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Output root directory.
    #[arg(long)]
    pub outdir: Option<PathBuf>,
    /// Protocol to execute.
    #[arg(long)]
    pub protocol: Option<Protocol>,
    /// Largest circuit depth.
    #[arg(long)]
    pub p_max: Option<usize>,
    /// Branching factor of the angle grids.
    #[arg(long)]
    pub branching: Option<usize>,
    /// Reward noise strength for `run`.
    #[arg(long)]
    pub noise: Option<f64>,
    /// Cycles before the first commitment, on top of the per-turn budget.
    #[arg(long)]
    pub cycles_initial: Option<u32>,
    /// Cycles per turn.
    #[arg(long)]
    pub cycles_per_turn: Option<u32>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, ExperimentError> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, ExperimentError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            ExperimentError::Invalid(format!("cannot read config {}: {e}", path.display()))
        })?;
        Self::from_toml(&text)
    }

    pub fn apply_overrides(&mut self, overrides: &CliOverrides) {
        if let Some(seed) = overrides.seed {
            self.output.seed = seed;
        }
        if let Some(jobs) = overrides.jobs {
            self.output.jobs = jobs;
        }
        if let Some(outdir) = &overrides.outdir {
            self.output.outdir = Some(outdir.clone());
        }
        if let Some(protocol) = overrides.protocol {
            self.protocol.name = protocol;
        }
        if let Some(p_max) = overrides.p_max {
            self.protocol.p_max = p_max;
        }
        if let Some(b) = overrides.branching {
            self.mcts.branching = b;
        }
        if let Some(noise) = overrides.noise {
            self.mcts.noise_sigma = noise;
        }
        if let Some(c) = overrides.cycles_initial {
            self.mcts.cycles_initial = c;
        }
        if let Some(c) = overrides.cycles_per_turn {
            self.mcts.cycles_per_turn = c;
        }
    }

    /// Output root: explicit config, then the environment, then `results`.
    pub fn outdir(&self) -> PathBuf {
        if let Some(dir) = &self.output.outdir {
            return dir.clone();
        }
        if let Ok(dir) = std::env::var(OUTDIR_ENV) {
            if !dir.is_empty() {
                return PathBuf::from(dir);
            }
        }
        PathBuf::from("results")
    }

    pub fn experiment_dir(&self) -> PathBuf {
        self.outdir().join(&self.output.experiment)
    }

    /// The search configuration for one seeded run under `protocol`, with the
    /// protocol's variant and default final-move criterion applied.
    pub fn mcts_config(&self, protocol: Protocol, seed: u64) -> MctsConfig {
        let (variant, default_final) = match protocol {
            Protocol::Vanilla | Protocol::Ssr | Protocol::HybridInit => {
                (Variant::Vanilla, FinalMove::MaxChild)
            }
            Protocol::Sp | Protocol::SsrSp | Protocol::HybridBasin => {
                (Variant::SinglePlayer, FinalMove::BestPath)
            }
        };
        MctsConfig {
            exploration: self.mcts.exploration,
            reward_exponent: self.mcts.reward_exponent,
            budget: CycleBudget::new(self.mcts.cycles_initial, self.mcts.cycles_per_turn),
            noise_sigma: self.mcts.noise_sigma,
            variant,
            final_move: self.mcts.final_move.unwrap_or(default_final),
            reuse_subtree: self.mcts.reuse_subtree,
            seed,
        }
    }

    pub fn minimizer_config(&self) -> LocalMinimizerConfig {
        LocalMinimizerConfig {
            fd_step: self.minimizer.fd_step,
            grad_tol: self.minimizer.grad_tol,
            max_iters: self.minimizer.max_iters,
        }
    }

    pub fn softening(&self) -> Result<SofteningSchedule, ExperimentError> {
        Ok(match &self.ssr.deltas {
            Some(deltas) => SofteningSchedule::new(deltas.clone())?,
            None => SofteningSchedule::benchmark(),
        })
    }

    pub fn edges(&self) -> RestrictionEdges {
        RestrictionEdges {
            gamma_low: self.ssr.gamma_low,
            gamma_high: self.ssr.gamma_high,
            beta_low: self.ssr.beta_low,
            beta_high: self.ssr.beta_high,
            epsilon_pinch: self.ssr.epsilon_pinch,
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.protocol.p_min < 1 || self.protocol.p_min > self.protocol.p_max {
            return Err(ExperimentError::Invalid(format!(
                "depth range [{}, {}] is empty or zero-based",
                self.protocol.p_min, self.protocol.p_max
            )));
        }
        if self.protocol.repeats == 0 {
            return Err(ExperimentError::Invalid("repeats must be at least 1".into()));
        }
        if self.problem.path.is_none() && self.problem.n.is_none() {
            return Err(ExperimentError::Invalid(
                "problem needs either a path or a generator size n".into(),
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_parses_with_defaults() {
        let cfg = ExperimentConfig::from_toml(
            "[problem]\nkind = \"sat\"\nn = 7\n",
        )
        .unwrap();
        assert_eq!(cfg.problem.alpha, 3.0);
        assert_eq!(cfg.protocol.name, Protocol::Ssr);
        assert_eq!(cfg.mcts.branching, 30);
        assert_eq!(cfg.mcts.cycles_initial, 1000);
        assert_eq!(cfg.output.seed, 1);
        cfg.validate().unwrap();
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let err = ExperimentConfig::from_toml(
            "[problem]\nkind = \"sat\"\nn = 7\nbogus = 1\n",
        );
        assert!(err.is_err());
    }

    #[test]
    fn overrides_take_precedence() {
        let mut cfg =
            ExperimentConfig::from_toml("[problem]\nkind = \"sat\"\nn = 7\n").unwrap();
        let overrides = CliOverrides {
            seed: Some(9),
            protocol: Some(Protocol::Vanilla),
            p_max: Some(2),
            branching: Some(10),
            noise: Some(0.5),
            cycles_initial: Some(100),
            cycles_per_turn: Some(60),
            ..Default::default()
        };
        cfg.apply_overrides(&overrides);
        assert_eq!(cfg.output.seed, 9);
        assert_eq!(cfg.protocol.name, Protocol::Vanilla);
        assert_eq!(cfg.protocol.p_max, 2);
        assert_eq!(cfg.mcts.branching, 10);
        assert_eq!(cfg.mcts.noise_sigma, 0.5);
        let mcts = cfg.mcts_config(cfg.protocol.name, 7);
        assert_eq!(mcts.budget.total(1), 160);
        assert_eq!(mcts.seed, 7);
    }

    #[test]
    fn protocol_defaults_pick_variant_and_final_move() {
        let cfg = ExperimentConfig::from_toml("[problem]\nkind = \"sat\"\nn = 5\n").unwrap();
        let vanilla = cfg.mcts_config(Protocol::Vanilla, 0);
        assert_eq!(vanilla.variant, Variant::Vanilla);
        assert_eq!(vanilla.final_move, FinalMove::MaxChild);
        let sp = cfg.mcts_config(Protocol::SsrSp, 0);
        assert_eq!(sp.variant, Variant::SinglePlayer);
        assert_eq!(sp.final_move, FinalMove::BestPath);
    }

    #[test]
    fn full_config_round_trips() {
        let text = r#"
[problem]
kind = "maxcut"
path = "builtin:cubic10"

[protocol]
name = "ssr_sp"
p_min = 1
p_max = 10
repeats = 3
noise = [0.0, 0.5, 1.0]

[mcts]
branching = 30
cycles_initial = 1000
cycles_per_turn = 800

[ssr]
deltas = [0.0, 0.0, 0.1]
epsilon_pinch = 0.25

[minimizer]
grad_tol = 1e-7

[hybrid]
repeats = 5
basin_cycles_per_turn = 50

[noise_study]
steps = [1, 3, 7]

[output]
experiment = "bench"
seed = 42
jobs = 4
"#;
        let cfg = ExperimentConfig::from_toml(text).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.protocol.noise.len(), 3);
        assert_eq!(cfg.softening().unwrap().deltas(), &[0.0, 0.0, 0.1]);
        assert_eq!(cfg.edges().epsilon_pinch, Some(0.25));
        assert_eq!(cfg.minimizer_config().grad_tol, 1e-7);
        assert_eq!(cfg.noise_study.steps, vec![1, 3, 7]);
        assert_eq!(cfg.experiment_dir().file_name().unwrap(), "bench");
    }
}
