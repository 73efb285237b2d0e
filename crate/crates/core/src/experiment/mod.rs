//! Declarative experiment configs and the orchestration behind the CLI:
//! instance generation, protocol runs, landscape dumps, noise sweeps, and
//! result aggregation, all deterministic in the master seed.

mod config;
mod runner;

pub use config::{
    CliOverrides, ExperimentConfig, HybridSection, MctsSection, MinimizerSection,
    NoiseStudySection, OutputSection, ProblemKind, ProblemSection, Protocol, ProtocolSection,
    SsrSection, OUTDIR_ENV,
};
pub use runner::{
    cmd_aggregate, cmd_generate, cmd_landscape, cmd_noise_study, cmd_run, load_instances,
    run_protocol, AggregateSummary, DepthArtifact, GenerateSummary, LandscapeSummary,
    NamedInstance, NoiseStudySummary, RunSummary,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid experiment setup: {0}")]
    Invalid(String),
    #[error("config parse error: {0}")]
    Config(#[from] toml::de::Error),
    #[error(transparent)]
    Problem(#[from] crate::problem::ProblemError),
    #[error(transparent)]
    Mcts(#[from] crate::mcts::MctsError),
    #[error(transparent)]
    Ssr(#[from] crate::ssr::SsrError),
    #[error(transparent)]
    Hybrid(#[from] crate::hybrid::HybridError),
    #[error(transparent)]
    Analysis(#[from] crate::analysis::AnalysisError),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}
