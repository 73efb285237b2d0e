//! Command-line front end: reproducible experiment orchestration from
//! declarative TOML configs. All heavy lifting lives in the library; see the
//! crate examples for programmatic use.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qaoa_mcts::analysis::fmt_sig12;
use qaoa_mcts::experiment::{
    cmd_aggregate, cmd_generate, cmd_landscape, cmd_noise_study, cmd_run, CliOverrides,
    ExperimentConfig, ExperimentError,
};

#[derive(Parser)]
#[command(
    name = "qaoa-mcts",
    about = "Tree-search optimization of QAOA schedules on 3-SAT and MaxCut instances",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Experiment config file (TOML).
    #[arg(long)]
    config: PathBuf,
    #[command(flatten)]
    overrides: CliOverrides,
}

impl ConfigArgs {
    fn load(&self) -> Result<ExperimentConfig, ExperimentError> {
        let mut config = ExperimentConfig::load(&self.config)?;
        config.apply_overrides(&self.overrides);
        Ok(config)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate benchmark instances and write them with a manifest.
    Generate(ConfigArgs),
    /// Execute the configured protocol over all instances and repeats.
    Run(ConfigArgs),
    /// Enumerate every leaf of a search space into a CSV table.
    Landscape {
        #[command(flatten)]
        args: ConfigArgs,
        /// Rebuild the restricted space around a stored depth_<P>.json result.
        #[arg(long)]
        restrict_from: Option<PathBuf>,
        /// Softening constant override for the rebuilt space.
        #[arg(long)]
        delta: Option<f64>,
        /// Refuse enumerations above this leaf count.
        #[arg(long)]
        cap: Option<u64>,
    },
    /// Sweep reward-noise strengths over configured restriction steps.
    NoiseStudy(ConfigArgs),
    /// Run a hybrid protocol (defaults to hybrid_init if none is configured).
    Hybrid(ConfigArgs),
    /// Rebuild a rollup CSV from stored depth artifacts.
    Aggregate {
        /// Results directory to walk.
        #[arg(long)]
        dir: PathBuf,
    },
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), ExperimentError> {
    match cli.command {
        Command::Generate(args) => {
            let config = args.load()?;
            let summary = cmd_generate(&config)?;
            println!("wrote {} instances to {}", summary.count, summary.dir.display());
        }
        Command::Run(args) => {
            let config = args.load()?;
            run_and_report(&config)?;
        }
        Command::Landscape { args, restrict_from, delta, cap } => {
            let config = args.load()?;
            let summary = cmd_landscape(&config, restrict_from.as_deref(), delta, cap)?;
            println!(
                "{} rows -> {} (optimum energy {})",
                summary.rows,
                summary.csv_path.display(),
                fmt_sig12(summary.optimum_energy)
            );
        }
        Command::NoiseStudy(args) => {
            let config = args.load()?;
            let summary = cmd_noise_study(&config)?;
            println!("noise tables under {}:", summary.experiment_dir.display());
            for table in &summary.tables {
                println!("  {}", table.display());
            }
        }
        Command::Hybrid(args) => {
            let mut config = args.load()?;
            if !config.protocol.name.is_hybrid() {
                config.protocol.name = qaoa_mcts::experiment::Protocol::HybridInit;
            }
            run_and_report(&config)?;
        }
        Command::Aggregate { dir } => {
            let summary = cmd_aggregate(&dir)?;
            println!("{} rows -> {}", summary.rows, summary.csv_path.display());
        }
    }
    Ok(())
}

fn run_and_report(config: &ExperimentConfig) -> Result<(), ExperimentError> {
    let summary = cmd_run(config)?;
    println!(
        "{} runs of {} -> {}",
        summary.runs,
        summary.protocol.dir_name(),
        summary.experiment_dir.display()
    );
    println!("depth,mean,std,best");
    for (depth, stats) in &summary.per_depth {
        println!(
            "{depth},{},{},{}",
            fmt_sig12(stats.mean),
            fmt_sig12(stats.std),
            fmt_sig12(stats.best)
        );
    }
    Ok(())
}
