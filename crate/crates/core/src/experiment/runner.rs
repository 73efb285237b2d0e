use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::analysis::{
    aggregate, fmt_sig12, write_aggregate_csv, write_leaf_csv, AggregateRow, EnergyStats,
    LeafEnumConfig, LeafEnumeration,
};
use crate::data::cubic_graphs_n10;
use crate::hybrid::{basin_rollout_game, mcts_then_descend, BasinGameResult, HybridReport};
use crate::mcts::{play_game, CycleBudget, GameResult, MctsConfig, SearchSpace};
use crate::problem::{
    generate_regular_graph, generate_sat_unique, parse_dimacs, parse_edgelist, write_dimacs,
    write_edgelist, DiagonalCost, Instance,
};
use crate::qaoa::{evaluate_cost, Schedule};
use crate::seeding::derive_seed;
use crate::ssr::{restrict, run_iterative};

use super::config::{ExperimentConfig, ProblemKind, Protocol};
use super::ExperimentError;

// Leading tags for derived seed streams.
const TAG_GENERATE: u64 = 1;
const TAG_RUN: u64 = 2;
const TAG_NOISE_BASE: u64 = 3;
const TAG_NOISE_GAME: u64 = 4;

/// An instance with the name its output files are keyed by.
#[derive(Debug, Clone)]
pub struct NamedInstance {
    pub name: String,
    pub instance: Instance,
}

/// Resolves the configured instance source: bundled benchmark graphs, a
/// file, a directory of files, or freshly generated instances.
pub fn load_instances(config: &ExperimentConfig) -> Result<Vec<NamedInstance>, ExperimentError> {
    match &config.problem.path {
        Some(path) if path.as_os_str() == "builtin:cubic10" => {
            if config.problem.kind != ProblemKind::Maxcut {
                return Err(ExperimentError::Invalid(
                    "builtin:cubic10 is a MaxCut benchmark".into(),
                ));
            }
            Ok(cubic_graphs_n10()
                .into_iter()
                .enumerate()
                .map(|(i, g)| NamedInstance {
                    name: format!("cubic10_{i:02}"),
                    instance: g.into(),
                })
                .collect())
        }
        Some(path) if path.is_dir() => {
            let mut files: Vec<PathBuf> = fs::read_dir(path)?
                .filter_map(|entry| entry.ok().map(|e| e.path()))
                .filter(|p| {
                    let ext = p.extension().and_then(|e| e.to_str()).unwrap_or("");
                    match config.problem.kind {
                        ProblemKind::Sat => ext == "cnf" || ext == "dimacs",
                        ProblemKind::Maxcut => ext == "edges",
                    }
                })
                .collect();
            files.sort();
            if files.is_empty() {
                return Err(ExperimentError::Invalid(format!(
                    "no instance files found under {}",
                    path.display()
                )));
            }
            files.iter().map(|p| load_instance_file(config.problem.kind, p)).collect()
        }
        Some(path) => Ok(vec![load_instance_file(config.problem.kind, path)?]),
        None => {
            let n = config.problem.n.ok_or_else(|| {
                ExperimentError::Invalid("generator requires a problem size n".into())
            })?;
            (0..config.problem.count)
                .map(|i| {
                    let seed = derive_seed(config.output.seed, &[TAG_GENERATE, i as u64]);
                    let instance = match config.problem.kind {
                        ProblemKind::Sat => {
                            Instance::Sat(generate_sat_unique(n, config.problem.alpha, seed)?)
                        }
                        ProblemKind::Maxcut => Instance::MaxCut(generate_regular_graph(
                            n,
                            config.problem.degree,
                            seed,
                        )?),
                    };
                    Ok(NamedInstance { name: format!("gen_{i:02}"), instance })
                })
                .collect()
        }
    }
}

fn load_instance_file(kind: ProblemKind, path: &Path) -> Result<NamedInstance, ExperimentError> {
    let text = fs::read_to_string(path)?;
    let name = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("instance")
        .to_string();
    let instance = match kind {
        ProblemKind::Sat => Instance::Sat(parse_dimacs(&text)?),
        ProblemKind::Maxcut => Instance::MaxCut(parse_edgelist(&text)?),
    };
    Ok(NamedInstance { name, instance })
}

fn thread_pool(jobs: usize) -> Result<rayon::ThreadPool, ExperimentError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| ExperimentError::Invalid(format!("cannot build worker pool: {e}")))
}

/// Writes generated instances as DIMACS / edge-list files plus a manifest
/// recording every seed. Rerunning with the same master seed reproduces the
/// files byte for byte.
pub fn cmd_generate(config: &ExperimentConfig) -> Result<GenerateSummary, ExperimentError> {
    let n = config
        .problem
        .n
        .ok_or_else(|| ExperimentError::Invalid("generate requires a problem size n".into()))?;
    let dir = config.experiment_dir().join("instances");
    fs::create_dir_all(&dir)?;

    let mut files = Vec::with_capacity(config.problem.count);
    for i in 0..config.problem.count {
        let seed = derive_seed(config.output.seed, &[TAG_GENERATE, i as u64]);
        let (file_name, text) = match config.problem.kind {
            ProblemKind::Sat => {
                let inst = generate_sat_unique(n, config.problem.alpha, seed)?;
                (format!("instance_{i:02}.cnf"), write_dimacs(&inst))
            }
            ProblemKind::Maxcut => {
                let graph = generate_regular_graph(n, config.problem.degree, seed)?;
                (format!("instance_{i:02}.edges"), write_edgelist(&graph))
            }
        };
        fs::write(dir.join(&file_name), text)?;
        files.push(json!({ "name": file_name, "seed": seed }));
    }

    let manifest = json!({
        "kind": match config.problem.kind { ProblemKind::Sat => "sat", ProblemKind::Maxcut => "maxcut" },
        "n": n,
        "alpha": config.problem.alpha,
        "degree": config.problem.degree,
        "count": config.problem.count,
        "master_seed": config.output.seed,
        "files": files,
    });
    fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)?)?;
    Ok(GenerateSummary { dir, count: config.problem.count })
}

#[derive(Debug)]
pub struct GenerateSummary {
    pub dir: PathBuf,
    pub count: usize,
}

/// What one run stored for one depth.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DepthArtifact {
    Game(GameResult),
    Hybrid(HybridReport),
    Basin(BasinGameResult),
}

impl DepthArtifact {
    pub fn energy(&self) -> f64 {
        match self {
            DepthArtifact::Game(g) => g.energy,
            DepthArtifact::Hybrid(h) => h.best_energy(),
            DepthArtifact::Basin(b) => b.game.energy,
        }
    }

    fn fev(&self) -> (u64, u64) {
        match self {
            DepthArtifact::Game(g) => (g.n_fev, 0),
            DepthArtifact::Hybrid(h) => (h.mcts_fev, h.minimizer_fev),
            DepthArtifact::Basin(b) => (b.game.n_fev, b.minimizer_fev),
        }
    }
}

#[derive(Debug, Clone)]
struct RunRow {
    instance: String,
    repeat: usize,
    depth: usize,
    energy: f64,
    fev_search: u64,
    fev_minimizer: u64,
    seed: u64,
}

#[derive(Debug)]
pub struct RunSummary {
    pub experiment_dir: PathBuf,
    pub protocol: Protocol,
    pub runs: usize,
    /// Mean/std/best per depth over instances and repeats.
    pub per_depth: Vec<(usize, EnergyStats)>,
}

/// Executes the configured protocol for every instance and repeat, writing
/// per-depth artifact JSONs under
/// `<outdir>/<experiment>/<instance>/<protocol>/` plus `runs.csv` and
/// `summary.csv` rollups. Independent runs execute on a worker pool sized by
/// the `jobs` setting.
pub fn cmd_run(config: &ExperimentConfig) -> Result<RunSummary, ExperimentError> {
    config.validate()?;
    let instances = load_instances(config)?;
    let protocol = config.protocol.name;
    let exp_dir = config.experiment_dir();
    fs::create_dir_all(&exp_dir)?;

    let mut units = Vec::new();
    for i in 0..instances.len() {
        for rep in 0..config.protocol.repeats {
            units.push((i, rep));
        }
    }

    let pool = thread_pool(config.output.jobs)?;
    let results: Result<Vec<Vec<RunRow>>, ExperimentError> = pool.install(|| {
        units
            .par_iter()
            .map(|&(i, rep)| run_unit(config, protocol, &exp_dir, &instances[i], i, rep))
            .collect()
    });
    let mut rows: Vec<RunRow> = results?.into_iter().flatten().collect();
    rows.sort_by(|a, b| {
        (&a.instance, a.repeat, a.depth).cmp(&(&b.instance, b.repeat, b.depth))
    });

    write_runs_csv(&exp_dir.join("runs.csv"), protocol, &rows)?;

    let mut per_depth = Vec::new();
    let mut depths: Vec<usize> = rows.iter().map(|r| r.depth).collect();
    depths.sort_unstable();
    depths.dedup();
    for depth in depths {
        let energies: Vec<f64> =
            rows.iter().filter(|r| r.depth == depth).map(|r| r.energy).collect();
        per_depth.push((depth, aggregate(&energies)?));
    }
    let agg_rows: Vec<AggregateRow> = per_depth
        .iter()
        .map(|(depth, stats)| AggregateRow {
            key: depth.to_string(),
            stats: *stats,
            seed: config.output.seed,
        })
        .collect();
    let mut out = Vec::new();
    write_aggregate_csv(&agg_rows, &mut out)?;
    fs::write(exp_dir.join("summary.csv"), out)?;

    Ok(RunSummary { experiment_dir: exp_dir, protocol, runs: units.len(), per_depth })
}

fn run_unit(
    config: &ExperimentConfig,
    protocol: Protocol,
    exp_dir: &Path,
    named: &NamedInstance,
    instance_idx: usize,
    repeat: usize,
) -> Result<Vec<RunRow>, ExperimentError> {
    let diag = DiagonalCost::build(&named.instance)?;
    let run_seed =
        derive_seed(config.output.seed, &[TAG_RUN, instance_idx as u64, repeat as u64]);
    let dir = match config.protocol.repeats {
        1 => exp_dir.join(&named.name).join(protocol.dir_name()),
        _ => exp_dir
            .join(&named.name)
            .join(protocol.dir_name())
            .join(format!("rep_{repeat:02}")),
    };
    fs::create_dir_all(&dir)?;

    let artifacts = run_protocol(config, protocol, &diag, run_seed)?;

    let mut rows = Vec::with_capacity(artifacts.len());
    for (p, artifact) in &artifacts {
        let path = dir.join(format!("depth_{p:02}.json"));
        fs::write(&path, serde_json::to_string_pretty(artifact)?)?;
        let (fev_search, fev_minimizer) = artifact.fev();
        rows.push(RunRow {
            instance: named.name.clone(),
            repeat,
            depth: *p,
            energy: artifact.energy(),
            fev_search,
            fev_minimizer,
            seed: run_seed,
        });
    }
    Ok(rows)
}

/// Runs one seeded unit of the selected protocol and returns the per-depth
/// artifacts.
pub fn run_protocol(
    config: &ExperimentConfig,
    protocol: Protocol,
    diag: &DiagonalCost,
    run_seed: u64,
) -> Result<Vec<(usize, DepthArtifact)>, ExperimentError> {
    let b = config.mcts.branching;
    let depths = config.protocol.p_min..=config.protocol.p_max;
    match protocol {
        Protocol::Vanilla | Protocol::Sp => depths
            .map(|p| {
                let mcts = config.mcts_config(protocol, derive_seed(run_seed, &[p as u64]));
                let space = SearchSpace::unrestricted(p, b)?;
                let game = play_game(
                    &space,
                    |_: &[usize], s: &Schedule| evaluate_cost(diag, s).energy,
                    &mcts,
                )?;
                Ok((p, DepthArtifact::Game(game)))
            })
            .collect(),
        Protocol::Ssr | Protocol::SsrSp => {
            let mcts = config.mcts_config(protocol, run_seed);
            let results = run_iterative(
                diag,
                config.protocol.p_max,
                &mcts,
                b,
                &config.softening()?,
                &config.edges(),
                None,
            )?;
            Ok(results
                .into_iter()
                .enumerate()
                .map(|(i, game)| (i + 1, DepthArtifact::Game(game)))
                .filter(|(p, _)| *p >= config.protocol.p_min)
                .collect())
        }
        Protocol::HybridInit => depths
            .map(|p| {
                let mcts = config.mcts_config(protocol, derive_seed(run_seed, &[p as u64]));
                let report = mcts_then_descend(
                    diag,
                    p,
                    b,
                    &mcts,
                    &config.minimizer_config(),
                    config.hybrid.repeats,
                )?;
                Ok((p, DepthArtifact::Hybrid(report)))
            })
            .collect(),
        Protocol::HybridBasin => depths
            .map(|p| {
                let mut mcts = config.mcts_config(protocol, derive_seed(run_seed, &[p as u64]));
                mcts.budget = CycleBudget::new(0, config.hybrid.basin_cycles_per_turn);
                let space = SearchSpace::unrestricted(p, b)?;
                let result =
                    basin_rollout_game(diag, &space, &mcts, &config.minimizer_config())?;
                Ok((p, DepthArtifact::Basin(result)))
            })
            .collect(),
    }
}

fn write_runs_csv(path: &Path, protocol: Protocol, rows: &[RunRow]) -> Result<(), ExperimentError> {
    let mut out = String::new();
    out.push_str("instance,protocol,repeat,depth,energy,n_fev_search,n_fev_minimizer,seed\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.instance,
            protocol.dir_name(),
            r.repeat,
            r.depth,
            fmt_sig12(r.energy),
            r.fev_search,
            r.fev_minimizer,
            r.seed
        ));
    }
    fs::write(path, out)?;
    Ok(())
}

#[derive(Debug)]
pub struct LandscapeSummary {
    pub csv_path: PathBuf,
    pub rows: u64,
    pub optimum_energy: f64,
}

/// Enumerates every leaf of the configured space (unrestricted at `p_max`,
/// or an SSR space rebuilt from a stored depth result) and streams the
/// records to a CSV file.
pub fn cmd_landscape(
    config: &ExperimentConfig,
    restrict_from: Option<&Path>,
    delta_override: Option<f64>,
    cap: Option<u64>,
) -> Result<LandscapeSummary, ExperimentError> {
    let instances = load_instances(config)?;
    let named = &instances[0];
    let diag = DiagonalCost::build(&named.instance)?;
    let b = config.mcts.branching;

    let (space, label) = match restrict_from {
        Some(path) => {
            let game: GameResult = serde_json::from_str(&fs::read_to_string(path)?)?;
            let p_next = game.schedule.depth() + 1;
            let delta =
                delta_override.unwrap_or_else(|| config.softening().map_or(0.0, |s| s.delta_for_depth(p_next)));
            let space = restrict(&game.schedule, delta, &config.edges(), b)?;
            (space, format!("ssr_p{p_next}"))
        }
        None => {
            let p = config.protocol.p_max;
            (SearchSpace::unrestricted(p, b)?, format!("unrestricted_p{p}"))
        }
    };

    let mut enum_config = LeafEnumConfig::default();
    if let Some(cap) = cap {
        enum_config.cap = cap;
    }
    let enumeration = LeafEnumeration::new(&diag, &space, &enum_config)?;

    let exp_dir = config.experiment_dir();
    fs::create_dir_all(&exp_dir)?;
    let csv_path = exp_dir.join(format!("landscape_{}_{}_b{}.csv", named.name, label, b));
    let mut file = std::io::BufWriter::new(fs::File::create(&csv_path)?);
    let rows = write_leaf_csv(&enumeration, &mut file)?;

    Ok(LandscapeSummary { csv_path, rows, optimum_energy: enumeration.optimum_energy() })
}

#[derive(Debug)]
pub struct NoiseStudySummary {
    pub experiment_dir: PathBuf,
    /// One CSV per restriction step.
    pub tables: Vec<PathBuf>,
}

/// Per-step noise sweep: a noiseless iterative run fixes the depth-`P`
/// optima, then each step `P -> P+1` is replayed with Gaussian reward noise
/// of every configured strength, with fresh seeds per repeat. Energies in the
/// emitted tables are always noiseless evaluations of the chosen schedules.
pub fn cmd_noise_study(config: &ExperimentConfig) -> Result<NoiseStudySummary, ExperimentError> {
    config.validate()?;
    let instances = load_instances(config)?;
    let steps = &config.noise_study.steps;
    if steps.is_empty() {
        return Err(ExperimentError::Invalid("noise study needs at least one step".into()));
    }
    let p_base = *steps.iter().max().expect("non-empty steps");
    let noise_grid = &config.protocol.noise;
    let repeats = config.protocol.repeats;
    let b = config.mcts.branching;
    let exp_dir = config.experiment_dir();
    fs::create_dir_all(&exp_dir)?;

    let pool = thread_pool(config.output.jobs)?;
    let mut tables = Vec::new();

    for (inst_idx, named) in instances.iter().enumerate() {
        let diag = DiagonalCost::build(&named.instance)?;
        // The restriction baseline is found without noise.
        let base_cfg = config.mcts_config(
            Protocol::Ssr,
            derive_seed(config.output.seed, &[TAG_NOISE_BASE, inst_idx as u64]),
        );
        let base_cfg = MctsConfig { noise_sigma: 0.0, ..base_cfg };
        let baseline = run_iterative(
            &diag,
            p_base,
            &base_cfg,
            b,
            &config.softening()?,
            &config.edges(),
            None,
        )?;

        let inst_dir = exp_dir.join(&named.name).join("noise");
        fs::create_dir_all(&inst_dir)?;

        for &p in steps {
            if p > baseline.len() {
                return Err(ExperimentError::Invalid(format!(
                    "step {p} -> {} exceeds the baseline depth {}",
                    p + 1,
                    baseline.len()
                )));
            }
            let delta = config.softening()?.delta_for_depth(p + 1);
            let space = restrict(&baseline[p - 1].schedule, delta, &config.edges(), b)?;

            let mut cells = Vec::new();
            for (k, &ns) in noise_grid.iter().enumerate() {
                for rep in 0..repeats {
                    cells.push((k, ns, rep));
                }
            }
            let games: Result<Vec<(usize, f64, usize, GameResult)>, ExperimentError> =
                pool.install(|| {
                    cells
                        .par_iter()
                        .map(|&(k, ns, rep)| {
                            let seed = derive_seed(
                                config.output.seed,
                                &[TAG_NOISE_GAME, inst_idx as u64, p as u64, k as u64, rep as u64],
                            );
                            let mcts = MctsConfig {
                                noise_sigma: ns,
                                ..config.mcts_config(config.protocol.name, seed)
                            };
                            let game = play_game(
                                &space,
                                |_: &[usize], s: &Schedule| evaluate_cost(&diag, s).energy,
                                &mcts,
                            )?;
                            Ok((k, ns, rep, game))
                        })
                        .collect()
                });
            let mut games = games?;
            games.sort_by(|a, b| (a.0, a.2).cmp(&(b.0, b.2)));

            let mut agg_rows = Vec::new();
            for (k, &ns) in noise_grid.iter().enumerate() {
                let energies: Vec<f64> =
                    games.iter().filter(|g| g.0 == k).map(|g| g.3.energy).collect();
                agg_rows.push(AggregateRow {
                    key: format!("{ns}"),
                    stats: aggregate(&energies)?,
                    seed: config.output.seed,
                });
            }

            let detail = json!({
                "instance": named.name,
                "step": format!("{}->{}", p, p + 1),
                "baseline_energy": baseline[p - 1].energy,
                "noise_grid": noise_grid,
                "repeats": repeats,
                "games": games.iter().map(|(_, ns, rep, g)| json!({
                    "noise_sigma": ns,
                    "repeat": rep,
                    "energy": g.energy,
                    "seed": g.seed,
                    "schedule": g.schedule,
                })).collect::<Vec<_>>(),
            });
            fs::write(
                inst_dir.join(format!("step_{p:02}.json")),
                serde_json::to_string_pretty(&detail)?,
            )?;

            let csv_path = inst_dir.join(format!("step_{p:02}.csv"));
            let mut out = Vec::new();
            write_aggregate_csv(&agg_rows, &mut out)?;
            fs::write(&csv_path, out)?;
            tables.push(csv_path);
        }
    }

    Ok(NoiseStudySummary { experiment_dir: exp_dir, tables })
}

#[derive(Debug)]
pub struct AggregateSummary {
    pub csv_path: PathBuf,
    pub rows: usize,
}

/// Walks a results tree for `depth_*.json` artifacts and rebuilds a rollup
/// CSV grouped by protocol and depth.
pub fn cmd_aggregate(dir: &Path) -> Result<AggregateSummary, ExperimentError> {
    let mut files = Vec::new();
    collect_depth_files(dir, &mut files)?;
    if files.is_empty() {
        return Err(ExperimentError::Invalid(format!(
            "no depth_*.json artifacts under {}",
            dir.display()
        )));
    }
    files.sort();

    // (protocol, depth) -> (energies, smallest contributing seed)
    let mut groups: std::collections::BTreeMap<(String, usize), (Vec<f64>, u64)> =
        std::collections::BTreeMap::new();
    for path in &files {
        let depth: usize = path
            .file_stem()
            .and_then(|s| s.to_str())
            .and_then(|s| s.strip_prefix("depth_"))
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| {
                ExperimentError::Invalid(format!("bad artifact name {}", path.display()))
            })?;
        let protocol = protocol_of(path);
        let artifact: DepthArtifact = serde_json::from_str(&fs::read_to_string(path)?)?;
        let seed = match &artifact {
            DepthArtifact::Game(g) => g.seed,
            DepthArtifact::Hybrid(h) => h.runs.first().map(|r| r.game.seed).unwrap_or(0),
            DepthArtifact::Basin(b) => b.game.seed,
        };
        let entry = groups.entry((protocol, depth)).or_insert_with(|| (Vec::new(), seed));
        entry.0.push(artifact.energy());
        entry.1 = entry.1.min(seed);
    }

    let mut rows = Vec::new();
    for ((protocol, depth), (energies, seed)) in &groups {
        rows.push(AggregateRow {
            key: format!("{protocol}_{depth}"),
            stats: aggregate(energies)?,
            seed: *seed,
        });
    }
    let csv_path = dir.join("aggregate.csv");
    let mut out = Vec::new();
    write_aggregate_csv(&rows, &mut out)?;
    fs::write(&csv_path, out)?;
    Ok(AggregateSummary { csv_path, rows: rows.len() })
}

fn protocol_of(path: &Path) -> String {
    // Artifacts live under .../<protocol>/[rep_xx/]depth_NN.json.
    let mut components: Vec<&str> =
        path.iter().filter_map(|c| c.to_str()).collect();
    components.pop();
    if let Some(last) = components.last() {
        if last.starts_with("rep_") {
            components.pop();
        }
    }
    components.last().unwrap_or(&"unknown").to_string()
}

fn collect_depth_files(dir: &Path, out: &mut Vec<PathBuf>) -> Result<(), ExperimentError> {
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if path.is_dir() {
            collect_depth_files(&path, out)?;
        } else if let Some(name) = path.file_name().and_then(|s| s.to_str()) {
            if name.starts_with("depth_") && name.ends_with(".json") {
                out.push(path);
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_config(dir: &Path) -> ExperimentConfig {
        let text = format!(
            r#"
[problem]
kind = "sat"
n = 4
count = 2

[protocol]
name = "ssr"
p_max = 2

[mcts]
branching = 6
cycles_initial = 30
cycles_per_turn = 20

[output]
outdir = "{}"
experiment = "tiny"
seed = 7
jobs = 1
"#,
            dir.display()
        );
        ExperimentConfig::from_toml(&text).unwrap()
    }

    #[test]
    fn generated_instances_are_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let config = tiny_config(dir.path());
        let a = load_instances(&config).unwrap();
        let b = load_instances(&config).unwrap();
        assert_eq!(a.len(), 2);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.instance, y.instance);
        }
    }

    #[test]
    fn builtin_cubic10_loads_nineteen_graphs() {
        let mut config = tiny_config(tempfile::tempdir().unwrap().path());
        config.problem.kind = ProblemKind::Maxcut;
        config.problem.path = Some(PathBuf::from("builtin:cubic10"));
        let instances = load_instances(&config).unwrap();
        assert_eq!(instances.len(), 19);
        assert_eq!(instances[0].name, "cubic10_00");
    }

    #[test]
    fn generate_writes_verified_instances_and_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let config = tiny_config(dir.path());
        let summary = cmd_generate(&config).unwrap();
        assert_eq!(summary.count, 2);
        let manifest: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(summary.dir.join("manifest.json")).unwrap())
                .unwrap();
        assert_eq!(manifest["count"], 2);

        for i in 0..2 {
            let text = fs::read_to_string(summary.dir.join(format!("instance_{i:02}.cnf"))).unwrap();
            let inst = parse_dimacs(&text).unwrap();
            assert_eq!(inst.num_clauses(), 12);
            let diag = DiagonalCost::build(&inst.into()).unwrap();
            assert_eq!(diag.ground_states().len(), 1);
        }

        // Byte-identical on rerun.
        let before = fs::read(summary.dir.join("instance_00.cnf")).unwrap();
        cmd_generate(&config).unwrap();
        let after = fs::read(summary.dir.join("instance_00.cnf")).unwrap();
        assert_eq!(before, after);
    }

    #[test]
    fn run_produces_artifacts_and_identical_reruns() {
        let dir = tempfile::tempdir().unwrap();
        let config = tiny_config(dir.path());
        let summary = cmd_run(&config).unwrap();
        assert_eq!(summary.runs, 2);
        assert_eq!(summary.per_depth.len(), 2);

        let depth_file = summary
            .experiment_dir
            .join("gen_00")
            .join("ssr")
            .join("depth_01.json");
        assert!(depth_file.exists());
        let artifact: DepthArtifact =
            serde_json::from_str(&fs::read_to_string(&depth_file).unwrap()).unwrap();
        assert!(matches!(artifact, DepthArtifact::Game(_)));

        let runs_csv = fs::read(summary.experiment_dir.join("runs.csv")).unwrap();
        let summary_csv = fs::read(summary.experiment_dir.join("summary.csv")).unwrap();

        // A second run into a fresh directory yields byte-identical tables.
        let dir2 = tempfile::tempdir().unwrap();
        let mut config2 = tiny_config(dir2.path());
        config2.output.jobs = 2;
        let summary2 = cmd_run(&config2).unwrap();
        assert_eq!(fs::read(summary2.experiment_dir.join("runs.csv")).unwrap(), runs_csv);
        assert_eq!(fs::read(summary2.experiment_dir.join("summary.csv")).unwrap(), summary_csv);
    }

    #[test]
    fn aggregate_rebuilds_rollup_from_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        let config = tiny_config(dir.path());
        let summary = cmd_run(&config).unwrap();
        let agg = cmd_aggregate(&summary.experiment_dir).unwrap();
        assert_eq!(agg.rows, 2); // ssr at depths 1 and 2
        let text = fs::read_to_string(agg.csv_path).unwrap();
        assert!(text.starts_with("depth_or_ns,mean,std,best,seed"));
        assert!(text.contains("ssr_1,"));
    }

    #[test]
    fn landscape_row_count_follows_halving() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = tiny_config(dir.path());
        config.problem.count = 1;
        config.protocol.p_max = 1;
        config.mcts.branching = 5;
        let summary = cmd_landscape(&config, None, None, None).unwrap();
        assert_eq!(summary.rows, 13);
        let text = fs::read_to_string(&summary.csv_path).unwrap();
        assert_eq!(text.lines().count(), 14);
    }

    #[test]
    fn noise_study_emits_tables() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = tiny_config(dir.path());
        config.problem.count = 1;
        config.protocol.p_max = 2;
        config.protocol.repeats = 3;
        config.protocol.noise = vec![0.0, 0.5];
        config.noise_study.steps = vec![1];
        let summary = cmd_noise_study(&config).unwrap();
        assert_eq!(summary.tables.len(), 1);
        let text = fs::read_to_string(&summary.tables[0]).unwrap();
        assert_eq!(text.lines().count(), 3); // header + two noise levels
        assert!(text.lines().nth(1).unwrap().starts_with("0,"));
    }
}
