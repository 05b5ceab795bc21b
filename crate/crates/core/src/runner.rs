//! Runs configured experiments on disk: run logs, snapshots, resumption,
//! batches and post-hoc analysis.
//!
//! A run directory holds
//!
//! - `runlog.csv`: one row per generation, `gen,best_rm,best_rc,p0,...`
//!   (`gen,fitness,p0,...` for the metric baseline, where `fitness` is the
//!   best `-e_m`);
//! - `snapshots/gen_NNNNN.json` every `snapshot_every` generations and
//!   `final.json` at the end, each enough to resume from;
//! - `summary.json` with the subjectively best final model and its error.

use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::{
    final_dispersions, mann_whitney_u, model_error, parameter_grid, post_evaluate_classifiers,
    recurrent_steady_state, sensor_occupancy, swarm_series, MannWhitney, PostEvaluation,
};
use crate::baseline::{MetricBaseline, MetricState};
use crate::behavior::{Controller, ControllerSpec};
use crate::classifier::ElmanNet;
use crate::coevolution::{ModelSpace, Population, RunState, TuringLearning};
use crate::config::{executed_parameters, CaseStudy, Engine, ExperimentConfig};
use crate::error::{Error, Result};
use crate::sim::WorldConfig;

/// Steps a recurrent model is held at one input before its output is read.
pub const STEADY_STATE_STEPS: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "engine", rename_all = "snake_case")]
pub enum EngineState {
    TuringLearning(RunState),
    MetricBaseline(MetricState),
}

impl EngineState {
    pub fn generation(&self) -> usize {
        match self {
            EngineState::TuringLearning(s) => s.generation,
            EngineState::MetricBaseline(s) => s.generation,
        }
    }

    pub fn models(&self) -> &Population {
        match self {
            EngineState::TuringLearning(s) => &s.models,
            EngineState::MetricBaseline(s) => &s.models,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub config_hash: String,
    pub config: ExperimentConfig,
    pub state: EngineState,
}

impl Snapshot {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let snapshot: Snapshot = serde_json::from_str(&text)?;
        if snapshot.config.hash() != snapshot.config_hash {
            return Err(Error::SnapshotMismatch {
                path: path.into(),
                reason: "stored hash does not match the stored configuration".into(),
            });
        }
        Ok(snapshot)
    }

    fn save(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("json.tmp");
        let text = serde_json::to_string_pretty(self)?;
        fs::write(&tmp, text).map_err(|e| Error::io(&tmp, e))?;
        fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
    }
}

/// What `summary.json` holds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub case_study: CaseStudy,
    pub engine: Engine,
    pub seed: u64,
    pub generations: usize,
    pub best_model: ControllerSpec,
    pub best_model_fitness: Option<f64>,
    /// Parameters of the agents.
    pub truth: Vec<f64>,
    /// What the best model executes: clamped wheel speeds, the field of view
    /// in radians, or a network's steady-state outputs.
    pub executed: Vec<f64>,
    /// Error of `executed` against `truth`.
    pub ae: Vec<f64>,
    pub mae: f64,
    /// Error of the raw genes, for reactive models.
    pub raw_ae: Option<Vec<f64>>,
    pub raw_mae: Option<f64>,
}

/// Parameters a genome executes, comparable with the configuration's truth.
pub fn executed_model(space: &ModelSpace, genome: &[f64]) -> Result<Vec<f64>> {
    Ok(match space.decode(genome)? {
        Controller::Recurrent(net) => recurrent_steady_state(&net, 2, STEADY_STATE_STEPS).outputs,
        _ => executed_parameters(space, genome),
    })
}

pub fn summarize(config: &ExperimentConfig, state: &EngineState) -> Result<Summary> {
    let space = config.model_space();
    let best = state.models().best();
    let truth = config.truth()?;
    let executed = executed_model(&space, &best.genome)?;
    let err = model_error(&executed, &truth)?;
    let raw = match space {
        ModelSpace::Reactive { .. } => Some(model_error(&best.genome, &truth)?),
        ModelSpace::MorphReactive { .. } => {
            let mut genes = best.genome.clone();
            *genes.last_mut().expect("non-empty") = *executed.last().expect("non-empty");
            Some(model_error(&genes, &truth)?)
        }
        ModelSpace::Recurrent { .. } => None,
    };
    Ok(Summary {
        case_study: config.case_study,
        engine: config.engine,
        seed: config.seed,
        generations: state.generation(),
        best_model: space.decode(&best.genome)?.to_spec(),
        best_model_fitness: best.fitness,
        truth,
        executed,
        ae: err.ae,
        mae: err.mae,
        raw_mae: raw.as_ref().map(|e| e.mae),
        raw_ae: raw.map(|e| e.ae),
    })
}

pub fn runlog_header(config: &ExperimentConfig) -> String {
    let mut cols: Vec<String> = match config.engine {
        Engine::TuringLearning => vec!["gen".into(), "best_rm".into(), "best_rc".into()],
        Engine::MetricBaseline => vec!["gen".into(), "fitness".into()],
    };
    cols.extend((0..config.model_space().genome_len()).map(|i| format!("p{i}")));
    cols.join(",")
}

fn csv_row(generation: usize, values: impl IntoIterator<Item = f64>) -> String {
    let mut row = generation.to_string();
    for v in values {
        row.push(',');
        row.push_str(&v.to_string());
    }
    row
}

/// A single experiment bound to its run directory.
pub struct Runner {
    pub config: ExperimentConfig,
    pub dir: PathBuf,
    engine: EngineImpl,
}

enum EngineImpl {
    Turing(TuringLearning),
    Metric(MetricBaseline),
}

impl Runner {
    pub fn new(config: ExperimentConfig, dir: impl Into<PathBuf>) -> Result<Self> {
        config.validate()?;
        let setup = config.setup()?;
        let engine = match config.engine {
            Engine::TuringLearning => EngineImpl::Turing(TuringLearning {
                setup,
                model_es: config.populations.model_es(),
                classifier_es: config.populations.classifier_es(),
            }),
            Engine::MetricBaseline => EngineImpl::Metric(MetricBaseline {
                setup,
                model_es: config.populations.model_es(),
            }),
        };
        Ok(Runner {
            config,
            dir: dir.into(),
            engine,
        })
    }

    pub fn initial_state(&self) -> EngineState {
        match &self.engine {
            EngineImpl::Turing(e) => EngineState::TuringLearning(e.initial_state()),
            EngineImpl::Metric(e) => EngineState::MetricBaseline(e.initial_state()),
        }
    }

    /// Runs one generation and returns its run-log row.
    pub fn advance(&self, state: &mut EngineState) -> Result<String> {
        Ok(match (&self.engine, state) {
            (EngineImpl::Turing(e), EngineState::TuringLearning(s)) => {
                let r = e.advance(s)?;
                let head = [r.best_model_fitness(), r.best_classifier_fitness()];
                csv_row(r.generation, head.into_iter().chain(r.best_model.iter().copied()))
            }
            (EngineImpl::Metric(e), EngineState::MetricBaseline(s)) => {
                let r = e.advance(s)?;
                csv_row(r.generation, std::iter::once(r.best_fitness()).chain(r.best_model.iter().copied()))
            }
            _ => {
                return Err(Error::SnapshotMismatch {
                    path: self.dir.clone(),
                    reason: "engine state does not match the configured engine".into(),
                })
            }
        })
    }

    pub fn runlog_path(&self) -> PathBuf {
        self.dir.join("runlog.csv")
    }

    fn snapshot(&self, state: &EngineState) -> Snapshot {
        Snapshot {
            config_hash: self.config.hash(),
            config: self.config.clone(),
            state: state.clone(),
        }
    }

    /// Runs generations until `state` has completed `target` of them,
    /// appending to the run log and writing snapshots on the way, then
    /// writes `final.json` and `summary.json`.
    pub fn drive(&self, state: &mut EngineState, target: usize) -> Result<Summary> {
        let snapshots = self.dir.join("snapshots");
        fs::create_dir_all(&snapshots).map_err(|e| Error::io(&snapshots, e))?;
        let log_path = self.runlog_path();
        let mut log = OpenOptions::new()
            .append(true)
            .create(true)
            .open(&log_path)
            .map_err(|e| Error::io(&log_path, e))?;
        if log.metadata().map_err(|e| Error::io(&log_path, e))?.len() == 0 {
            writeln!(log, "{}", runlog_header(&self.config)).map_err(|e| Error::io(&log_path, e))?;
        }
        while state.generation() < target {
            let row = self.advance(state)?;
            writeln!(log, "{row}").map_err(|e| Error::io(&log_path, e))?;
            let g = state.generation();
            if g.is_multiple_of(self.config.snapshot_every) {
                self.snapshot(state).save(&snapshots.join(format!("gen_{g:05}.json")))?;
            }
        }
        log.flush().map_err(|e| Error::io(&log_path, e))?;
        self.snapshot(state).save(&self.dir.join("final.json"))?;
        let summary = summarize(&self.config, state)?;
        let path = self.dir.join("summary.json");
        fs::write(&path, serde_json::to_string_pretty(&summary)?).map_err(|e| Error::io(&path, e))?;
        Ok(summary)
    }

    /// Starts from scratch, replacing any previous run log.
    pub fn run(&self) -> Result<Summary> {
        fs::create_dir_all(&self.dir).map_err(|e| Error::io(&self.dir, e))?;
        let log = self.runlog_path();
        if log.exists() {
            fs::remove_file(&log).map_err(|e| Error::io(&log, e))?;
        }
        let mut state = self.initial_state();
        self.drive(&mut state, self.config.generations)
    }
}

/// Runs `config` in `dir`, or in the configuration's `output_dir`.
pub fn run(config: &ExperimentConfig, dir: Option<&Path>) -> Result<Summary> {
    let dir = dir
        .map(Path::to_path_buf)
        .or_else(|| config.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("run"));
    Runner::new(config.clone(), dir)?.run()
}

/// Run directory a snapshot belongs to.
pub fn run_dir_of(snapshot: &Path) -> PathBuf {
    let parent = snapshot.parent().unwrap_or(Path::new(".")).to_path_buf();
    if parent.file_name().is_some_and(|n| n == "snapshots") {
        parent.parent().unwrap_or(Path::new(".")).to_path_buf()
    } else {
        parent
    }
}

/// Keeps the header and the rows of the first `generations` generations.
fn truncate_runlog(path: &Path, generations: usize) -> Result<()> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut kept = String::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if i > generations {
            break;
        }
        kept.push_str(&line);
        kept.push('\n');
    }
    fs::write(path, kept).map_err(|e| Error::io(path, e))
}

/// Continues a run from a snapshot for `generations` more generations.
///
/// When `expected` is given its hash must match the snapshot's. Zero extra
/// generations leave everything untouched and return `None`.
pub fn resume(snapshot_path: &Path, generations: usize, expected: Option<&ExperimentConfig>) -> Result<Option<Summary>> {
    let snapshot = Snapshot::load(snapshot_path)?;
    if let Some(config) = expected {
        if config.hash() != snapshot.config_hash {
            return Err(Error::SnapshotMismatch {
                path: snapshot_path.into(),
                reason: "configuration hash differs".into(),
            });
        }
    }
    if generations == 0 {
        return Ok(None);
    }
    let dir = run_dir_of(snapshot_path);
    let mut state = snapshot.state;
    let target = state.generation() + generations;
    let config = ExperimentConfig {
        generations: target,
        ..snapshot.config
    };
    let runner = Runner::new(config, &dir)?;
    let log = runner.runlog_path();
    if log.exists() {
        truncate_runlog(&log, state.generation())?;
    }
    runner.drive(&mut state, target).map(Some)
}

/// Outcome of one run of a batch.
#[derive(Clone, Debug)]
pub struct BatchRun {
    pub index: usize,
    pub seed: u64,
    pub outcome: std::result::Result<Summary, String>,
}

/// Runs `runs` copies of `config` with seeds `seed, seed + 1, ...` in
/// `dir/run_000`, `dir/run_001`, ..., then writes `batch.csv` (one row per
/// run) and `ae_summary.csv` (mean and standard deviation of each
/// parameter's error over the successful runs). A failing run is recorded
/// and the batch goes on.
pub fn batch(config: &ExperimentConfig, runs: usize, dir: &Path) -> Result<Vec<BatchRun>> {
    if runs == 0 {
        return Err(Error::Config("runs must be at least 1".into()));
    }
    config.validate()?;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let results: Vec<BatchRun> = (0..runs)
        .map(|i| {
            let seed = config.seed.wrapping_add(i as u64);
            let run_config = ExperimentConfig {
                seed,
                output_dir: None,
                ..config.clone()
            };
            let outcome = run(&run_config, Some(&dir.join(format!("run_{i:03}")))).map_err(|e| e.to_string());
            BatchRun { index: i, seed, outcome }
        })
        .collect();
    write_batch_tables(config, &results, dir)?;
    Ok(results)
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = if values.len() > 1 {
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var.sqrt())
}

fn write_batch_tables(config: &ExperimentConfig, results: &[BatchRun], dir: &Path) -> Result<()> {
    let genes = config.model_space().genome_len();
    let mut table = String::from("run,seed,status,best_fitness,mae,raw_mae");
    for i in 0..genes {
        table.push_str(&format!(",p{i}"));
    }
    table.push('\n');
    for r in results {
        match &r.outcome {
            Ok(s) => {
                let cells: Vec<String> = [
                    r.index.to_string(),
                    r.seed.to_string(),
                    "ok".into(),
                    s.best_model_fitness.map_or(String::new(), |f| f.to_string()),
                    s.mae.to_string(),
                    s.raw_mae.map_or(String::new(), |f| f.to_string()),
                ]
                .into_iter()
                .chain(s.best_model.values.iter().map(f64::to_string))
                .collect();
                table.push_str(&cells.join(","));
            }
            Err(_) => {
                table.push_str(&format!("{},{},failed,,,", r.index, r.seed));
                table.push_str(&",".repeat(genes));
            }
        }
        table.push('\n');
    }
    let path = dir.join("batch.csv");
    fs::write(&path, table).map_err(|e| Error::io(&path, e))?;

    let ok: Vec<&Summary> = results.iter().filter_map(|r| r.outcome.as_ref().ok()).collect();
    let mut ae = String::from("param,ae_mean,ae_std,raw_ae_mean,raw_ae_std\n");
    if let Some(first) = ok.first() {
        for p in 0..first.ae.len() {
            let (m, s) = mean_std(&ok.iter().map(|s| s.ae[p]).collect::<Vec<_>>());
            let raw: Option<Vec<f64>> = ok.iter().map(|s| s.raw_ae.as_ref().map(|a| a[p])).collect();
            let (rm, rs) = raw.map_or((String::new(), String::new()), |r| {
                let (a, b) = mean_std(&r);
                (a.to_string(), b.to_string())
            });
            ae.push_str(&format!("p{p},{m},{s},{rm},{rs}\n"));
        }
    }
    let path = dir.join("ae_summary.csv");
    fs::write(&path, ae).map_err(|e| Error::io(&path, e))
}

/// Larger groups and longer trials used to compare emergent behaviour,
/// keeping the initial density of the case study.
pub fn validation_world(config: &ExperimentConfig, robots: usize) -> Result<WorldConfig> {
    let base = config.world_config()?;
    Ok(if base.n_objects > 0 {
        let objects = 2 * robots;
        WorldConfig {
            n_agents: robots,
            n_replicas: 0,
            n_objects: objects,
            init_square_side: (objects as f64 * 1000.0).sqrt(),
            trial_duration: 400.0,
            ..base
        }
    } else {
        WorldConfig {
            n_agents: robots,
            n_replicas: 0,
            init_square_side: (robots as f64 * 10_000.0).sqrt(),
            trial_duration: 400.0,
            ..base
        }
    })
}

#[derive(Clone, Debug, Default)]
pub struct AnalyzeOptions {
    /// Settings per parameter of the classifier post-evaluation grid.
    pub grid: Option<usize>,
    pub dispersion: bool,
    pub occupancy: bool,
}

/// Trials per grid model in classifier post-evaluation.
pub const POST_EVALUATION_TRIALS: usize = 10;
/// Group size and trial count of the emergent-behaviour comparison.
pub const VALIDATION_ROBOTS: usize = 20;
pub const VALIDATION_TRIALS: usize = 30;

fn write_csv(path: &Path, header: &str, rows: impl IntoIterator<Item = String>) -> Result<()> {
    let mut text = format!("{header}\n");
    for row in rows {
        text.push_str(&row);
        text.push('\n');
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Post-hoc analysis of a finished run, read through its run log's
/// directory. Writes CSV tables under `analysis/` and returns their paths.
pub fn analyze(runlog: &Path, options: &AnalyzeOptions) -> Result<Vec<PathBuf>> {
    let dir = runlog.parent().unwrap_or(Path::new(".")).to_path_buf();
    if !runlog.exists() {
        return Err(Error::io(runlog, std::io::Error::from(std::io::ErrorKind::NotFound)));
    }
    let snapshot = Snapshot::load(&dir.join("final.json"))?;
    let config = &snapshot.config;
    let out = dir.join("analysis");
    fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;
    let mut written = Vec::new();

    let summary = summarize(config, &snapshot.state)?;
    let path = out.join("param_ae.csv");
    write_csv(&path, "param,ae", summary.ae.iter().enumerate().map(|(i, e)| format!("p{i},{e}")))?;
    written.push(path);

    let space = config.model_space();
    let model = space.decode(&snapshot.state.models().best().genome)?;
    let agent = config.agent()?;

    if let Some(settings) = options.grid {
        let EngineState::TuringLearning(state) = &snapshot.state else {
            return Err(Error::Config("classifier post-evaluation needs a Turing Learning run".into()));
        };
        let ModelSpace::Reactive { sensor_states } = space else {
            return Err(Error::Config("classifier post-evaluation needs reactive models".into()));
        };
        let grid: Vec<Controller> = parameter_grid(settings, sensor_states)
            .into_iter()
            .map(Controller::Reactive)
            .collect();
        let classifiers: Vec<ElmanNet> = state
            .classifiers
            .members
            .iter()
            .map(|m| ElmanNet::classifier(m.genome.clone()))
            .collect::<Result<_>>()?;
        let setup = config.setup()?;
        let eval = PostEvaluation {
            world: setup.world,
            agent: agent.clone(),
            scaling: setup.scaling,
            seed: config.seed,
            trials: POST_EVALUATION_TRIALS,
        };
        let accuracy = post_evaluate_classifiers(&classifiers, &grid, &eval)?;
        let path = out.join("classifier_accuracy.csv");
        write_csv(
            &path,
            "classifier,accuracy",
            accuracy.iter().enumerate().map(|(i, a)| format!("{i},{}", a.accuracy())),
        )?;
        written.push(path);
    }

    if options.dispersion {
        let world = validation_world(config, VALIDATION_ROBOTS)?;
        for (name, controller) in [("agents", &agent), ("models", &model)] {
            let series = swarm_series(&world, controller, config.seed, 10)?;
            let path = out.join(format!("dispersion_{name}.csv"));
            write_csv(
                &path,
                "t,dispersion,cluster_fraction",
                series
                    .iter()
                    .map(|s| format!("{},{},{}", s.time, s.dispersion, s.largest_cluster_fraction)),
            )?;
            written.push(path);
        }
        let a = final_dispersions(&world, &agent, VALIDATION_TRIALS, config.seed)?;
        let m = final_dispersions(&world, &model, VALIDATION_TRIALS, config.seed)?;
        let MannWhitney { u, z, p_value } = mann_whitney_u(&a, &m);
        let path = out.join("final_dispersion.csv");
        write_csv(
            &path,
            "trial,agents,models",
            a.iter().zip(&m).enumerate().map(|(t, (x, y))| format!("{t},{x},{y}")),
        )?;
        written.push(path);
        let path = out.join("mann_whitney.csv");
        write_csv(&path, "statistic,value", [format!("u,{u}"), format!("z,{z}"), format!("p_value,{p_value}")])?;
        written.push(path);
    }

    if options.occupancy {
        let world = config.world_config()?;
        let a = sensor_occupancy(&world, &agent, 100, config.seed)?;
        let m = sensor_occupancy(&world, &model, 100, config.seed)?;
        let path = out.join("occupancy.csv");
        write_csv(
            &path,
            "state,agent_fraction,model_fraction",
            a.iter().zip(&m).enumerate().map(|(s, (x, y))| format!("{s},{x},{y}")),
        )?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny(engine: &str) -> ExperimentConfig {
        ExperimentConfig::parse(&format!(
            r#"
case_study = "aggregation"
engine = "{engine}"
generations = 4
seed = 3
snapshot_every = 2

[populations]
model_mu = 2
model_lambda = 2
classifier_mu = 2
classifier_lambda = 2

[world]
trial_duration = 2.0
"#
        ))
        .unwrap()
    }

    #[test]
    fn run_writes_all_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        let summary = run(&tiny("turing_learning"), Some(dir.path())).unwrap();
        assert_eq!(summary.generations, 4);
        assert_eq!(summary.ae.len(), 4);
        let log = fs::read_to_string(dir.path().join("runlog.csv")).unwrap();
        let lines: Vec<&str> = log.lines().collect();
        assert_eq!(lines[0], "gen,best_rm,best_rc,p0,p1,p2,p3");
        assert_eq!(lines.len(), 5);
        assert!(lines.iter().all(|l| l.split(',').count() == 7));
        for g in [2, 4] {
            assert!(dir.path().join(format!("snapshots/gen_{g:05}.json")).exists());
        }
        assert!(dir.path().join("final.json").exists());
        assert!(dir.path().join("summary.json").exists());
    }

    #[test]
    fn metric_runlog_header() {
        assert_eq!(runlog_header(&tiny("metric_baseline")), "gen,fitness,p0,p1,p2,p3");
    }

    #[test]
    fn resume_matches_uninterrupted_run() {
        let whole = tempfile::tempdir().unwrap();
        run(&tiny("turing_learning"), Some(whole.path())).unwrap();
        let split = tempfile::tempdir().unwrap();
        let half = ExperimentConfig {
            generations: 2,
            ..tiny("turing_learning")
        };
        run(&half, Some(split.path())).unwrap();
        resume(&split.path().join("snapshots/gen_00002.json"), 2, None).unwrap();
        let a = fs::read_to_string(whole.path().join("runlog.csv")).unwrap();
        let b = fs::read_to_string(split.path().join("runlog.csv")).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn truncation_keeps_header_and_prefix() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("log.csv");
        fs::write(&path, "h\n0\n1\n2\n").unwrap();
        truncate_runlog(&path, 2).unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "h\n0\n1\n");
    }

    #[test]
    fn batch_statistics() {
        assert_eq!(mean_std(&[2.0]), (2.0, 0.0));
        let (m, s) = mean_std(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn validation_worlds_keep_density() {
        let w = validation_world(&tiny("turing_learning"), 50).unwrap();
        assert!((w.init_square_side - (500_000f64).sqrt()).abs() < 1e-9);
        assert_eq!((w.n_agents, w.n_replicas, w.trial_duration), (50, 0, 400.0));
    }
}
