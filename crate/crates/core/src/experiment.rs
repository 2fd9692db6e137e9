//! Paired Monte Carlo comparison of GRGA against the baseline GA.
//!
//! Run `i` of every algorithm uses seed `base_seed + i`. Outputs under the
//! output directory:
//!
//! - `runs/<algo>_<i>.csv`: `run_id,algo,generation,best_fitness,avg_fitness`
//! - `runs/<algo>_<i>.json`: seed, configuration, termination, best chromosome
//! - `runs/grga_<i>_rggr.json`: final graph snapshot
//! - `aggregate.csv`: per-generation mean and standard deviation
//! - `summary.json`: the [`ComparisonSummary`]
//!
//! Runs of different lengths are not padded: generation `g` aggregates only
//! the runs that reached it, and the count is reported.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::benchmarks::{shubert_fitness, BenchmarkError, DiscretizedBox};
use crate::featsel::{self, FeatSelError, FeatSelFitness};
use crate::ga::{evolve, FitnessFunction, GaConfig, GaError, Mode, RunRecord, Termination};
use crate::report::{parse_finite, read_strict_csv, ReportError};
use crate::rggr::{Chromosome, GeneSpace, StrengthParams, UpdateParams};

pub const RUN_HEADER: &str = "run_id,algo,generation,best_fitness,avg_fitness";
pub const AGGREGATE_HEADER: &str = "algo,generation,runs,mean_best,std_best,mean_avg,std_avg";

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{algo} run {run} failed: {source}")]
    Run {
        algo: &'static str,
        run: usize,
        #[source]
        source: GaError,
    },
    #[error(transparent)]
    Report(#[from] ReportError),
    #[error("verification failed: {0}")]
    Verify(String),
}

impl From<FeatSelError> for ExperimentError {
    fn from(e: FeatSelError) -> Self {
        match e {
            FeatSelError::Io { path, source } => ExperimentError::Io { path, source },
            other => ExperimentError::Config(other.to_string()),
        }
    }
}

impl From<BenchmarkError> for ExperimentError {
    fn from(e: BenchmarkError) -> Self {
        ExperimentError::Config(e.to_string())
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ExperimentError + '_ {
    move |source| ExperimentError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Problem {
    Shubert {
        #[serde(default = "DiscretizedBox::shubert_default")]
        bounds: DiscretizedBox<f64>,
    },
    FeatSel {
        dataset_path: PathBuf,
        #[serde(default = "default_label")]
        label: String,
        #[serde(default = "default_penalty")]
        penalty: f64,
        #[serde(default = "default_folds")]
        folds: usize,
    },
    /// Fitness supplied by the caller through [`run_experiment_with`].
    Custom,
}

fn default_label() -> String {
    "label".into()
}
fn default_penalty() -> f64 {
    featsel::DEFAULT_PENALTY
}
fn default_folds() -> usize {
    featsel::DEFAULT_FOLDS
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeSelection {
    Grga,
    Baseline,
    #[default]
    Both,
}

impl ModeSelection {
    pub fn modes(self) -> Vec<Mode> {
        match self {
            ModeSelection::Grga => vec![Mode::Grga],
            ModeSelection::Baseline => vec![Mode::BaselineGa],
            ModeSelection::Both => vec![Mode::Grga, Mode::BaselineGa],
        }
    }
}

/// Everything needed to reproduce an experiment. `ga.seed` and `ga.mode`
/// are overwritten per run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub problem: Problem,
    #[serde(default)]
    pub ga: GaConfig,
    #[serde(default)]
    pub update: UpdateParams<f64>,
    #[serde(default)]
    pub strength: StrengthParams<f64>,
    #[serde(default = "default_mc_runs")]
    pub mc_runs: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub modes: ModeSelection,
    /// Worker threads; `None` uses every core.
    #[serde(default)]
    pub jobs: Option<usize>,
    /// The source configuration's "scaling factor". Carried through for the
    /// record only; no operator reads it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scaling_factor: Option<f64>,
}

fn default_mc_runs() -> usize {
    100
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

impl ExperimentConfig {
    /// The Shubert comparison: population 200, mutation rate 0.05, 30
    /// generations, 100 paired runs. Stall termination is disabled by
    /// setting it to the generation cap.
    pub fn shubert_default(output_dir: impl Into<PathBuf>) -> Self {
        Self {
            problem: Problem::Shubert {
                bounds: DiscretizedBox::shubert_default(),
            },
            ga: GaConfig {
                stall_generations: 30,
                ..GaConfig::default()
            },
            update: UpdateParams::default(),
            strength: StrengthParams::default(),
            mc_runs: 100,
            base_seed: 0,
            output_dir: output_dir.into(),
            modes: ModeSelection::Both,
            jobs: None,
            scaling_factor: Some(0.3),
        }
    }

    /// Feature selection with stall termination after 10 unchanged generations.
    pub fn featsel_default(dataset_path: impl Into<PathBuf>, output_dir: impl Into<PathBuf>) -> Self {
        Self {
            problem: Problem::FeatSel {
                dataset_path: dataset_path.into(),
                label: default_label(),
                penalty: default_penalty(),
                folds: default_folds(),
            },
            ga: GaConfig {
                population_size: 30,
                max_generations: 200,
                ..GaConfig::default()
            },
            mc_runs: 30,
            scaling_factor: None,
            ..Self::shubert_default(output_dir)
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let cfg = |e: &dyn std::fmt::Display| ExperimentError::Config(e.to_string());
        self.ga.validate().map_err(|e| cfg(&e))?;
        self.update.validate().map_err(|e| cfg(&e))?;
        self.strength.validate().map_err(|e| cfg(&e))?;
        if self.mc_runs < 1 {
            return Err(ExperimentError::Config("mc_runs must be at least 1".into()));
        }
        if self.jobs == Some(0) {
            return Err(ExperimentError::Config("jobs must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub generation: usize,
    pub runs: usize,
    pub mean_best: f64,
    pub std_best: f64,
    pub mean_avg: f64,
    pub std_avg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgoSummary {
    pub algo: String,
    pub runs: usize,
    pub generations: Vec<GenerationStats>,
    /// Mean index of the last generation, i.e. generations to termination.
    pub mean_final_generation: f64,
    pub mean_final_best: f64,
    pub stall_terminations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonSummary {
    pub algorithms: Vec<AlgoSummary>,
    /// Share of paired seeds where GRGA's final best beats the baseline's;
    /// ties count one half.
    pub grga_win_rate: Option<f64>,
    /// First generation where GRGA's mean average fitness exceeds the baseline's.
    pub first_overtake_generation: Option<usize>,
    /// First generation from which GRGA stays ahead through the last shared generation.
    pub sustained_overtake_generation: Option<usize>,
}

impl ComparisonSummary {
    pub fn algo(&self, mode: Mode) -> Option<&AlgoSummary> {
        self.algorithms.iter().find(|a| a.algo == mode.label())
    }
}

#[derive(Serialize)]
struct RunSidecar<'a> {
    run_id: usize,
    algo: &'static str,
    seed: u64,
    config: &'a GaConfig,
    update: &'a UpdateParams<f64>,
    strength: &'a StrengthParams<f64>,
    termination: Termination,
    final_generation: usize,
    best_fitness: f64,
    best_chromosome: &'a Chromosome,
    #[serde(skip_serializing_if = "Option::is_none")]
    selected_features: Option<Vec<String>>,
}

/// Builds the fitness for `config.problem` and runs the experiment.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ComparisonSummary, ExperimentError> {
    config.validate()?;
    match &config.problem {
        Problem::Shubert { bounds } => {
            let space = bounds.gene_space()?;
            let fitness = shubert_fitness(bounds.clone(), &space)?;
            run_experiment_with(config, &space, &fitness, None)
        }
        Problem::FeatSel {
            dataset_path,
            label,
            penalty,
            folds,
        } => {
            let data = featsel::load_dataset(dataset_path, label)?;
            let space = data.gene_space()?;
            let names = data.feature_names.clone();
            let fitness = FeatSelFitness::new(data, *penalty, *folds)?;
            let describe = move |c: &Chromosome| {
                featsel::selected_features(c.genes())
                    .into_iter()
                    .map(|i| names[i].clone())
                    .collect::<Vec<_>>()
            };
            run_experiment_with(config, &space, &fitness, Some(&describe))
        }
        Problem::Custom => Err(ExperimentError::Config(
            "custom problems must be run through run_experiment_with".into(),
        )),
    }
}

type FeatureNamer<'a> = &'a (dyn Fn(&Chromosome) -> Vec<String> + Sync);

/// Runs every selected algorithm `mc_runs` times on `fitness` and writes
/// all outputs. Output is identical for identical configurations,
/// regardless of `jobs`.
pub fn run_experiment_with<F>(
    config: &ExperimentConfig,
    space: &GeneSpace,
    fitness: &F,
    describe: Option<FeatureNamer<'_>>,
) -> Result<ComparisonSummary, ExperimentError>
where
    F: FitnessFunction<f64> + ?Sized,
{
    config.validate()?;
    let runs_dir = config.output_dir.join("runs");
    fs::create_dir_all(&runs_dir).map_err(io_err(&runs_dir))?;

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = config.jobs {
        pool = pool.num_threads(jobs);
    }
    let pool = pool.build().map_err(|e| ExperimentError::Config(e.to_string()))?;

    let modes = config.modes.modes();
    let mut records: Vec<(Mode, Vec<RunRecord<f64>>)> = Vec::new();
    for &mode in &modes {
        let recs = pool.install(|| {
            (0..config.mc_runs)
                .into_par_iter()
                .map(|i| {
                    let ga = run_config(config, mode, i);
                    evolve(&ga, space, fitness, &config.update, &config.strength).map_err(|source| {
                        ExperimentError::Run {
                            algo: mode.label(),
                            run: i,
                            source,
                        }
                    })
                })
                .collect::<Result<Vec<_>, _>>()
        })?;
        records.push((mode, recs));
    }

    for (mode, recs) in &records {
        for (i, rec) in recs.iter().enumerate() {
            write_run(config, &runs_dir, *mode, i, rec, describe)?;
        }
    }

    let aggregate: Vec<(Mode, Vec<GenerationStats>)> = records
        .iter()
        .map(|(mode, recs)| {
            let traces: Vec<Vec<(f64, f64)>> = recs
                .iter()
                .map(|r| r.rows.iter().map(|row| (row.best_fitness, row.avg_fitness)).collect())
                .collect();
            (*mode, aggregate_traces(&traces))
        })
        .collect();
    let agg_path = config.output_dir.join("aggregate.csv");
    fs::write(&agg_path, aggregate_csv(&aggregate)).map_err(io_err(&agg_path))?;

    let summary = summarize(&records, aggregate);
    let summary_path = config.output_dir.join("summary.json");
    let json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    fs::write(&summary_path, json + "\n").map_err(io_err(&summary_path))?;
    Ok(summary)
}

fn run_config(config: &ExperimentConfig, mode: Mode, run: usize) -> GaConfig {
    GaConfig {
        seed: config.base_seed.wrapping_add(run as u64),
        mode,
        ..config.ga.clone()
    }
}

pub fn run_file_stem(mode: Mode, run: usize) -> String {
    format!("{}_{run:04}", mode.label())
}

fn write_run(
    config: &ExperimentConfig,
    dir: &Path,
    mode: Mode,
    run: usize,
    rec: &RunRecord<f64>,
    describe: Option<FeatureNamer<'_>>,
) -> Result<(), ExperimentError> {
    let stem = run_file_stem(mode, run);
    let mut csv = String::from(RUN_HEADER);
    csv.push('\n');
    for row in &rec.rows {
        writeln!(
            csv,
            "{run},{},{},{},{}",
            mode.label(),
            row.generation,
            row.best_fitness,
            row.avg_fitness
        )
        .unwrap();
    }
    let path = dir.join(format!("{stem}.csv"));
    fs::write(&path, csv).map_err(io_err(&path))?;

    let ga = run_config(config, mode, run);
    let sidecar = RunSidecar {
        run_id: run,
        algo: mode.label(),
        seed: ga.seed,
        config: &ga,
        update: &config.update,
        strength: &config.strength,
        termination: rec.termination,
        final_generation: rec.final_generation(),
        best_fitness: rec.best_fitness,
        best_chromosome: &rec.best_chromosome,
        selected_features: describe.map(|d| d(&rec.best_chromosome)),
    };
    let path = dir.join(format!("{stem}.json"));
    let json = serde_json::to_string_pretty(&sidecar).expect("sidecar serializes");
    fs::write(&path, json + "\n").map_err(io_err(&path))?;

    if let Some(g) = &rec.rggr {
        let path = dir.join(format!("{stem}_rggr.json"));
        fs::write(&path, g.to_json()).map_err(io_err(&path))?;
    }
    Ok(())
}

/// Per-generation statistics over `(best, avg)` traces of varying length.
/// Standard deviations use the `n - 1` denominator and are 0 for one run.
pub fn aggregate_traces(traces: &[Vec<(f64, f64)>]) -> Vec<GenerationStats> {
    let longest = traces.iter().map(Vec::len).max().unwrap_or(0);
    (0..longest)
        .map(|g| {
            let best: Vec<f64> = traces.iter().filter_map(|t| t.get(g).map(|r| r.0)).collect();
            let avg: Vec<f64> = traces.iter().filter_map(|t| t.get(g).map(|r| r.1)).collect();
            let (mean_best, std_best) = mean_std(&best);
            let (mean_avg, std_avg) = mean_std(&avg);
            GenerationStats {
                generation: g,
                runs: best.len(),
                mean_best,
                std_best,
                mean_avg,
                std_avg,
            }
        })
        .collect()
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn aggregate_csv(aggregate: &[(Mode, Vec<GenerationStats>)]) -> String {
    let mut out = String::from(AGGREGATE_HEADER);
    out.push('\n');
    for (mode, stats) in aggregate {
        for s in stats {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                mode.label(),
                s.generation,
                s.runs,
                s.mean_best,
                s.std_best,
                s.mean_avg,
                s.std_avg
            )
            .unwrap();
        }
    }
    out
}

fn summarize(
    records: &[(Mode, Vec<RunRecord<f64>>)],
    aggregate: Vec<(Mode, Vec<GenerationStats>)>,
) -> ComparisonSummary {
    let algorithms: Vec<AlgoSummary> = records
        .iter()
        .zip(aggregate)
        .map(|((mode, recs), (_, generations))| {
            let n = recs.len() as f64;
            AlgoSummary {
                algo: mode.label().to_string(),
                runs: recs.len(),
                generations,
                mean_final_generation: recs.iter().map(|r| r.final_generation() as f64).sum::<f64>() / n,
                mean_final_best: recs.iter().map(|r| r.best_fitness).sum::<f64>() / n,
                stall_terminations: recs.iter().filter(|r| r.termination == Termination::Stall).count(),
            }
        })
        .collect();

    let find = |m: Mode| records.iter().find(|(mode, _)| *mode == m).map(|(_, r)| r);
    let (mut win_rate, mut first, mut sustained) = (None, None, None);
    if let (Some(grga), Some(base)) = (find(Mode::Grga), find(Mode::BaselineGa)) {
        let score: f64 = grga
            .iter()
            .zip(base)
            .map(|(a, b)| match a.best_fitness.partial_cmp(&b.best_fitness) {
                Some(std::cmp::Ordering::Greater) => 1.0,
                Some(std::cmp::Ordering::Equal) => 0.5,
                _ => 0.0,
            })
            .sum();
        win_rate = Some(score / grga.len() as f64);

        let g_stats = &algorithms[0].generations;
        let b_stats = &algorithms[1].generations;
        let ahead: Vec<bool> = g_stats
            .iter()
            .zip(b_stats)
            .map(|(g, b)| g.mean_avg > b.mean_avg)
            .collect();
        first = ahead.iter().position(|&a| a);
        sustained = match ahead.iter().rposition(|&a| !a) {
            None if !ahead.is_empty() => Some(0),
            Some(last_behind) if last_behind + 1 < ahead.len() => Some(last_behind + 1),
            _ => None,
        };
    }
    ComparisonSummary {
        algorithms,
        grga_win_rate: win_rate,
        first_overtake_generation: first,
        sustained_overtake_generation: sustained,
    }
}

/// Outcome of [`verify_aggregate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub runs: usize,
    pub rows: usize,
}

/// Recomputes `aggregate.csv` from the per-run CSVs in `dir/runs` and checks
/// every value to a relative tolerance of 1e-9.
pub fn verify_aggregate(dir: &Path) -> Result<VerifyReport, ExperimentError> {
    let runs_dir = dir.join("runs");
    let mut files: Vec<PathBuf> = fs::read_dir(&runs_dir)
        .map_err(io_err(&runs_dir))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .collect();
    files.sort();

    let mut traces: BTreeMap<String, Vec<Vec<(f64, f64)>>> = BTreeMap::new();
    for path in &files {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        let rows = read_strict_csv(&text, RUN_HEADER)?;
        let mut trace = Vec::with_capacity(rows.len());
        let mut algo = None;
        for (i, r) in rows.iter().enumerate() {
            let line = i + 2;
            if r[2].parse::<usize>().ok() != Some(i) {
                return Err(ExperimentError::Verify(format!(
                    "{}: generation column not contiguous at line {line}",
                    path.display()
                )));
            }
            algo.get_or_insert_with(|| r[1].clone());
            trace.push((parse_finite(&r[3], line)?, parse_finite(&r[4], line)?));
        }
        let algo = algo.ok_or_else(|| ExperimentError::Verify(format!("{} has no rows", path.display())))?;
        traces.entry(algo).or_default().push(trace);
    }

    let agg_path = dir.join("aggregate.csv");
    let text = fs::read_to_string(&agg_path).map_err(io_err(&agg_path))?;
    let stored = read_strict_csv(&text, AGGREGATE_HEADER)?;
    let mut expected = Vec::new();
    for mode in [Mode::Grga, Mode::BaselineGa] {
        if let Some(t) = traces.get(mode.label()) {
            for s in aggregate_traces(t) {
                expected.push((mode.label(), s));
            }
        }
    }
    if stored.len() != expected.len() {
        return Err(ExperimentError::Verify(format!(
            "aggregate has {} rows, recomputation gives {}",
            stored.len(),
            expected.len()
        )));
    }
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0);
    for (i, (row, (algo, s))) in stored.iter().zip(&expected).enumerate() {
        let line = i + 2;
        let values = [s.mean_best, s.std_best, s.mean_avg, s.std_avg];
        let same_keys = row[0] == *algo
            && row[1].parse::<usize>().ok() == Some(s.generation)
            && row[2].parse::<usize>().ok() == Some(s.runs);
        let mut same_values = true;
        for (field, want) in row[3..].iter().zip(values) {
            same_values &= close(parse_finite(field, line)?, want);
        }
        if !(same_keys && same_values) {
            return Err(ExperimentError::Verify(format!(
                "aggregate line {line} disagrees with run files"
            )));
        }
    }
    Ok(VerifyReport {
        runs: files.len(),
        rows: stored.len(),
    })
}
