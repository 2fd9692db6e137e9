//! Command-line front end for running and reporting GRGA experiments.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use grga::benchmarks::DiscretizedBox;
use grga::experiment::{self, ComparisonSummary, ExperimentConfig, ExperimentError, ModeSelection, Problem};
use grga::report;
use grga::Rggr64;

#[derive(Parser)]
#[command(name = "grga", version, about = "Gene-regulatory genetic algorithm experiments")]
struct Cli {
    #[command(flatten)]
    overrides: Overrides,
    #[command(subcommand)]
    command: Command,
}

/// Flags that override values from `--config`.
#[derive(Args, Default)]
struct Overrides {
    /// JSON experiment configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Base seed; run i uses seed + i.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Population size.
    #[arg(long, global = true)]
    pop: Option<usize>,
    /// Generation cap.
    #[arg(long, global = true)]
    generations: Option<usize>,
    /// Per-child mutation probability.
    #[arg(long = "mutation-rate", global = true)]
    mutation_rate: Option<f64>,
    /// Paired runs per algorithm.
    #[arg(long = "mc-runs", global = true)]
    mc_runs: Option<usize>,
    /// Worker threads for independent runs.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Algorithms to run.
    #[arg(long, value_enum, global = true)]
    mode: Option<ModeArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Grga,
    Baseline,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Benchmark runs.
    #[command(subcommand)]
    Bench(BenchCommand),
    /// Feature selection on a CSV dataset.
    Featsel {
        /// CSV with a header row.
        #[arg(long)]
        data: Option<PathBuf>,
        /// Name of the label column.
        #[arg(long)]
        label: Option<String>,
        /// Fitness penalty per selected feature.
        #[arg(long)]
        penalty: Option<f64>,
    },
    /// Plot-ready CSVs from a graph snapshot.
    #[command(subcommand)]
    Report(ReportCommand),
    /// Consistency checks on experiment outputs.
    #[command(subcommand)]
    Verify(VerifyCommand),
}

#[derive(Subcommand)]
enum BenchCommand {
    /// Paired GRGA / baseline runs on the 3-D Shubert function.
    Shubert,
}

#[derive(Subcommand)]
enum ReportCommand {
    /// Top-k weights per column.
    Heatmap {
        /// Graph snapshot JSON.
        snapshot: PathBuf,
        #[arg(long, default_value_t = 5)]
        k: usize,
        /// Decode node indices with the Shubert box.
        #[arg(long)]
        shubert: bool,
        /// Write here instead of stdout.
        #[arg(long = "csv")]
        csv: Option<PathBuf>,
    },
    /// Shubert values along x3 for the heaviest (x1, x2) edges.
    Slice {
        snapshot: PathBuf,
        #[arg(long = "top-pairs", default_value_t = 3)]
        top_pairs: usize,
        #[arg(long = "csv")]
        csv: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum VerifyCommand {
    /// Recompute aggregate.csv from the per-run CSVs.
    Aggregate {
        /// Experiment output directory; defaults to --out.
        dir: Option<PathBuf>,
    },
}

/// Exit codes by failure category.
mod exit {
    pub const CONFIG: u8 = 2;
    pub const IO: u8 = 3;
    pub const RUN: u8 = 4;
    pub const DATA: u8 = 5;
}

struct Failure {
    code: u8,
    message: String,
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        let code = match e {
            ExperimentError::Config(_) => exit::CONFIG,
            ExperimentError::Io { .. } => exit::IO,
            ExperimentError::Run { .. } => exit::RUN,
            ExperimentError::Report(_) | ExperimentError::Verify(_) => exit::DATA,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let o = &cli.overrides;
    match cli.command {
        Command::Bench(BenchCommand::Shubert) => {
            let mut config = load_config(o, || ExperimentConfig::shubert_default("out"))?;
            if !matches!(config.problem, Problem::Shubert { .. }) {
                return Err(fail(exit::CONFIG, "configuration problem is not shubert"));
            }
            apply(o, &mut config);
            let summary = experiment::run_experiment(&config)?;
            if let Problem::Shubert { bounds } = &config.problem {
                let oracle = grga::benchmarks::grid_oracle(bounds, grga::benchmarks::shubert::<f64>)
                    .map_err(|e| fail(exit::CONFIG, e.to_string()))?;
                let path = config.output_dir.join("oracle.json");
                let json = serde_json::to_string_pretty(&oracle.summary(&[0.9, 0.99, 0.999])).expect("serializes");
                write(&path, json + "\n")?;
            }
            print_summary(&config, &summary);
        }
        Command::Featsel { data, label, penalty } => {
            let mut config = load_config(o, || ExperimentConfig::featsel_default(PathBuf::new(), "out"))?;
            match &mut config.problem {
                Problem::FeatSel {
                    dataset_path,
                    label: l,
                    penalty: p,
                    ..
                } => {
                    if let Some(d) = data {
                        *dataset_path = d;
                    }
                    if let Some(x) = label {
                        *l = x;
                    }
                    if let Some(x) = penalty {
                        *p = x;
                    }
                    if dataset_path.as_os_str().is_empty() {
                        return Err(fail(exit::CONFIG, "featsel needs --data or a config with dataset_path"));
                    }
                }
                _ => return Err(fail(exit::CONFIG, "configuration problem is not feat_sel")),
            }
            apply(o, &mut config);
            let summary = experiment::run_experiment(&config)?;
            print_summary(&config, &summary);
        }
        Command::Report(ReportCommand::Heatmap {
            snapshot,
            k,
            shubert,
            csv,
        }) => {
            let g = load_snapshot(&snapshot)?;
            let bounds = shubert.then(|| bounds_from(o)).transpose()?;
            let text = report::emit_heatmap(&g, k, bounds.as_ref()).map_err(|e| fail(exit::DATA, e.to_string()))?;
            emit(csv.as_deref(), text)?;
        }
        Command::Report(ReportCommand::Slice {
            snapshot,
            top_pairs,
            csv,
        }) => {
            let g = load_snapshot(&snapshot)?;
            let bounds = bounds_from(o)?;
            let text = report::emit_fixed_slice(&g, &bounds, top_pairs).map_err(|e| fail(exit::DATA, e.to_string()))?;
            emit(csv.as_deref(), text)?;
        }
        Command::Verify(VerifyCommand::Aggregate { dir }) => {
            let dir = dir
                .or_else(|| o.out.clone())
                .ok_or_else(|| fail(exit::CONFIG, "give the output directory or --out"))?;
            let r = experiment::verify_aggregate(&dir)?;
            println!("aggregate consistent: {} run files, {} rows", r.runs, r.rows);
        }
    }
    Ok(())
}

fn load_config(o: &Overrides, default: impl FnOnce() -> ExperimentConfig) -> Result<ExperimentConfig, Failure> {
    match &o.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| fail(exit::IO, format!("{}: {e}", path.display())))?;
            serde_json::from_str(&text).map_err(|e| fail(exit::CONFIG, format!("{}: {e}", path.display())))
        }
        None => Ok(default()),
    }
}

fn apply(o: &Overrides, c: &mut ExperimentConfig) {
    if let Some(v) = o.seed {
        c.base_seed = v;
    }
    if let Some(v) = o.pop {
        c.ga.population_size = v;
    }
    if let Some(v) = o.generations {
        c.ga.max_generations = v;
    }
    if let Some(v) = o.mutation_rate {
        c.ga.mutation_rate = v;
    }
    if let Some(v) = o.mc_runs {
        c.mc_runs = v;
    }
    if let Some(v) = o.jobs {
        c.jobs = Some(v);
    }
    if let Some(v) = &o.out {
        c.output_dir = v.clone();
    }
    if let Some(m) = o.mode {
        c.modes = match m {
            ModeArg::Grga => ModeSelection::Grga,
            ModeArg::Baseline => ModeSelection::Baseline,
            ModeArg::Both => ModeSelection::Both,
        };
    }
}

/// Shubert box from `--config` when it holds one, else the default box.
fn bounds_from(o: &Overrides) -> Result<DiscretizedBox<f64>, Failure> {
    let config = load_config(o, || ExperimentConfig::shubert_default("out"))?;
    Ok(match config.problem {
        Problem::Shubert { bounds } => bounds,
        _ => DiscretizedBox::shubert_default(),
    })
}

fn load_snapshot(path: &Path) -> Result<Rggr64, Failure> {
    let text = fs::read_to_string(path).map_err(|e| fail(exit::IO, format!("{}: {e}", path.display())))?;
    Rggr64::from_json(&text).map_err(|e| fail(exit::DATA, format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: String) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| fail(exit::IO, format!("{}: {e}", path.display())))
}

fn emit(path: Option<&Path>, text: String) -> Result<(), Failure> {
    match path {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn print_summary(config: &ExperimentConfig, s: &ComparisonSummary) {
    for a in &s.algorithms {
        let last = a.generations.last().expect("at least one generation");
        println!(
            "{:<9} runs={} mean_final_best={:.6} mean_generations={:.2} stalls={} final_mean_avg={:.6}",
            a.algo, a.runs, a.mean_final_best, a.mean_final_generation, a.stall_terminations, last.mean_avg
        );
    }
    if let Some(w) = s.grga_win_rate {
        println!("grga win rate: {w:.3}");
    }
    if let Some(g) = s.first_overtake_generation {
        println!("grga mean average fitness first ahead at generation {g}");
    }
    if let Some(g) = s.sustained_overtake_generation {
        println!("grga mean average fitness ahead from generation {g} on");
    }
    println!("outputs written to {}", config.output_dir.display());
}
