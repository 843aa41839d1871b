use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qselect_core::circuit::example_dataset;
use qselect_core::compiler::Clock;
use qselect_core::dataset::{save_dataset, DatasetError};
use qselect_core::metrics::ObjectiveWeights;
use qselect_core::orchestrator::{self, AdjustOptions, OrchestratorError, ReportError, SearchMode};

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_DATASET: u8 = 3;
const EXIT_BACKEND: u8 = 4;
const EXIT_CONFLICT: u8 = 5;

#[derive(Parser)]
#[command(name = "qselect", version, about = "Dataset-level quantum strategy selection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Create a dataset directory.
    #[command(subcommand)]
    Dataset(DatasetCommand),
    /// Select a strategy for every circuit of a dataset on one backend.
    Adjust {
        dataset: PathBuf,
        #[arg(long)]
        backend: String,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        overwrite: bool,
    },
    /// Run the adjustment against several backends into one JSON document.
    Matrix {
        dataset: PathBuf,
        #[arg(long = "backend", required = true)]
        backends: Vec<String>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Render a matrix document as Markdown (and optionally HTML).
    Report {
        matrix: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        html: bool,
    },
}

#[derive(Subcommand)]
enum DatasetCommand {
    /// The built-in Bell, GHZ-3 and QFT-4 circuits.
    Examples {
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        overwrite: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Search {
    Grid,
    Bandit,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_enum, default_value = "grid")]
    search: Search,
    /// Restrict selection to the (depth, 2q, err) Pareto front.
    #[arg(long)]
    pareto: bool,
    #[arg(long, default_value_t = 24)]
    max_candidates: usize,
    /// JSON object overriding objective weights, e.g. '{"time":0}'.
    #[arg(long)]
    weights: Option<String>,
    /// Simulate the compiled circuits and record count metrics.
    #[arg(long)]
    execute: bool,
    #[arg(long, requires = "execute")]
    shots: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Skip gate and readout noise when executing.
    #[arg(long, requires = "execute")]
    noiseless: bool,
    /// Report this many seconds as every compile time, for byte-reproducible runs.
    #[arg(long, value_name = "SECONDS")]
    fixed_compile_time: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    bandit_alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    bandit_sigma: f64,
}

impl RunArgs {
    fn options(&self) -> Result<AdjustOptions, Failure> {
        let weights = match &self.weights {
            Some(w) => ObjectiveWeights::from_json_overrides(w).map_err(|e| Failure::usage(format!("--weights: {e}")))?,
            None => ObjectiveWeights::default(),
        };
        let clock = match self.fixed_compile_time {
            Some(t) if t.is_finite() && t >= 0.0 => Clock::Fixed(t),
            Some(t) => return Err(Failure::usage(format!("--fixed-compile-time must be finite and >= 0, got {t}"))),
            None => Clock::Monotonic,
        };
        Ok(AdjustOptions {
            search: match self.search {
                Search::Grid => SearchMode::Grid,
                Search::Bandit => SearchMode::Bandit,
            },
            pareto: self.pareto,
            max_candidates: self.max_candidates,
            weights,
            execute: self.execute,
            shots: self.shots.unwrap_or(1024),
            seed: self.seed,
            noisy: !self.noiseless,
            clock,
            bandit_alpha: self.bandit_alpha,
            bandit_sigma: self.bandit_sigma,
            ..AdjustOptions::default()
        })
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: String) -> Self {
        Failure {
            code: EXIT_USAGE,
            message,
        }
    }
}

fn dataset_code(e: &DatasetError) -> u8 {
    match e {
        DatasetError::Conflict(_) => EXIT_CONFLICT,
        DatasetError::Io { .. } => EXIT_FAILURE,
        _ => EXIT_DATASET,
    }
}

impl From<OrchestratorError> for Failure {
    fn from(e: OrchestratorError) -> Self {
        let code = match &e {
            OrchestratorError::Dataset(d) => dataset_code(d),
            OrchestratorError::Backend(_) => EXIT_BACKEND,
            OrchestratorError::Conflict(_) => EXIT_CONFLICT,
            OrchestratorError::Usage(_) | OrchestratorError::Bandit(_) => EXIT_USAGE,
            OrchestratorError::Io { .. } => EXIT_FAILURE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<DatasetError> for Failure {
    fn from(e: DatasetError) -> Self {
        Failure {
            code: dataset_code(&e),
            message: e.to_string(),
        }
    }
}

impl From<ReportError> for Failure {
    fn from(e: ReportError) -> Self {
        let code = match e {
            ReportError::Parse { .. } => EXIT_DATASET,
            ReportError::Io { .. } => EXIT_FAILURE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn execute(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Dataset(DatasetCommand::Examples { out, overwrite }) => {
            let index = save_dataset(&example_dataset(), &out, overwrite)?;
            println!("wrote {} circuits to {}", index.entries.len(), out.display());
        }
        Command::Adjust {
            dataset,
            backend,
            out,
            run,
            overwrite,
        } => {
            let opts = run.options()?;
            let w = orchestrator::adjust(&dataset, &backend, &out, overwrite, &opts)?;
            for s in &w.selections {
                let score = s.selected_score.finite().map_or_else(|| "inf".to_string(), |x| format!("{x:.4}"));
                println!("{}\t{}\tscore={score}", s.circuit, s.selected_label);
            }
            println!(
                "{} evaluations, {} compiles, {} cache hits; workload in {}",
                w.counters.evaluations,
                w.counters.compiles,
                w.counters.cache_hits,
                out.display()
            );
        }
        Command::Matrix {
            dataset,
            backends,
            out,
            run,
        } => {
            let opts = run.options()?;
            let m = orchestrator::matrix(&dataset, &backends, &out, &opts)?;
            for col in &m.backends {
                if let Some(e) = &col.error {
                    eprintln!("warning: backend {} failed: {e}", col.backend);
                }
            }
            println!("{} cells written to {}", m.cells.len(), out.display());
        }
        Command::Report { matrix, out, html } => {
            for p in orchestrator::report(&matrix, &out, html)? {
                println!("wrote {}", p.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
