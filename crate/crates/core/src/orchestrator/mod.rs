//! Dataset-level adjustment, cross-backend matrices and reports.

mod evaluate;
mod matrix;
mod report;
mod workload;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::backend::{BackendError, BackendModel};
use crate::bandit::{featurize, BanditError, LinearPosterior};
use crate::circuit::Circuit;
use crate::compiler::{default_candidates, Clock, StrategySpec};
use crate::dataset::DatasetError;
use crate::executor::{derive_seed, DEFAULT_MAX_QUBITS};
use crate::metrics::{
    self, comparison_ratios, distances, finite_safe_score, pareto_front, pareto_tuple, select, ComparisonRatios,
    MetricRecord, MetricValue, ObjectiveWeights,
};

pub use evaluate::{
    cache_key, execution_seed, Counters, Evaluation, Evaluator, ExecutionSettings, ZneSummary, CACHE_FORMAT_VERSION,
    PARITY, RO_ENTROPY, RO_P_MAX, ZNE_ENTROPY, ZNE_PARITY, ZNE_P_MAX,
};
pub use matrix::{matrix, run_matrix, MatrixCell, MatrixColumn, MatrixReport, MATRIX_FORMAT_VERSION};
pub use report::{render_html, render_markdown, report, ReportError};
pub use workload::{adjust, write_workload, DIAGNOSTICS_FILE, WORKLOAD_FORMAT_VERSION};

pub const NOTE_SMALL_SAMPLE: &str = "small-sample";

#[derive(Debug, thiserror::Error)]
pub enum OrchestratorError {
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error("{0} already exists; pass --overwrite to replace it")]
    Conflict(PathBuf),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid option: {0}")]
    Usage(String),
    #[error(transparent)]
    Bandit(#[from] BanditError),
}

pub(crate) fn io_error(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> OrchestratorError {
    let path = path.into();
    move |source| OrchestratorError::Io { path, source }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    #[default]
    Grid,
    Bandit,
}

impl FromStr for SearchMode {
    type Err = OrchestratorError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "grid" => Ok(SearchMode::Grid),
            "bandit" => Ok(SearchMode::Bandit),
            other => Err(OrchestratorError::Usage(format!("unknown search mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdjustOptions {
    pub search: SearchMode,
    pub pareto: bool,
    pub max_candidates: usize,
    pub weights: ObjectiveWeights,
    pub execute: bool,
    pub shots: u64,
    pub seed: u64,
    /// Pauli-trajectory noise during execution.
    pub noisy: bool,
    pub max_qubits: usize,
    pub clock: Clock,
    pub bandit_alpha: f64,
    pub bandit_sigma: f64,
    /// Warm-start state for bandit mode.
    pub initial_posterior: Option<LinearPosterior>,
}

impl Default for AdjustOptions {
    fn default() -> Self {
        AdjustOptions {
            search: SearchMode::Grid,
            pareto: false,
            max_candidates: 24,
            weights: ObjectiveWeights::default(),
            execute: false,
            shots: 1024,
            seed: 0,
            noisy: true,
            max_qubits: DEFAULT_MAX_QUBITS,
            clock: Clock::Monotonic,
            bandit_alpha: 1.0,
            bandit_sigma: 1.0,
            initial_posterior: None,
        }
    }
}

impl AdjustOptions {
    fn execution(&self) -> Option<ExecutionSettings> {
        self.execute.then_some(ExecutionSettings {
            shots: self.shots,
            seed: self.seed,
            noisy: self.noisy,
            max_qubits: self.max_qubits,
        })
    }
}

/// Settings and provenance of one adjustment run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub tool_version: String,
    pub backend_spec: String,
    pub backend_name: String,
    pub calibration_id: String,
    pub search: SearchMode,
    pub pareto: bool,
    pub max_candidates: usize,
    pub weights: ObjectiveWeights,
    pub execute: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shots: Option<u64>,
    pub seed: u64,
    pub noisy: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_compile_time: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bandit: Option<BanditSettings>,
    pub baseline: StrategySpec,
    pub candidates: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BanditSettings {
    pub alpha: f64,
    pub sigma: f64,
}

/// One row of a circuit's candidate table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateRecord {
    pub index: usize,
    pub label: String,
    pub digest: String,
    pub score: MetricValue,
    pub pareto: bool,
    pub metrics: MetricRecord,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionRecord {
    pub circuit: String,
    pub fingerprint: String,
    pub selected_index: usize,
    pub selected_label: String,
    pub selected_digest: String,
    pub selected_strategy: StrategySpec,
    pub selected_score: MetricValue,
    pub selected_metrics: MetricRecord,
    pub baseline_metrics: MetricRecord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub baseline_error: Option<String>,
    pub ratios: ComparisonRatios,
    /// Every candidate scored `+inf`.
    pub all_invalid: bool,
    pub evaluated: usize,
    pub evaluation_order: Vec<usize>,
    /// Candidate indices on the `(depth, 2q, err)` front.
    pub pareto_front: Vec<usize>,
    pub candidates: Vec<CandidateRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricDiagnostics {
    pub baseline: Vec<f64>,
    pub selected: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ks: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cvm: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub num_circuits: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub metrics: BTreeMap<String, MetricDiagnostics>,
}

/// In-memory result of [`adjust_circuits`].
#[derive(Debug, Clone, PartialEq)]
pub struct Workload {
    pub metadata: RunMetadata,
    pub selections: Vec<SelectionRecord>,
    pub diagnostics: Diagnostics,
    pub counters: Counters,
    /// Per circuit, per candidate index: the evaluation with its strategy.
    pub evaluations: Vec<Vec<(StrategySpec, Evaluation)>>,
    pub posterior: Option<LinearPosterior>,
}

/// Baseline vs selected distances per metric across circuits.
pub fn diagnostics(selections: &[SelectionRecord], executed: bool) -> Diagnostics {
    let mut keys = vec![metrics::DEPTH, metrics::TWO_QUBIT, metrics::ERR];
    if executed {
        keys.extend([metrics::ENTROPY, metrics::P_MAX]);
    }
    let mut notes = Vec::new();
    if selections.len() == 1 {
        notes.push(NOTE_SMALL_SAMPLE.to_string());
    }
    let mut out = BTreeMap::new();
    for key in keys {
        let baseline: Vec<f64> = selections.iter().filter_map(|s| s.baseline_metrics.finite(key)).collect();
        let selected: Vec<f64> = selections.iter().filter_map(|s| s.selected_metrics.finite(key)).collect();
        let d = distances(&baseline, &selected).ok();
        if d.is_none() && !selections.is_empty() {
            notes.push(format!("{key}: no finite samples on one side"));
        }
        out.insert(
            key.to_string(),
            MetricDiagnostics {
                ks: d.map(|d| d.ks),
                w1: d.map(|d| d.w1),
                cvm: d.map(|d| d.cvm),
                baseline,
                selected,
            },
        );
    }
    Diagnostics {
        num_circuits: selections.len(),
        notes,
        metrics: out,
    }
}

/// Algorithm body on already-loaded inputs; nothing is written to disk.
pub fn adjust_circuits(
    circuits: &[Circuit],
    backend_spec: &str,
    backend: &BackendModel,
    opts: &AdjustOptions,
) -> Result<Workload, OrchestratorError> {
    if opts.execute && opts.shots == 0 {
        return Err(OrchestratorError::Usage("--shots must be positive".into()));
    }
    let candidates = default_candidates(opts.max_candidates);
    if candidates.is_empty() {
        return Err(OrchestratorError::Usage("--max-candidates must be positive".into()));
    }
    let baseline = StrategySpec::baseline();
    let mut ev = Evaluator::new(backend, opts.clock, opts.execution());

    let baselines: Vec<Evaluation> = circuits.iter().map(|c| ev.evaluate_baseline(c, &baseline)).collect();

    let mut posterior = match opts.search {
        SearchMode::Grid => None,
        SearchMode::Bandit => Some(match &opts.initial_posterior {
            Some(p) => p.clone(),
            None => LinearPosterior::new(opts.bandit_alpha, opts.bandit_sigma)?,
        }),
    };

    let mut selections = Vec::with_capacity(circuits.len());
    let mut all_evaluations = Vec::with_capacity(circuits.len());
    for (ci, (c, base)) in circuits.iter().zip(baselines).enumerate() {
        let order: Vec<usize> = match &posterior {
            None => (0..candidates.len()).collect(),
            Some(p) => p.propose_order(&candidates, derive_seed(opts.seed, ci as u64))?,
        };
        let mut evals: Vec<Option<Evaluation>> = vec![None; candidates.len()];
        for &i in &order {
            let e = ev.evaluate_candidate(c, &candidates[i]);
            if let Some(p) = posterior.as_mut() {
                let y = finite_safe_score(&e.metrics, &opts.weights);
                if y.is_finite() {
                    p.update(&featurize(&candidates[i]), y)?;
                }
            }
            evals[i] = Some(e);
        }
        let evals: Vec<Evaluation> = evals.into_iter().map(|e| e.expect("every candidate evaluated")).collect();
        selections.push(selection_record(c, &candidates, &evals, &base, order, opts));
        all_evaluations.push(candidates.iter().cloned().zip(evals).collect());
    }

    let metadata = RunMetadata {
        tool_version: crate::VERSION.to_string(),
        backend_spec: backend_spec.to_string(),
        backend_name: backend.name().to_string(),
        calibration_id: backend.calibration_id().to_string(),
        search: opts.search,
        pareto: opts.pareto,
        max_candidates: opts.max_candidates,
        weights: opts.weights.clone(),
        execute: opts.execute,
        shots: opts.execute.then_some(opts.shots),
        seed: opts.seed,
        noisy: opts.noisy,
        fixed_compile_time: match opts.clock {
            Clock::Fixed(t) => Some(t),
            Clock::Monotonic => None,
        },
        bandit: (opts.search == SearchMode::Bandit).then_some(BanditSettings {
            alpha: opts.bandit_alpha,
            sigma: opts.bandit_sigma,
        }),
        baseline,
        candidates: candidates.iter().map(|s| s.label()).collect(),
    };
    Ok(Workload {
        diagnostics: diagnostics(&selections, opts.execute),
        metadata,
        selections,
        counters: ev.counters(),
        evaluations: all_evaluations,
        posterior,
    })
}

fn selection_record(
    c: &Circuit,
    candidates: &[StrategySpec],
    evals: &[Evaluation],
    base: &Evaluation,
    order: Vec<usize>,
    opts: &AdjustOptions,
) -> SelectionRecord {
    let pool: Vec<_> = evals.iter().map(|e| (pareto_tuple(&e.metrics), e.metrics.clone())).collect();
    let chosen = select(&pool, &opts.weights, opts.pareto).expect("non-empty candidate list");

    let with_tuples: Vec<usize> = (0..pool.len()).filter(|&i| pool[i].0.is_some()).collect();
    let tuples: Vec<_> = with_tuples.iter().map(|&i| pool[i].0.unwrap()).collect();
    let front: Vec<usize> = pareto_front(&tuples).into_iter().map(|j| with_tuples[j]).collect();

    let table = candidates
        .iter()
        .zip(evals)
        .enumerate()
        .map(|(i, (s, e))| CandidateRecord {
            index: i,
            label: s.label(),
            digest: s.digest(),
            score: MetricValue::from_f64(finite_safe_score(&e.metrics, &opts.weights)),
            pareto: front.contains(&i),
            metrics: e.metrics.clone(),
            notes: e.notes.clone(),
            error: e.error.clone(),
        })
        .collect();
    let s = &candidates[chosen.index];
    let selected_metrics = evals[chosen.index].metrics.clone();
    SelectionRecord {
        circuit: c.name.clone(),
        fingerprint: c.fingerprint(),
        selected_index: chosen.index,
        selected_label: s.label(),
        selected_digest: s.digest(),
        selected_strategy: s.clone(),
        selected_score: MetricValue::from_f64(chosen.score),
        ratios: comparison_ratios(&base.metrics, &selected_metrics),
        selected_metrics,
        baseline_metrics: base.metrics.clone(),
        baseline_error: base.error.clone(),
        all_invalid: chosen.all_invalid,
        evaluated: evals.len(),
        evaluation_order: order,
        pareto_front: front,
        candidates: table,
    }
}
