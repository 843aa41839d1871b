//! Strategy-driven compilation: layout, routing, basis translation,
//! peephole optimisation, decoupling insertion and twirl-ensemble selection.

pub mod dd;
pub mod layout;
pub mod optimize;
pub mod routing;
pub mod strategy;
pub mod translate;
pub mod twirl;

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::backend::BackendModel;
use crate::circuit::{Circuit, CircuitError};
use crate::metrics::{self, MetricRecord};

pub use dd::insert_dd;
pub use layout::{choose_layout, connected_layout, noise_aware_layout, trivial_layout, Layout};
pub use optimize::optimize;
pub use routing::{route, RoutedCircuit};
pub use strategy::{
    default_candidates, CompilationKnobs, CuttingKnobs, DdSequence, LayoutMethod, MitigationKnobs, RoutingMethod,
    RuntimeKnobs, StrategyError, StrategyGroup, StrategyParts, StrategySpec, SuppressionKnobs, TranslationMethod,
};
pub use translate::translate;
pub use twirl::{apply_measurement_flips, measurement_twirl_variants, pauli_twirl_ensemble};

pub const NOTE_CUTTING_UNSUPPORTED: &str = "cutting_unsupported";

/// Weight of the error proxy in the twirl-ensemble score `depth + 10 * err`.
pub const ENSEMBLE_ERROR_WEIGHT: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CompileError {
    #[error("circuit needs {circuit} qubits but backend has {backend}")]
    Capacity { circuit: usize, backend: usize },
    #[error("invalid circuit: {0}")]
    InvalidCircuit(#[from] CircuitError),
    #[error("circuit has no measurements")]
    NoMeasurements,
    #[error("{0} classical bits exceed the 64-bit mask limit")]
    TooManyClbits(usize),
}

/// Source of compile-time measurements.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Clock {
    /// Wall-clock seconds from a monotonic clock.
    #[default]
    Monotonic,
    /// Every compile reports this many seconds.
    Fixed(f64),
}

impl Clock {
    pub fn time<R>(&self, f: impl FnOnce() -> R) -> (R, f64) {
        match *self {
            Clock::Monotonic => {
                let start = Instant::now();
                let r = f();
                (r, start.elapsed().as_secs_f64())
            }
            Clock::Fixed(secs) => (f(), secs),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleReport {
    /// `depth + 10 * err` for every member, in ensemble order.
    pub member_scores: Vec<f64>,
    pub selected: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompiledCandidate {
    pub strategy: StrategySpec,
    /// Circuit over physical qubits.
    pub circuit: Circuit,
    /// Placement before routing, `initial_layout[logical] = physical`.
    pub initial_layout: Layout,
    /// Placement after routing swaps.
    pub final_layout: Layout,
    pub metrics: MetricRecord,
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<EnsembleReport>,
}

struct Stage {
    circuit: Circuit,
    initial_layout: Layout,
    final_layout: Layout,
}

fn compile_member(c: &Circuit, b: &BackendModel, s: &StrategySpec) -> Result<Stage, CompileError> {
    let knobs = s.compilation();
    let layout = choose_layout(c, b, knobs.layout_method)?;
    let routed = route(c, b, &layout, knobs.routing_method);
    let native = translate(&routed.circuit);
    let mut out = optimize(&native, knobs.optimization_level);
    if s.suppression().dynamical_decoupling {
        out = insert_dd(&out, s.suppression().dd_sequence);
    }
    Ok(Stage {
        circuit: out,
        initial_layout: layout,
        final_layout: routed.final_layout,
    })
}

/// Depth, size, two-qubit count and error proxy of a physical circuit.
pub fn structural_metrics(c: &Circuit, b: &BackendModel) -> MetricRecord {
    MetricRecord::new()
        .with(metrics::DEPTH, c.depth() as f64)
        .with(metrics::SIZE, c.size() as f64)
        .with(metrics::TWO_QUBIT, c.two_qubit_count() as f64)
        .with(metrics::ERR, metrics::estimated_error(c, b, &[]))
}

fn ensemble_score(c: &Circuit, b: &BackendModel) -> f64 {
    c.depth() as f64 + ENSEMBLE_ERROR_WEIGHT * metrics::estimated_error(c, b, &[])
}

fn compile_untimed(c: &Circuit, b: &BackendModel, s: &StrategySpec) -> Result<CompiledCandidate, CompileError> {
    c.validate()?;
    if c.num_qubits > b.num_qubits() {
        return Err(CompileError::Capacity {
            circuit: c.num_qubits,
            backend: b.num_qubits(),
        });
    }
    let mut notes = Vec::new();
    if s.cutting().cutting {
        notes.push(NOTE_CUTTING_UNSUPPORTED.to_string());
    }
    let sup = s.suppression();
    let (stage, ensemble) = if sup.pauli_twirling {
        let members = pauli_twirl_ensemble(&translate(c), sup.num_twirls as usize, sup.suppression_seed);
        let mut best: Option<(usize, Stage)> = None;
        let mut scores = Vec::with_capacity(members.len());
        for (i, m) in members.iter().enumerate() {
            let stage = compile_member(m, b, s)?;
            let score = ensemble_score(&stage.circuit, b);
            if best.is_none() || score < scores[best.as_ref().unwrap().0] {
                best = Some((i, stage));
            }
            scores.push(score);
        }
        let (selected, stage) = best.expect("num_twirls is positive");
        notes.push(format!("pauli_twirl_member={selected}"));
        (
            stage,
            Some(EnsembleReport {
                member_scores: scores,
                selected,
            }),
        )
    } else {
        (compile_member(c, b, s)?, None)
    };
    if sup.measurement_twirling {
        notes.push(format!("measurement_twirl_variants={}", sup.num_twirls));
    }
    Ok(CompiledCandidate {
        strategy: s.clone(),
        metrics: structural_metrics(&stage.circuit, b),
        circuit: stage.circuit,
        initial_layout: stage.initial_layout,
        final_layout: stage.final_layout,
        notes,
        ensemble,
    })
}

/// Compile `c` for `b` under `s`. The `time` metric is the duration of the
/// whole call as reported by `clock`.
pub fn compile(c: &Circuit, b: &BackendModel, s: &StrategySpec, clock: Clock) -> Result<CompiledCandidate, CompileError> {
    let (result, secs) = clock.time(|| compile_untimed(c, b, s));
    let mut cand = result?;
    cand.metrics.set(metrics::TIME, secs);
    Ok(cand)
}
