//! Single-candidate evaluation with a content-addressed compile cache.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::backend::BackendModel;
use crate::canonical::sha256_hex;
use crate::circuit::Circuit;
use crate::compiler::{self, measurement_twirl_variants, Clock, CompileError, CompiledCandidate, StrategySpec};
use crate::executor::{
    self, derive_seed, mask_bitstring, measured_clbits, readout_mitigate, zne_counts, Counts, ExecutionError,
    RunOptions,
};
use crate::metrics::{self, MetricRecord};

/// Bumped whenever compiled output for the same inputs may change.
pub const CACHE_FORMAT_VERSION: &str = "qselect-compile-v1";

pub const PARITY: &str = "parity";
pub const RO_ENTROPY: &str = "ro_entropy";
pub const RO_P_MAX: &str = "ro_p_max";
pub const ZNE_PARITY: &str = "zne_parity";
pub const ZNE_ENTROPY: &str = "zne_entropy";
pub const ZNE_P_MAX: &str = "zne_p_max";

/// Digest of backend name, calibration id, circuit fingerprint, canonical
/// strategy and cache format version.
pub fn cache_key(b: &BackendModel, c: &Circuit, s: &StrategySpec) -> String {
    let parts = [
        b.name(),
        b.calibration_id(),
        &c.fingerprint(),
        &s.canonical_json(),
        CACHE_FORMAT_VERSION,
    ];
    sha256_hex(parts.join("\n"))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counters {
    /// Calls to the compiler, cache misses only.
    pub compiles: usize,
    pub cache_hits: usize,
    /// Candidate evaluations (baseline evaluations excluded).
    pub evaluations: usize,
    pub baseline_evaluations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExecutionSettings {
    pub shots: u64,
    pub seed: u64,
    pub noisy: bool,
    pub max_qubits: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZneSummary {
    /// `(scale factor, parity, shots)`
    pub points: Vec<(u32, f64, u64)>,
    pub extrapolated: f64,
}

/// Outcome of one evaluation; errors are captured, never raised.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub metrics: MetricRecord,
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_layout: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub final_layout: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counts: Option<Counts>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zne: Option<ZneSummary>,
}

impl Evaluation {
    fn failed(error: String, notes: Vec<String>) -> Self {
        Evaluation {
            metrics: MetricRecord::failure(),
            notes,
            error: Some(error),
            initial_layout: None,
            final_layout: None,
            counts: None,
            zne: None,
        }
    }
}

/// Compiles and optionally executes candidates against one backend,
/// reusing compiled output by [`cache_key`].
pub struct Evaluator<'a> {
    backend: &'a BackendModel,
    clock: Clock,
    execution: Option<ExecutionSettings>,
    cache: HashMap<String, CompiledCandidate>,
    counters: Counters,
}

impl<'a> Evaluator<'a> {
    pub fn new(backend: &'a BackendModel, clock: Clock, execution: Option<ExecutionSettings>) -> Self {
        Evaluator {
            backend,
            clock,
            execution,
            cache: HashMap::new(),
            counters: Counters::default(),
        }
    }

    pub fn counters(&self) -> Counters {
        self.counters
    }

    pub fn compile_cached(&mut self, c: &Circuit, s: &StrategySpec) -> Result<CompiledCandidate, CompileError> {
        let key = cache_key(self.backend, c, s);
        if let Some(hit) = self.cache.get(&key) {
            self.counters.cache_hits += 1;
            return Ok(hit.clone());
        }
        self.counters.compiles += 1;
        let compiled = compiler::compile(c, self.backend, s, self.clock)?;
        self.cache.insert(key, compiled.clone());
        Ok(compiled)
    }

    pub fn evaluate_candidate(&mut self, c: &Circuit, s: &StrategySpec) -> Evaluation {
        self.counters.evaluations += 1;
        self.evaluate(c, s)
    }

    pub fn evaluate_baseline(&mut self, c: &Circuit, s: &StrategySpec) -> Evaluation {
        self.counters.baseline_evaluations += 1;
        self.evaluate(c, s)
    }

    fn evaluate(&mut self, c: &Circuit, s: &StrategySpec) -> Evaluation {
        let compiled = match self.compile_cached(c, s) {
            Ok(x) => x,
            Err(e) => {
                let mut notes = Vec::new();
                if s.cutting().cutting {
                    notes.push(compiler::NOTE_CUTTING_UNSUPPORTED.to_string());
                }
                return Evaluation::failed(format!("compile: {e}"), notes);
            }
        };
        let mut eval = Evaluation {
            metrics: compiled.metrics.clone(),
            notes: compiled.notes.clone(),
            error: None,
            initial_layout: Some(compiled.initial_layout.clone()),
            final_layout: Some(compiled.final_layout.clone()),
            counts: None,
            zne: None,
        };
        if let Some(x) = self.execution {
            let seed = execution_seed(x.seed, c, s);
            if let Err(e) = execute_into(&mut eval, &compiled, self.backend, s, x, seed) {
                eval.metrics.failed = true;
                eval.error = Some(format!("execute: {e}"));
            }
        }
        eval
    }
}

/// Per-candidate execution seed so every search mode sees the same counts.
pub fn execution_seed(run_seed: u64, c: &Circuit, s: &StrategySpec) -> u64 {
    let h = sha256_hex(format!("{run_seed}\n{}\n{}", c.fingerprint(), s.digest()));
    u64::from_str_radix(&h[..16], 16).expect("hex digest")
}

#[derive(Debug, thiserror::Error)]
enum ExecuteFailure {
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Execution(#[from] ExecutionError),
}

fn execute_into(
    eval: &mut Evaluation,
    compiled: &CompiledCandidate,
    b: &BackendModel,
    s: &StrategySpec,
    x: ExecutionSettings,
    seed: u64,
) -> Result<(), ExecuteFailure> {
    let circ = &compiled.circuit;
    let opts = |shots: u64, seed: u64| RunOptions {
        shots,
        seed,
        noisy: x.noisy,
        max_qubits: x.max_qubits,
    };
    let sup = s.suppression();
    let counts = if sup.measurement_twirling {
        let variants = measurement_twirl_variants(circ, sup.num_twirls as usize, derive_seed(seed, 0))?;
        let clbits: Vec<usize> = measured_clbits(circ).into_iter().map(|(_, cb)| cb).collect();
        let per = x.shots / variants.len() as u64;
        let extra = x.shots - per * variants.len() as u64;
        let mut total = Counts::from_map(Default::default());
        for (i, (variant, mask)) in variants.iter().enumerate() {
            let n = if i == 0 { per + extra } else { per };
            if n == 0 {
                continue;
            }
            let raw = executor::run(variant, b, opts(n, derive_seed(seed, 1 + i as u64)))?;
            total.absorb(&executor::untwirl(&raw, &mask_bitstring(*mask, &clbits))?);
        }
        total
    } else {
        executor::run(circ, b, opts(x.shots, seed))?
    };
    eval.metrics
        .set(metrics::ENTROPY, executor::entropy(&counts))
        .set(metrics::P_MAX, executor::top_probability(&counts))
        .set(PARITY, executor::parity_expectation(&counts));

    let m = s.mitigation();
    if m.readout_mitigation {
        let qubits: Vec<usize> = measured_clbits(circ).into_iter().map(|(q, _)| q).collect();
        match readout_mitigate(&counts, b, &qubits) {
            Ok(d) => {
                eval.metrics
                    .set(RO_ENTROPY, executor::distribution_entropy(&d.values))
                    .set(RO_P_MAX, d.values.values().cloned().fold(0.0, f64::max));
            }
            Err(e) => eval.notes.push(format!("readout_mitigation_error: {e}")),
        }
    }
    if m.zne {
        match zne_counts(circ, b, s, x.shots, derive_seed(seed, u64::MAX), x.noisy) {
            Ok(r) => {
                eval.metrics
                    .set(ZNE_PARITY, r.extrapolated)
                    .set(ZNE_ENTROPY, executor::distribution_entropy(&r.distribution.values))
                    .set(ZNE_P_MAX, r.distribution.values.values().cloned().fold(0.0, f64::max));
                eval.zne = Some(ZneSummary {
                    points: r.points,
                    extrapolated: r.extrapolated,
                });
            }
            Err(e) => eval.notes.push(format!("zne_error: {e}")),
        }
    }
    eval.counts = Some(counts);
    Ok(())
}
