//! Cross-backend evaluation matrix.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::backend::resolve_backend;
use crate::circuit::Circuit;
use crate::compiler::StrategySpec;
use crate::dataset;
use crate::metrics::{ComparisonRatios, MetricRecord, MetricValue};

use super::workload::timestamp;
use super::{adjust_circuits, io_error, AdjustOptions, Counters, Diagnostics, OrchestratorError, RunMetadata};

pub const MATRIX_FORMAT_VERSION: u32 = 1;

/// Per-backend run information; `error` is set when the backend failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixColumn {
    pub backend: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<RunMetadata>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counters: Option<Counters>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<Diagnostics>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixCell {
    pub circuit: String,
    pub backend: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub selected_label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub selected_digest: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub selected_strategy: Option<StrategySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub selected_score: Option<MetricValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metrics: Option<MetricRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub baseline_metrics: Option<MetricRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratios: Option<ComparisonRatios>,
}

impl MatrixCell {
    fn empty(circuit: &str, backend: &str, error: Option<String>) -> Self {
        MatrixCell {
            circuit: circuit.to_string(),
            backend: backend.to_string(),
            error,
            selected_label: None,
            selected_digest: None,
            selected_strategy: None,
            selected_score: None,
            metrics: None,
            baseline_metrics: None,
            ratios: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixReport {
    pub format_version: u32,
    #[serde(default)]
    pub timestamp: String,
    pub circuits: Vec<String>,
    pub backends: Vec<MatrixColumn>,
    /// Circuit-major: every circuit for the first backend, then the next.
    pub cells: Vec<MatrixCell>,
}

/// Adjust `circuits` against every backend spec; a failing backend only
/// fails its own column.
pub fn run_matrix(circuits: &[Circuit], specs: &[String], opts: &AdjustOptions) -> Result<MatrixReport, OrchestratorError> {
    if specs.is_empty() {
        return Err(OrchestratorError::Usage("at least one --backend is required".into()));
    }
    let mut backends = Vec::with_capacity(specs.len());
    let mut cells = Vec::with_capacity(specs.len() * circuits.len());
    for spec in specs {
        let result = resolve_backend(spec)
            .map_err(OrchestratorError::from)
            .and_then(|b| adjust_circuits(circuits, spec, &b, opts));
        match result {
            Ok(w) => {
                for sel in &w.selections {
                    cells.push(MatrixCell {
                        selected_label: Some(sel.selected_label.clone()),
                        selected_digest: Some(sel.selected_digest.clone()),
                        selected_strategy: Some(sel.selected_strategy.clone()),
                        selected_score: Some(sel.selected_score),
                        metrics: Some(sel.selected_metrics.clone()),
                        baseline_metrics: Some(sel.baseline_metrics.clone()),
                        ratios: Some(sel.ratios),
                        ..MatrixCell::empty(&sel.circuit, spec, sel.all_invalid.then(|| "all candidates invalid".into()))
                    });
                }
                backends.push(MatrixColumn {
                    backend: spec.clone(),
                    error: None,
                    metadata: Some(w.metadata),
                    counters: Some(w.counters),
                    diagnostics: Some(w.diagnostics),
                });
            }
            Err(e) => {
                let msg = e.to_string();
                cells.extend(circuits.iter().map(|c| MatrixCell::empty(&c.name, spec, Some(msg.clone()))));
                backends.push(MatrixColumn {
                    backend: spec.clone(),
                    error: Some(msg),
                    metadata: None,
                    counters: None,
                    diagnostics: None,
                });
            }
        }
    }
    Ok(MatrixReport {
        format_version: MATRIX_FORMAT_VERSION,
        timestamp: timestamp(),
        circuits: circuits.iter().map(|c| c.name.clone()).collect(),
        backends,
        cells,
    })
}

/// Load the dataset, build the matrix and write it to `out_file`.
pub fn matrix(
    dataset_dir: &Path,
    specs: &[String],
    out_file: &Path,
    opts: &AdjustOptions,
) -> Result<MatrixReport, OrchestratorError> {
    let circuits = dataset::load_dataset(dataset_dir)?;
    let report = run_matrix(&circuits, specs, opts)?;
    if let Some(parent) = out_file.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(io_error(parent))?;
    }
    let text = serde_json::to_string_pretty(&report).expect("serializable");
    fs::write(out_file, text + "\n").map_err(io_error(out_file))?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::example_dataset;
    use crate::compiler::Clock;
    use crate::metrics;

    fn opts() -> AdjustOptions {
        AdjustOptions {
            clock: Clock::Fixed(0.0),
            ..AdjustOptions::default()
        }
    }

    #[test]
    fn cartesian_cells_and_failed_column() {
        let specs = vec!["fake:generic:5".to_string(), "fake:generic:10".to_string(), "bogus".to_string()];
        let m = run_matrix(&example_dataset(), &specs, &opts()).unwrap();
        assert_eq!(m.cells.len(), 9);
        assert!(m.backends[2].error.is_some());
        assert!(m.cells[6..].iter().all(|c| c.error.is_some() && c.metrics.is_none()));
        assert!(m.cells[..6].iter().all(|c| c.selected_label.is_some()));
    }

    #[test]
    fn single_backend_matches_adjust() {
        let specs = vec!["fake:generic:5".to_string()];
        let m = run_matrix(&example_dataset(), &specs, &opts()).unwrap();
        let b = resolve_backend("fake:generic:5").unwrap();
        let w = adjust_circuits(&example_dataset(), "fake:generic:5", &b, &opts()).unwrap();
        for (cell, sel) in m.cells.iter().zip(&w.selections) {
            assert_eq!(cell.selected_digest.as_deref(), Some(sel.selected_digest.as_str()));
            assert_eq!(cell.metrics.as_ref(), Some(&sel.selected_metrics));
        }
        assert_eq!(m.backends[0].diagnostics.as_ref(), Some(&w.diagnostics));
    }

    #[test]
    fn executed_cells_carry_count_metrics() {
        let mut o = opts();
        o.execute = true;
        o.shots = 128;
        o.max_candidates = 4;
        let m = run_matrix(&example_dataset()[..2], &["fake:generic:5".to_string()], &o).unwrap();
        for c in &m.cells {
            let r = c.metrics.as_ref().unwrap();
            assert!(r.finite(metrics::ENTROPY).is_some());
            assert!(r.finite(metrics::P_MAX).is_some());
        }
    }
}
