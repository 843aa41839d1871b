//! Metric records, the error proxy, objective scoring, Pareto filtering and
//! distribution diagnostics.

mod distance;
mod objective;
mod pareto;
mod record;

pub use distance::{cvm_distance, distances, ks_distance, w1_distance, DistanceError, Distances};
pub use objective::{
    finite_safe_score, pareto_tuple, score, select, ObjectiveError, ObjectiveWeights, Selection,
};
pub use pareto::{dominates, pareto_front, ParetoTuple};
pub use record::{MetricRecord, MetricValue, DEPTH, ENTROPY, ERR, P_MAX, SIZE, TIME, TWO_QUBIT};

use serde::{Deserialize, Serialize};

use crate::backend::BackendModel;
use crate::circuit::{Circuit, GateKind};

/// Error contribution of every operation of `c`, with circuit qubit `q`
/// living on physical qubit `layout[q]` (identity when `layout` is empty).
pub fn operation_errors(c: &Circuit, b: &BackendModel, layout: &[usize]) -> Vec<f64> {
    let phys = |q: usize| layout.get(q).copied().unwrap_or(q);
    c.gates
        .iter()
        .filter(|g| g.name != GateKind::Barrier)
        .map(|g| match g.name {
            GateKind::Measure => b.readout_error(phys(g.qubits[0])),
            k if k.is_two_qubit() => b.edge_error(phys(g.qubits[0]), phys(g.qubits[1])),
            _ => b.sq_error(phys(g.qubits[0])),
        })
        .collect()
}

/// `1 - prod(1 - e_l)`.
pub fn survival_error(errors: &[f64]) -> f64 {
    1.0 - errors.iter().map(|e| 1.0 - e).product::<f64>()
}

/// Survival-product error estimate of a compiled circuit.
pub fn estimated_error(c: &Circuit, b: &BackendModel, layout: &[usize]) -> f64 {
    survival_error(&operation_errors(c, b, layout)).clamp(0.0, 1.0)
}

/// Baseline-relative comparison; `None` where undefined.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRatios {
    pub r_depth: Option<f64>,
    pub r_2q: Option<f64>,
    pub delta_err: Option<f64>,
}

pub fn comparison_ratios(base: &MetricRecord, selected: &MetricRecord) -> ComparisonRatios {
    let ratio = |key: &str| match (selected.finite(key), base.finite(key)) {
        (Some(s), Some(b)) if b != 0.0 => Some(s / b),
        _ => None,
    };
    ComparisonRatios {
        r_depth: ratio(DEPTH),
        r_2q: ratio(TWO_QUBIT),
        delta_err: match (selected.finite(ERR), base.finite(ERR)) {
            (Some(s), Some(b)) => Some(s - b),
            _ => None,
        },
    }
}
