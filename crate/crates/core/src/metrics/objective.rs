//! Weighted scalar objective and the finite-safe selection rule.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::pareto::{pareto_front, ParetoTuple};
use super::record::{MetricRecord, DEPTH, ERR, TIME, TWO_QUBIT};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ObjectiveWeights {
    pub weights: BTreeMap<String, f64>,
}

impl Default for ObjectiveWeights {
    fn default() -> Self {
        let weights = [(DEPTH, 1.0), (TWO_QUBIT, 2.0), (ERR, 10.0), (TIME, 0.1)]
            .into_iter()
            .map(|(k, w)| (k.to_string(), w))
            .collect();
        ObjectiveWeights { weights }
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ObjectiveError {
    #[error("weights must be a JSON object of numbers: {0}")]
    Parse(String),
    #[error("weight for `{0}` is not finite")]
    NonFinite(String),
    #[error("cannot select from an empty candidate list")]
    Empty,
}

impl ObjectiveWeights {
    /// Parse a JSON object; keys not given keep their default weight.
    pub fn from_json_overrides(text: &str) -> Result<Self, ObjectiveError> {
        let overrides: BTreeMap<String, f64> =
            serde_json::from_str(text).map_err(|e| ObjectiveError::Parse(e.to_string()))?;
        let mut w = ObjectiveWeights::default();
        for (k, v) in overrides {
            if !v.is_finite() {
                return Err(ObjectiveError::NonFinite(k));
            }
            w.weights.insert(k, v);
        }
        Ok(w)
    }
}

/// `sum_k w_k * m_k` over keys present in both maps with finite values; 0 if none.
pub fn score(m: &MetricRecord, w: &ObjectiveWeights) -> f64 {
    w.weights
        .iter()
        .filter_map(|(k, wk)| m.finite(k).map(|v| wk * v))
        .sum()
}

/// Like [`score`], but `+inf` when no objective term is finite or the record
/// is marked failed, so invalid candidates can never win on skipped terms.
pub fn finite_safe_score(m: &MetricRecord, w: &ObjectiveWeights) -> f64 {
    if m.failed {
        return f64::INFINITY;
    }
    let contributes = w.weights.keys().any(|k| m.finite(k).is_some());
    if contributes {
        score(m, w)
    } else {
        f64::INFINITY
    }
}

/// `(depth, 2q, err)` when all three are finite.
pub fn pareto_tuple(m: &MetricRecord) -> Option<ParetoTuple> {
    if m.failed {
        return None;
    }
    Some([m.finite(DEPTH)?, m.finite(TWO_QUBIT)?, m.finite(ERR)?])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub index: usize,
    pub score: f64,
    /// Indices the argmin ran over (the Pareto front when filtering).
    pub pool: Vec<usize>,
    /// Every candidate in the pool scored `+inf`.
    pub all_invalid: bool,
}

/// Argmin of the finite-safe score, optionally restricted to the Pareto front
/// of the candidates that have finite tuples. Ties go to the lowest index.
pub fn select(
    candidates: &[(Option<ParetoTuple>, MetricRecord)],
    w: &ObjectiveWeights,
    pareto: bool,
) -> Result<Selection, ObjectiveError> {
    if candidates.is_empty() {
        return Err(ObjectiveError::Empty);
    }
    let mut pool: Vec<usize> = (0..candidates.len()).collect();
    if pareto {
        let with_tuples: Vec<usize> = pool.iter().copied().filter(|&i| candidates[i].0.is_some()).collect();
        if !with_tuples.is_empty() {
            let tuples: Vec<ParetoTuple> = with_tuples.iter().map(|&i| candidates[i].0.unwrap()).collect();
            pool = pareto_front(&tuples).into_iter().map(|j| with_tuples[j]).collect();
        }
    }
    let mut best = pool[0];
    let mut best_score = finite_safe_score(&candidates[best].1, w);
    for &i in &pool[1..] {
        let s = finite_safe_score(&candidates[i].1, w);
        if s < best_score {
            best = i;
            best_score = s;
        }
    }
    Ok(Selection {
        index: best,
        score: best_score,
        all_invalid: best_score == f64::INFINITY,
        pool,
    })
}
