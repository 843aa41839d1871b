//! Global folding, parity ZNE and reduced-subspace readout mitigation.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::FRAC_PI_4;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::backend::BackendModel;
use crate::circuit::{Circuit, Gate, GateKind};
use crate::compiler::StrategySpec;

use super::{derive_seed, run, Counts, ExecutionError, PseudoDistribution, RunOptions};

const SUBSPACE_CAP: usize = 1024;

/// Gates whose product is the adjoint of `g` up to global phase.
fn adjoint(g: &Gate) -> Vec<Gate> {
    let q = g.qubits.first().copied().unwrap_or(0);
    match g.name {
        GateKind::Sx => vec![Gate::sx(q), Gate::x(q)],
        GateKind::S => vec![Gate::new(GateKind::Sdg, &[q])],
        GateKind::Sdg => vec![Gate::new(GateKind::S, &[q])],
        GateKind::T => vec![Gate::rz(q, -FRAC_PI_4)],
        GateKind::Rx | GateKind::Ry | GateKind::Rz => vec![Gate::with_param(g.name, q, -g.angle())],
        _ => vec![g.clone()],
    }
}

/// Replace the unitary prefix `U` by `U (U^dag U)^((lambda-1)/2)`.
pub fn fold(c: &Circuit, lambda: u32) -> Result<Circuit, ExecutionError> {
    if lambda.is_multiple_of(2) {
        return Err(ExecutionError::BadFoldFactor(lambda));
    }
    if let Some(index) = super::mid_circuit_measurement(c) {
        return Err(ExecutionError::MidCircuitMeasurement { index });
    }
    // Measurements are terminal per qubit, so they commute to the end.
    let (measures, prefix): (Vec<&Gate>, Vec<&Gate>) = c.gates.iter().partition(|g| g.name == GateKind::Measure);
    let unitary: Vec<&Gate> = prefix.iter().copied().filter(|g| g.name != GateKind::Barrier).collect();
    let inverse: Vec<Gate> = unitary.iter().rev().flat_map(|g| adjoint(g)).collect();

    let mut out = c.empty_like();
    out.gates.extend(prefix.into_iter().cloned());
    for _ in 0..(lambda - 1) / 2 {
        out.gates.extend(inverse.iter().cloned());
        out.gates.extend(unitary.iter().map(|g| (*g).clone()));
    }
    out.gates.extend(measures.into_iter().cloned());
    Ok(out)
}

fn odd_parity(key: &str) -> bool {
    key.bytes().filter(|&b| b == b'1').count() % 2 == 1
}

/// `sum_x p(x) (-1)^popcount(x)`.
pub fn parity_expectation(k: &Counts) -> f64 {
    let signed: i64 = k
        .counts
        .iter()
        .map(|(key, &v)| if odd_parity(key) { -(v as i64) } else { v as i64 })
        .sum();
    signed as f64 / k.shots as f64
}

/// Least-squares polynomial of `degree` through `points`, evaluated at 0.
pub fn zne_extrapolate(points: &[(f64, f64)], degree: usize) -> Result<f64, ExecutionError> {
    if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(ExecutionError::NonFinite);
    }
    let distinct: BTreeSet<u64> = points.iter().map(|(x, _)| x.to_bits()).collect();
    if distinct.len() < degree + 1 {
        return Err(ExecutionError::TooFewPoints {
            needed: degree + 1,
            got: distinct.len(),
        });
    }
    let a = DMatrix::from_fn(points.len(), degree + 1, |i, r| points[i].0.powi(r as i32));
    let y = DVector::from_iterator(points.len(), points.iter().map(|p| p.1));
    let coef = a
        .svd(true, true)
        .solve(&y, 1e-14)
        .map_err(|_| ExecutionError::Singular)?;
    Ok(coef[0])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZneResult {
    /// `(scale factor, measured parity, shots)` per folded run.
    pub points: Vec<(u32, f64, u64)>,
    pub extrapolated: f64,
    pub distribution: PseudoDistribution,
}

/// Spread `target` mass over a parity class in proportion to `raw`, or
/// uniformly over the class's bitstrings when `raw` carries none of it.
fn rescale_class(raw: &BTreeMap<String, f64>, width: usize, odd: bool, target: f64, out: &mut BTreeMap<String, f64>) {
    let mass: f64 = raw.iter().filter(|(k, _)| odd_parity(k) == odd).map(|(_, v)| v).sum();
    if mass > 0.0 {
        for (k, v) in raw.iter().filter(|(k, _)| odd_parity(k) == odd) {
            out.insert(k.clone(), v * target / mass);
        }
    } else if target > 0.0 {
        let class: Vec<String> = (0..1usize << width)
            .map(|i| format!("{i:0width$b}"))
            .filter(|k| odd_parity(k) == odd)
            .collect();
        let each = target / class.len() as f64;
        for k in class {
            out.insert(k, each);
        }
    }
}

/// Pseudo-distribution whose even-parity mass matches `(1 + parity) / 2`.
pub fn parity_rescaled(raw: &Counts, parity: f64) -> PseudoDistribution {
    let p = raw.probabilities();
    let width = raw.width();
    let even_target = ((1.0 + parity) / 2.0).clamp(0.0, 1.0);
    let mut values = BTreeMap::new();
    rescale_class(&p, width, false, even_target, &mut values);
    rescale_class(&p, width, true, 1.0 - even_target, &mut values);
    let total: f64 = values.values().sum();
    if total > 0.0 {
        values.values_mut().for_each(|v| *v /= total);
    }
    PseudoDistribution {
        values,
        normalized: true,
    }
}

/// Run `c` folded at every scale factor of `s`, extrapolate the parity to
/// zero noise and rescale the unfolded counts to match it. Shots are split
/// evenly; the remainder goes to the smallest factor.
pub fn zne_counts(
    c: &Circuit,
    b: &BackendModel,
    s: &StrategySpec,
    shots: u64,
    seed: u64,
    noisy: bool,
) -> Result<ZneResult, ExecutionError> {
    let m = s.mitigation();
    let mut factors = m.zne_scale_factors.clone();
    factors.sort_unstable();
    let per = shots / factors.len() as u64;
    if per == 0 {
        return Err(ExecutionError::TooFewShots {
            shots,
            factors: factors.len(),
        });
    }
    let extra = shots - per * factors.len() as u64;
    let mut points = Vec::with_capacity(factors.len());
    let mut base: Option<Counts> = None;
    for (i, &lambda) in factors.iter().enumerate() {
        let n = if i == 0 { per + extra } else { per };
        let k = run(&fold(c, lambda)?, b, RunOptions::new(n, derive_seed(seed, i as u64), noisy))?;
        points.push((lambda, parity_expectation(&k), n));
        if i == 0 {
            base = Some(k);
        }
    }
    let xy: Vec<(f64, f64)> = points.iter().map(|&(l, p, _)| (l as f64, p)).collect();
    let extrapolated = zne_extrapolate(&xy, m.zne_degree as usize)?;
    let distribution = parity_rescaled(base.as_ref().expect("at least one factor"), extrapolated);
    Ok(ZneResult {
        points,
        extrapolated,
        distribution,
    })
}

fn parse_bits(key: &str) -> Vec<bool> {
    key.bytes().rev().map(|b| b == b'1').collect()
}

/// Invert the tensor-product readout-flip model restricted to the observed
/// bitstrings. `measured_qubits[j]` is the physical qubit behind bit `j`
/// counted from the right.
pub fn readout_mitigate(
    k: &Counts,
    b: &BackendModel,
    measured_qubits: &[usize],
) -> Result<PseudoDistribution, ExecutionError> {
    let width = k.width();
    if width != measured_qubits.len() {
        return Err(ExecutionError::WidthMismatch {
            expected: measured_qubits.len(),
            got: width,
        });
    }
    let keys: Vec<&String> = k.counts.keys().collect();
    let n = keys.len();
    if n > SUBSPACE_CAP {
        return Err(ExecutionError::SubspaceTooLarge(n));
    }
    let r: Vec<f64> = measured_qubits.iter().map(|&q| b.readout_error(q)).collect();
    let bits: Vec<Vec<bool>> = keys.iter().map(|s| parse_bits(s)).collect();
    let a = DMatrix::from_fn(n, n, |x, y| {
        (0..width)
            .map(|j| if bits[x][j] != bits[y][j] { r[j] } else { 1.0 - r[j] })
            .product::<f64>()
    });
    let p = DVector::from_iterator(n, k.counts.values().map(|&v| v as f64 / k.shots as f64));
    let q = a.lu().solve(&p).ok_or(ExecutionError::Singular)?;
    if q.iter().any(|v| !v.is_finite()) {
        return Err(ExecutionError::Singular);
    }
    let clipped: Vec<f64> = q.iter().map(|v| v.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    if total <= 0.0 {
        return Err(ExecutionError::Singular);
    }
    Ok(PseudoDistribution {
        values: keys.into_iter().cloned().zip(clipped.into_iter().map(|v| v / total)).collect(),
        normalized: true,
    })
}
