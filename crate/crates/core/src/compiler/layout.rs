//! Initial placement of logical qubits onto physical qubits.

use std::collections::VecDeque;

use crate::backend::BackendModel;
use crate::circuit::Circuit;

use super::strategy::LayoutMethod;
use super::CompileError;

/// `layout[logical] = physical`.
pub type Layout = Vec<usize>;

fn check_capacity(c: &Circuit, b: &BackendModel) -> Result<(), CompileError> {
    if c.num_qubits > b.num_qubits() {
        return Err(CompileError::Capacity {
            circuit: c.num_qubits,
            backend: b.num_qubits(),
        });
    }
    Ok(())
}

/// Logical qubits by decreasing two-qubit activity, ties to the lower index.
fn activity_order(c: &Circuit) -> Vec<usize> {
    let deg = c.interaction_degree();
    let mut order: Vec<usize> = (0..c.num_qubits).collect();
    order.sort_by(|&a, &b| deg[b].cmp(&deg[a]).then(a.cmp(&b)));
    order
}

fn assign(logical_order: &[usize], physical_order: &[usize], n: usize) -> Layout {
    let mut layout = vec![0; n];
    for (&l, &p) in logical_order.iter().zip(physical_order) {
        layout[l] = p;
    }
    layout
}

/// Identity placement.
pub fn trivial_layout(c: &Circuit, b: &BackendModel) -> Result<Layout, CompileError> {
    check_capacity(c, b)?;
    Ok((0..c.num_qubits).collect())
}

/// Most active logical qubits onto the physical qubits with the highest
/// quality score `Q(p)`; ties on either side go to the lower index.
pub fn noise_aware_layout(c: &Circuit, b: &BackendModel) -> Result<Layout, CompileError> {
    check_capacity(c, b)?;
    let scores: Vec<f64> = (0..b.num_qubits()).map(|p| b.quality_score(p)).collect();
    let mut physical: Vec<usize> = (0..b.num_qubits()).collect();
    physical.sort_by(|&a, &p| scores[p].total_cmp(&scores[a]).then(a.cmp(&p)));
    Ok(assign(&activity_order(c), &physical, c.num_qubits))
}

/// Most active logical qubits onto a breadth-first walk of the coupling
/// graph from qubit 0, so busy qubits land on a connected region.
pub fn connected_layout(c: &Circuit, b: &BackendModel) -> Result<Layout, CompileError> {
    check_capacity(c, b)?;
    let mut seen = vec![false; b.num_qubits()];
    let mut walk = Vec::with_capacity(b.num_qubits());
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(u) = queue.pop_front() {
        walk.push(u);
        for &v in b.neighbors(u) {
            if !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    Ok(assign(&activity_order(c), &walk, c.num_qubits))
}

pub fn choose_layout(c: &Circuit, b: &BackendModel, method: LayoutMethod) -> Result<Layout, CompileError> {
    match method {
        LayoutMethod::Trivial => trivial_layout(c, b),
        LayoutMethod::NoiseAware => noise_aware_layout(c, b),
        LayoutMethod::Default => connected_layout(c, b),
    }
}
