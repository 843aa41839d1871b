//! Peephole clean-up of native circuits.
//!
//! Level 0 is the identity. Level 1 cancels wire-adjacent self-inverse
//! pairs (`x x`, `cx cx` on the same ordered operands) and drops `rz(0)`.
//! Level 2 also merges wire-adjacent `rz` rotations. Level 3 repeats level 2
//! until the gate list stops changing.

use std::f64::consts::{PI, TAU};

use crate::circuit::{Circuit, Gate, GateKind};

const ANGLE_EPS: f64 = 1e-12;

/// Wrap into `(-pi, pi]`.
fn wrap_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

fn is_zero_angle(a: f64) -> bool {
    let w = wrap_angle(a).abs();
    w < ANGLE_EPS || (TAU - w) < ANGLE_EPS
}

fn pass(c: &Circuit, merge_rz: bool) -> Circuit {
    let mut slots: Vec<Option<Gate>> = Vec::with_capacity(c.gates.len());
    // Live gate indices per qubit, most recent last.
    let mut stacks: Vec<Vec<usize>> = vec![Vec::new(); c.num_qubits];

    let shared_top = |stacks: &Vec<Vec<usize>>, g: &Gate| -> Option<usize> {
        let first = *stacks[g.qubits[0]].last()?;
        g.qubits[1..]
            .iter()
            .all(|&q| stacks[q].last() == Some(&first))
            .then_some(first)
    };

    for g in &c.gates {
        if g.name == GateKind::Rz {
            if is_zero_angle(g.angle()) {
                continue;
            }
            if merge_rz {
                if let Some(j) = shared_top(&stacks, g) {
                    if let Some(prev) = slots[j].as_mut().filter(|p| p.name == GateKind::Rz) {
                        let merged = wrap_angle(prev.angle() + g.angle());
                        if is_zero_angle(merged) {
                            slots[j] = None;
                            stacks[g.qubits[0]].pop();
                        } else {
                            prev.params[0] = merged;
                        }
                        continue;
                    }
                }
            }
        }
        if matches!(g.name, GateKind::X | GateKind::Cx) {
            if let Some(j) = shared_top(&stacks, g) {
                if slots[j].as_ref().is_some_and(|p| p.name == g.name && p.qubits == g.qubits) {
                    slots[j] = None;
                    for &q in &g.qubits {
                        stacks[q].pop();
                    }
                    continue;
                }
            }
        }
        let idx = slots.len();
        slots.push(Some(g.clone()));
        for &q in &g.qubits {
            stacks[q].push(idx);
        }
    }

    let mut out = c.empty_like();
    out.gates = slots.into_iter().flatten().collect();
    out
}

pub fn optimize(c: &Circuit, level: u8) -> Circuit {
    match level {
        0 => c.clone(),
        1 => pass(c, false),
        2 => pass(c, true),
        _ => {
            let mut cur = pass(c, true);
            loop {
                let next = pass(&cur, true);
                if next == cur {
                    return cur;
                }
                cur = next;
            }
        }
    }
}
