//! Rewriting into the native basis `{rz, sx, x, cx}`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use crate::circuit::{Circuit, Gate, GateKind};

fn hadamard(q: usize, out: &mut Vec<Gate>) {
    out.extend([Gate::rz(q, FRAC_PI_2), Gate::sx(q), Gate::rz(q, FRAC_PI_2)]);
}

fn rx(q: usize, theta: f64, out: &mut Vec<Gate>) {
    hadamard(q, out);
    out.push(Gate::rz(q, theta));
    hadamard(q, out);
}

/// Native expansion of one gate, in time order. Every entry equals the
/// original gate up to global phase.
pub fn decompose(g: &Gate) -> Vec<Gate> {
    let mut out = Vec::new();
    match g.name {
        GateKind::X | GateKind::Sx | GateKind::Rz | GateKind::Cx | GateKind::Barrier | GateKind::Measure => {
            out.push(g.clone())
        }
        GateKind::H => hadamard(g.qubits[0], &mut out),
        // X * Rz(pi) = -Y
        GateKind::Y => out.extend([Gate::rz(g.qubits[0], PI), Gate::x(g.qubits[0])]),
        GateKind::Z => out.push(Gate::rz(g.qubits[0], PI)),
        GateKind::S => out.push(Gate::rz(g.qubits[0], FRAC_PI_2)),
        GateKind::Sdg => out.push(Gate::rz(g.qubits[0], -FRAC_PI_2)),
        GateKind::T => out.push(Gate::rz(g.qubits[0], FRAC_PI_4)),
        GateKind::Rx => rx(g.qubits[0], g.angle(), &mut out),
        // Ry = S Rx S^dagger
        GateKind::Ry => {
            let q = g.qubits[0];
            out.push(Gate::rz(q, -FRAC_PI_2));
            rx(q, g.angle(), &mut out);
            out.push(Gate::rz(q, FRAC_PI_2));
        }
        GateKind::Cz => {
            let (a, b) = (g.qubits[0], g.qubits[1]);
            hadamard(b, &mut out);
            out.push(Gate::cx(a, b));
            hadamard(b, &mut out);
        }
        GateKind::Swap => {
            let (a, b) = (g.qubits[0], g.qubits[1]);
            out.extend([Gate::cx(a, b), Gate::cx(b, a), Gate::cx(a, b)]);
        }
    }
    out
}

pub fn translate(c: &Circuit) -> Circuit {
    let mut out = c.empty_like();
    out.gates = c.gates.iter().flat_map(decompose).collect();
    out
}
