//! Gate-level dynamical decoupling: identity sequences in idle windows.

use std::f64::consts::PI;

use crate::circuit::{Circuit, Gate, GateKind};

use super::strategy::DdSequence;

/// Native gates of one decoupling sequence on `q`; their product is the
/// identity up to global phase.
pub fn sequence_gates(seq: DdSequence, q: usize) -> Vec<Gate> {
    match seq {
        DdSequence::XX => vec![Gate::x(q), Gate::x(q)],
        // X Y X Y, with Y = X Rz(pi) up to phase.
        DdSequence::XY4 => vec![
            Gate::x(q),
            Gate::rz(q, PI),
            Gate::x(q),
            Gate::x(q),
            Gate::rz(q, PI),
            Gate::x(q),
        ],
    }
}

/// Fill every idle window between two operations on the same qubit with one
/// copy of `seq`, starting right after the earlier operation. Windows
/// shorter than the sequence are left alone, so depth never changes.
pub fn insert_dd(c: &Circuit, seq: DdSequence) -> Circuit {
    let seq_len = sequence_gates(seq, 0).len();
    let (layers, _) = c.layers();

    let mut last_layer: Vec<Option<usize>> = vec![None; c.num_qubits];
    // (layer, qubit, position within the sequence)
    let mut inserted: Vec<(usize, usize, usize)> = Vec::new();
    for (g, &layer) in c.gates.iter().zip(&layers) {
        if g.name == GateKind::Barrier {
            continue;
        }
        for &q in &g.qubits {
            if let Some(prev) = last_layer[q] {
                let idle = layer - prev - 1;
                if idle >= seq_len.max(2) {
                    inserted.extend((0..seq_len).map(|k| (prev + 1 + k, q, k)));
                }
            }
            last_layer[q] = Some(layer);
        }
    }
    if inserted.is_empty() {
        return c.clone();
    }

    // Sort key: (layer, originals before insertions, tie-break).
    let mut keyed: Vec<((usize, u8, usize, usize), Gate)> = c
        .gates
        .iter()
        .zip(&layers)
        .enumerate()
        .map(|(i, (g, &l))| ((l, 0, i, 0), g.clone()))
        .collect();
    for (layer, q, k) in inserted {
        keyed.push(((layer, 1, q, k), sequence_gates(seq, q)[k].clone()));
    }
    keyed.sort_by_key(|(k, _)| *k);

    let mut out = c.empty_like();
    out.gates = keyed.into_iter().map(|(_, g)| g).collect();
    out
}
