//! Swap insertion so every two-qubit gate acts on a coupled pair.

use crate::backend::BackendModel;
use crate::circuit::{Circuit, Gate};

use super::layout::Layout;
use super::strategy::RoutingMethod;

/// Pending two-qubit gates considered by the lookahead router, current gate included.
const LOOKAHEAD_WINDOW: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct RoutedCircuit {
    /// Circuit over physical qubits (backend width).
    pub circuit: Circuit,
    /// `final_layout[logical]` = physical qubit holding it after the last gate.
    pub final_layout: Layout,
    pub swaps_inserted: usize,
}

/// Bijection between virtual qubits (logical ones first, then ancillas) and
/// physical qubits.
struct Mapping {
    v2p: Vec<usize>,
    p2v: Vec<usize>,
}

impl Mapping {
    fn new(layout: &[usize], num_physical: usize) -> Self {
        let mut v2p = layout.to_vec();
        let used: std::collections::HashSet<usize> = layout.iter().copied().collect();
        v2p.extend((0..num_physical).filter(|p| !used.contains(p)));
        let mut p2v = vec![0; num_physical];
        for (v, &p) in v2p.iter().enumerate() {
            p2v[p] = v;
        }
        Mapping { v2p, p2v }
    }

    fn swap_physical(&mut self, a: usize, b: usize) {
        let (va, vb) = (self.p2v[a], self.p2v[b]);
        self.p2v.swap(a, b);
        self.v2p[va] = b;
        self.v2p[vb] = a;
    }
}

fn window_cost(gates: &[&Gate], mapping: &Mapping, b: &BackendModel) -> usize {
    gates
        .iter()
        .map(|g| b.distance(mapping.v2p[g.qubits[0]], mapping.v2p[g.qubits[1]]))
        .sum()
}

/// Route `c` (logical qubits) onto `b` starting from `layout`.
///
/// `Basic` walks the first operand along the shortest path toward the second.
/// `Lookahead` picks, at each step, between swapping at the first or the last
/// hop of that path, whichever gives the smaller total distance over the
/// next pending two-qubit gates (ties keep the basic move).
pub fn route(c: &Circuit, b: &BackendModel, layout: &[usize], method: RoutingMethod) -> RoutedCircuit {
    let mut mapping = Mapping::new(layout, b.num_qubits());
    let mut out = Circuit::new(c.name.clone(), b.num_qubits(), c.num_clbits);
    out.metadata = c.metadata.clone();
    let two_qubit_positions: Vec<usize> = c
        .gates
        .iter()
        .enumerate()
        .filter(|(_, g)| g.name.is_two_qubit())
        .map(|(i, _)| i)
        .collect();
    let mut next_2q = 0usize;
    let mut swaps = 0usize;

    for (idx, gate) in c.gates.iter().enumerate() {
        if gate.name.is_two_qubit() {
            while two_qubit_positions[next_2q] < idx {
                next_2q += 1;
            }
            let window: Vec<&Gate> = two_qubit_positions[next_2q..]
                .iter()
                .take(LOOKAHEAD_WINDOW)
                .map(|&i| &c.gates[i])
                .collect();
            let (va, vb) = (gate.qubits[0], gate.qubits[1]);
            while !b.is_edge(mapping.v2p[va], mapping.v2p[vb]) {
                let path = b.shortest_path(mapping.v2p[va], mapping.v2p[vb]);
                let basic = (path[0], path[1]);
                let chosen = match method {
                    RoutingMethod::Basic => basic,
                    RoutingMethod::Lookahead => {
                        let k = path.len() - 1;
                        let alt = (path[k - 1], path[k]);
                        mapping.swap_physical(basic.0, basic.1);
                        let basic_cost = window_cost(&window, &mapping, b);
                        mapping.swap_physical(basic.0, basic.1);
                        mapping.swap_physical(alt.0, alt.1);
                        let alt_cost = window_cost(&window, &mapping, b);
                        mapping.swap_physical(alt.0, alt.1);
                        if alt_cost < basic_cost {
                            alt
                        } else {
                            basic
                        }
                    }
                };
                out.push(Gate::swap(chosen.0, chosen.1));
                mapping.swap_physical(chosen.0, chosen.1);
                swaps += 1;
            }
        }
        let mut mapped = gate.clone();
        for q in &mut mapped.qubits {
            *q = mapping.v2p[*q];
        }
        out.push(mapped);
    }

    RoutedCircuit {
        circuit: out,
        final_layout: mapping.v2p[..c.num_qubits].to_vec(),
        swaps_inserted: swaps,
    }
}
