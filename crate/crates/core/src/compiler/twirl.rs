//! Pauli twirling of `cx` gates and measurement twirling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{Circuit, Gate, GateKind};

use super::CompileError;

/// Pauli as `(x, z)` bits: I=(0,0), X=(1,0), Z=(0,1), Y=(1,1).
type Pauli = (bool, bool);

fn pauli_gate(p: Pauli, q: usize) -> Option<Gate> {
    let kind = match p {
        (false, false) => return None,
        (true, false) => GateKind::X,
        (false, true) => GateKind::Z,
        (true, true) => GateKind::Y,
    };
    Some(Gate::new(kind, &[q]))
}

/// Conjugate `P_c (x) P_t` through `cx(c, t)`: X_c -> X_c X_t, Z_t -> Z_c Z_t.
pub fn propagate_through_cx(control: Pauli, target: Pauli) -> (Pauli, Pauli) {
    let (xc, zc) = control;
    let (xt, zt) = target;
    ((xc, zc ^ zt), (xt ^ xc, zt))
}

fn twirl_once(c: &Circuit, rng: &mut ChaCha8Rng) -> Circuit {
    let mut out = c.empty_like();
    for g in &c.gates {
        if g.name != GateKind::Cx {
            out.push(g.clone());
            continue;
        }
        let (ctl, tgt) = (g.qubits[0], g.qubits[1]);
        let draw: u8 = rng.gen_range(0..16);
        let pre_c = (draw & 1 == 1, draw & 2 == 2);
        let pre_t = (draw & 4 == 4, draw & 8 == 8);
        let (post_c, post_t) = propagate_through_cx(pre_c, pre_t);
        out.gates.extend(pauli_gate(pre_c, ctl));
        out.gates.extend(pauli_gate(pre_t, tgt));
        out.push(g.clone());
        out.gates.extend(pauli_gate(post_c, ctl));
        out.gates.extend(pauli_gate(post_t, tgt));
    }
    out
}

/// `count` twirled copies of `c`. Every `cx` is wrapped by a uniformly drawn
/// Pauli pair and its exact correction, so each copy equals `c` up to
/// global phase.
pub fn pauli_twirl_ensemble(c: &Circuit, count: usize, seed: u64) -> Vec<Circuit> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| twirl_once(c, &mut rng)).collect()
}

/// Insert `x` right before every measurement whose clbit is set in `mask`.
pub fn apply_measurement_flips(c: &Circuit, mask: u64) -> Circuit {
    let mut out = c.empty_like();
    for g in &c.gates {
        if g.name == GateKind::Measure {
            let cb = g.clbit.unwrap_or(0);
            if mask >> cb & 1 == 1 {
                out.push(Gate::x(g.qubits[0]));
            }
        }
        out.push(g.clone());
    }
    out
}

/// `count` variants, each flipping a seeded random subset of measured bits.
/// The returned mask has bit `i` set when clbit `i` was flipped.
pub fn measurement_twirl_variants(
    c: &Circuit,
    count: usize,
    seed: u64,
) -> Result<Vec<(Circuit, u64)>, CompileError> {
    let measured: Vec<usize> = c.measurements().into_iter().map(|(_, cb)| cb).collect();
    if measured.is_empty() {
        return Err(CompileError::NoMeasurements);
    }
    if c.num_clbits > 64 {
        return Err(CompileError::TooManyClbits(c.num_clbits));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count)
        .map(|_| {
            let mask = measured
                .iter()
                .filter(|_| rng.gen_bool(0.5))
                .fold(0u64, |m, &cb| m | (1 << cb));
            (apply_measurement_flips(c, mask), mask)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{bell, qft4};
    use crate::compiler::translate::translate;
    use crate::executor::statevector::{exact_distribution, simulate, StateVector};

    #[test]
    fn propagation_table_is_exact() {
        // For all 16 pre-pairs, (post) * cx * (pre) must equal cx up to phase.
        for draw in 0u8..16 {
            let pre_c = (draw & 1 == 1, draw & 2 == 2);
            let pre_t = (draw & 4 == 4, draw & 8 == 8);
            let (post_c, post_t) = propagate_through_cx(pre_c, pre_t);
            let mut wrapped: Vec<Gate> = Vec::new();
            wrapped.extend(pauli_gate(pre_c, 0));
            wrapped.extend(pauli_gate(pre_t, 1));
            wrapped.push(Gate::cx(0, 1));
            wrapped.extend(pauli_gate(post_c, 0));
            wrapped.extend(pauli_gate(post_t, 1));
            for basis in 0..4usize {
                let mut a = StateVector::zero(2);
                let mut b = StateVector::zero(2);
                // Prepare a generic state so phases matter.
                let prep = [Gate::h(0), Gate::rz(0, 0.3 + basis as f64), Gate::h(1), Gate::rz(1, 0.7 * basis as f64)];
                for g in &prep {
                    a.apply(g);
                    b.apply(g);
                }
                a.apply(&Gate::cx(0, 1));
                for g in &wrapped {
                    b.apply(g);
                }
                assert!(a.overlap(&b) > 1.0 - 1e-12, "draw {draw}");
            }
        }
    }

    #[test]
    fn no_cx_gives_identical_copies() {
        let mut c = Circuit::new("c", 1, 0);
        c.push(Gate::h(0));
        let e = pauli_twirl_ensemble(&c, 3, 1);
        assert_eq!(e.len(), 3);
        assert!(e.iter().all(|m| m == &c));
    }

    #[test]
    fn members_preserve_semantics_and_are_deterministic() {
        let c = translate(&qft4());
        let e = pauli_twirl_ensemble(&c, 6, 42);
        let reference = simulate(&c);
        for m in &e {
            assert!(simulate(m).overlap(&reference) > 1.0 - 1e-10);
        }
        assert_eq!(e, pauli_twirl_ensemble(&c, 6, 42));
        assert_ne!(e, pauli_twirl_ensemble(&c, 6, 43));
    }

    #[test]
    fn measurement_variants() {
        let c = bell();
        assert_eq!(apply_measurement_flips(&c, 0), c);
        let v = measurement_twirl_variants(&c, 8, 5).unwrap();
        assert_eq!(v, measurement_twirl_variants(&c, 8, 5).unwrap());
        for (circ, mask) in &v {
            assert!(*mask < 4);
            let flipped = exact_distribution(circ);
            // Undo the flips classically and compare with the original.
            let restored: std::collections::BTreeMap<String, f64> = flipped
                .into_iter()
                .map(|(k, p)| {
                    let bits: String = k
                        .chars()
                        .rev()
                        .enumerate()
                        .map(|(i, ch)| if mask >> i & 1 == 1 { if ch == '0' { '1' } else { '0' } } else { ch })
                        .collect::<Vec<_>>()
                        .into_iter()
                        .rev()
                        .collect();
                    (bits, p)
                })
                .collect();
            let orig = exact_distribution(&c);
            for (k, p) in orig {
                assert!((restored[&k] - p).abs() < 1e-12);
            }
        }
        let mut none = Circuit::new("n", 1, 0);
        none.push(Gate::h(0));
        assert!(matches!(measurement_twirl_variants(&none, 2, 0), Err(CompileError::NoMeasurements)));
    }
}
