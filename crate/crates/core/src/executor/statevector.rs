//! Dense statevector evolution. Qubit `q` is bit `q` of the basis index.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::circuit::{Circuit, Gate, GateKind};

type Mat2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// 2x2 matrix of a single-qubit unitary gate.
pub fn single_qubit_matrix(kind: GateKind, angle: f64) -> Option<Mat2> {
    let h = FRAC_1_SQRT_2;
    let m = match kind {
        GateKind::H => [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]],
        GateKind::X => [[ZERO, ONE], [ONE, ZERO]],
        GateKind::Y => [[ZERO, -I], [I, ZERO]],
        GateKind::Z => [[ONE, ZERO], [ZERO, -ONE]],
        GateKind::S => [[ONE, ZERO], [ZERO, I]],
        GateKind::Sdg => [[ONE, ZERO], [ZERO, -I]],
        GateKind::T => [[ONE, ZERO], [ZERO, Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4)]],
        GateKind::Sx => [[c(0.5, 0.5), c(0.5, -0.5)], [c(0.5, -0.5), c(0.5, 0.5)]],
        GateKind::Rx => {
            let (s, co) = (angle / 2.0).sin_cos();
            [[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]]
        }
        GateKind::Ry => {
            let (s, co) = (angle / 2.0).sin_cos();
            [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]]
        }
        GateKind::Rz => [
            [Complex64::from_polar(1.0, -angle / 2.0), ZERO],
            [ZERO, Complex64::from_polar(1.0, angle / 2.0)],
        ],
        _ => return None,
    };
    Some(m)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn zero(num_qubits: usize) -> Self {
        let mut amps = vec![ZERO; 1usize << num_qubits];
        amps[0] = ONE;
        StateVector { num_qubits, amps }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn apply_matrix(&mut self, q: usize, m: &Mat2) {
        let bit = 1usize << q;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let a0 = self.amps[i];
                let a1 = self.amps[i | bit];
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    fn apply_cx(&mut self, control: usize, target: usize) {
        let (cb, tb) = (1usize << control, 1usize << target);
        for i in 0..self.amps.len() {
            if i & cb != 0 && i & tb == 0 {
                self.amps.swap(i, i | tb);
            }
        }
    }

    fn apply_cz(&mut self, a: usize, b: usize) {
        let mask = (1usize << a) | (1usize << b);
        for (i, amp) in self.amps.iter_mut().enumerate() {
            if i & mask == mask {
                *amp = -*amp;
            }
        }
    }

    fn apply_swap(&mut self, a: usize, b: usize) {
        let (ab, bb) = (1usize << a, 1usize << b);
        for i in 0..self.amps.len() {
            if i & ab != 0 && i & bb == 0 {
                self.amps.swap(i, (i & !ab) | bb);
            }
        }
    }

    /// Apply a unitary gate; barriers and measurements are ignored.
    pub fn apply(&mut self, g: &Gate) {
        match g.name {
            GateKind::Barrier | GateKind::Measure => {}
            GateKind::Cx => self.apply_cx(g.qubits[0], g.qubits[1]),
            GateKind::Cz => self.apply_cz(g.qubits[0], g.qubits[1]),
            GateKind::Swap => self.apply_swap(g.qubits[0], g.qubits[1]),
            k => {
                let m = single_qubit_matrix(k, g.angle()).expect("single-qubit unitary");
                self.apply_matrix(g.qubits[0], &m);
            }
        }
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `|<self|other>|`, which is 1 exactly when the states agree up to global phase.
    pub fn overlap(&self, other: &StateVector) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            .norm()
    }
}

/// Evolve the unitary part of `c` from `|0...0>`.
pub fn simulate(c: &Circuit) -> StateVector {
    let mut sv = StateVector::zero(c.num_qubits);
    for g in &c.gates {
        sv.apply(g);
    }
    sv
}

/// Map a basis index to its classical bitstring under `measurements`
/// (`(qubit, clbit)` pairs); leftmost character is the highest clbit.
pub fn bitstring_for(index: usize, measurements: &[(usize, usize)], num_clbits: usize) -> String {
    let mut bits = vec![b'0'; num_clbits];
    for &(q, cb) in measurements {
        if index >> q & 1 == 1 {
            bits[num_clbits - 1 - cb] = b'1';
        } else {
            bits[num_clbits - 1 - cb] = b'0';
        }
    }
    String::from_utf8(bits).expect("ascii")
}

/// Exact outcome distribution over classical registers, treating every
/// measurement as terminal.
pub fn exact_distribution(c: &Circuit) -> BTreeMap<String, f64> {
    let probs = simulate(c).probabilities();
    let meas = c.measurements();
    let mut out = BTreeMap::new();
    for (i, p) in probs.into_iter().enumerate() {
        if p > 0.0 {
            *out.entry(bitstring_for(i, &meas, c.num_clbits)).or_insert(0.0) += p;
        }
    }
    out
}

/// Total variation distance between two distributions given as maps.
pub fn total_variation(a: &BTreeMap<String, f64>, b: &BTreeMap<String, f64>) -> f64 {
    let keys: std::collections::BTreeSet<&String> = a.keys().chain(b.keys()).collect();
    0.5 * keys
        .into_iter()
        .map(|k| (a.get(k).copied().unwrap_or(0.0) - b.get(k).copied().unwrap_or(0.0)).abs())
        .sum::<f64>()
}
