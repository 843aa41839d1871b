//! Shot simulation of compiled circuits and count post-processing.

pub mod mitigation;
pub mod statevector;

use std::collections::{BTreeMap, BTreeSet};

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::backend::BackendModel;
use crate::circuit::{Circuit, CircuitError, Gate, GateKind};

pub use mitigation::{fold, parity_expectation, readout_mitigate, zne_counts, zne_extrapolate, ZneResult};
use statevector::StateVector;

pub const DEFAULT_MAX_QUBITS: usize = 14;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExecutionError {
    #[error("invalid circuit: {0}")]
    InvalidCircuit(#[from] CircuitError),
    #[error("circuit touches {qubits} qubits, simulator cap is {cap}")]
    TooWide { qubits: usize, cap: usize },
    #[error("circuit has no measurements")]
    NoMeasurements,
    #[error("gate {index} acts on a measured qubit; only terminal measurements are supported")]
    MidCircuitMeasurement { index: usize },
    #[error("shot count must be positive")]
    ZeroShots,
    #[error("bitstring width {got} does not match expected width {expected}")]
    WidthMismatch { expected: usize, got: usize },
    #[error("fold factor {0} is not an odd positive integer")]
    BadFoldFactor(u32),
    #[error("need at least {needed} distinct scale factors, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("non-finite value in extrapolation input")]
    NonFinite,
    #[error("{shots} shots cannot be split over {factors} scale factors")]
    TooFewShots { shots: u64, factors: usize },
    #[error("observed subspace of {0} bitstrings exceeds the cap of 1024")]
    SubspaceTooLarge(usize),
    #[error("restricted readout system is singular")]
    Singular,
}

/// Shot counts keyed by bitstring; leftmost character is the highest
/// measured clbit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub counts: BTreeMap<String, u64>,
    pub shots: u64,
}

impl Counts {
    pub fn from_map(counts: BTreeMap<String, u64>) -> Self {
        let shots = counts.values().sum();
        Counts { counts, shots }
    }

    pub fn width(&self) -> usize {
        self.counts.keys().next().map_or(0, |k| k.len())
    }

    pub fn probabilities(&self) -> BTreeMap<String, f64> {
        let n = self.shots as f64;
        self.counts.iter().map(|(k, &v)| (k.clone(), v as f64 / n)).collect()
    }

    /// Add `other` into `self`.
    pub fn absorb(&mut self, other: &Counts) {
        for (k, v) in &other.counts {
            *self.counts.entry(k.clone()).or_insert(0) += v;
        }
        self.shots += other.shots;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PseudoDistribution {
    pub values: BTreeMap<String, f64>,
    pub normalized: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    pub shots: u64,
    pub seed: u64,
    pub noisy: bool,
    pub max_qubits: usize,
}

impl RunOptions {
    pub fn new(shots: u64, seed: u64, noisy: bool) -> Self {
        RunOptions {
            shots,
            seed,
            noisy,
            max_qubits: DEFAULT_MAX_QUBITS,
        }
    }
}

/// Shannon entropy in bits of a probability map.
pub fn distribution_entropy(p: &BTreeMap<String, f64>) -> f64 {
    -p.values().filter(|&&x| x > 0.0).map(|&x| x * x.log2()).sum::<f64>()
}

pub fn entropy(k: &Counts) -> f64 {
    distribution_entropy(&k.probabilities())
}

pub fn top_probability(k: &Counts) -> f64 {
    k.counts.values().copied().max().unwrap_or(0) as f64 / k.shots as f64
}

/// Bitstring form of a clbit mask over `clbits` (ascending measured clbits).
pub fn mask_bitstring(mask: u64, clbits: &[usize]) -> String {
    clbits.iter().rev().map(|&cb| if mask >> cb & 1 == 1 { '1' } else { '0' }).collect()
}

/// XOR every key with `mask`.
pub fn untwirl(k: &Counts, mask: &str) -> Result<Counts, ExecutionError> {
    let width = k.width();
    if mask.len() != width {
        return Err(ExecutionError::WidthMismatch {
            expected: width,
            got: mask.len(),
        });
    }
    let counts = k
        .counts
        .iter()
        .map(|(key, &v)| {
            let flipped: String = key
                .chars()
                .zip(mask.chars())
                .map(|(a, m)| if (a == '1') != (m == '1') { '1' } else { '0' })
                .collect();
            (flipped, v)
        })
        .collect();
    Ok(Counts { counts, shots: k.shots })
}

/// Measured clbits in ascending order, each with the qubit that writes it
/// last.
pub fn measured_clbits(c: &Circuit) -> Vec<(usize, usize)> {
    let mut last: BTreeMap<usize, usize> = BTreeMap::new();
    for (q, cb) in c.measurements() {
        last.insert(cb, q);
    }
    last.into_iter().map(|(cb, q)| (q, cb)).collect()
}

struct Compact {
    circuit: Circuit,
    /// `physical[compact qubit]`
    physical: Vec<usize>,
}

/// Relabel the qubits `c` touches onto `0..k`.
fn compact(c: &Circuit) -> Compact {
    let used: BTreeSet<usize> = c.gates.iter().flat_map(|g| g.qubits.iter().copied()).collect();
    let physical: Vec<usize> = used.into_iter().collect();
    let mut index = vec![usize::MAX; c.num_qubits];
    for (i, &p) in physical.iter().enumerate() {
        index[p] = i;
    }
    let mut out = Circuit::new(c.name.clone(), physical.len().max(1), c.num_clbits);
    out.gates = c
        .gates
        .iter()
        .map(|g| Gate {
            qubits: g.qubits.iter().map(|&q| index[q]).collect(),
            ..g.clone()
        })
        .collect();
    Compact { circuit: out, physical }
}

/// Index of the first gate that acts on an already measured qubit, if any.
pub(crate) fn mid_circuit_measurement(c: &Circuit) -> Option<usize> {
    let mut measured = vec![false; c.num_qubits];
    for (i, g) in c.gates.iter().enumerate() {
        match g.name {
            GateKind::Barrier => {}
            GateKind::Measure => measured[g.qubits[0]] = true,
            _ if g.qubits.iter().any(|&q| measured[q]) => return Some(i),
            _ => {}
        }
    }
    None
}

fn check_runnable(c: &Circuit) -> Result<(), ExecutionError> {
    c.validate()?;
    if !c.has_measurements() {
        return Err(ExecutionError::NoMeasurements);
    }
    if let Some(index) = mid_circuit_measurement(c) {
        return Err(ExecutionError::MidCircuitMeasurement { index });
    }
    Ok(())
}

const PAULIS: [GateKind; 3] = [GateKind::X, GateKind::Y, GateKind::Z];

fn pauli(k: usize, q: usize) -> Option<Gate> {
    (k > 0).then(|| Gate::new(PAULIS[k - 1], &[q]))
}

/// Sample `shots` outcomes of `c` on `b`. Noisy mode draws one Pauli
/// trajectory per shot from the calibration error rates and flips each
/// measured bit with its readout error.
pub fn run(c: &Circuit, b: &BackendModel, opts: RunOptions) -> Result<Counts, ExecutionError> {
    check_runnable(c)?;
    if opts.shots == 0 {
        return Err(ExecutionError::ZeroShots);
    }
    let cc = compact(c);
    if cc.physical.len() > opts.max_qubits {
        return Err(ExecutionError::TooWide {
            qubits: cc.physical.len(),
            cap: opts.max_qubits,
        });
    }
    let circ = &cc.circuit;
    let phys = |q: usize| cc.physical[q];
    let meas = measured_clbits(circ);
    let width = meas.len();

    let base = statevector::simulate(circ).probabilities();
    let base_dist = WeightedIndex::new(&base).expect("normalised state");
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    let readout: Vec<f64> = meas.iter().map(|&(q, _)| b.readout_error(phys(q))).collect();
    let gate_error: Vec<f64> = circ
        .gates
        .iter()
        .map(|g| match g.name {
            GateKind::Barrier | GateKind::Measure => 0.0,
            k if k.is_two_qubit() => b.edge_error(phys(g.qubits[0]), phys(g.qubits[1])),
            _ => b.sq_error(phys(g.qubits[0])),
        })
        .collect();

    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    let mut faults: Vec<(usize, Vec<Gate>)> = Vec::new();
    for _ in 0..opts.shots {
        let index = if opts.noisy {
            faults.clear();
            for (i, (g, &e)) in circ.gates.iter().zip(&gate_error).enumerate() {
                if e > 0.0 && rng.gen::<f64>() < e {
                    let inserted: Vec<Gate> = if g.name.is_two_qubit() {
                        let k = rng.gen_range(1..16usize);
                        pauli(k & 3, g.qubits[0]).into_iter().chain(pauli(k >> 2, g.qubits[1])).collect()
                    } else {
                        pauli(rng.gen_range(1..4usize), g.qubits[0]).into_iter().collect()
                    };
                    faults.push((i, inserted));
                }
            }
            if faults.is_empty() {
                base_dist.sample(&mut rng)
            } else {
                let mut sv = StateVector::zero(circ.num_qubits);
                let mut next = faults.iter().peekable();
                for (i, g) in circ.gates.iter().enumerate() {
                    sv.apply(g);
                    while let Some((_, extra)) = next.next_if(|(j, _)| *j == i) {
                        extra.iter().for_each(|e| sv.apply(e));
                    }
                }
                WeightedIndex::new(sv.probabilities()).expect("normalised state").sample(&mut rng)
            }
        } else {
            base_dist.sample(&mut rng)
        };
        let mut key = vec![b'0'; width];
        for (j, &(q, _)) in meas.iter().enumerate() {
            let mut bit = index >> q & 1 == 1;
            if opts.noisy && rng.gen::<f64>() < readout[j] {
                bit = !bit;
            }
            if bit {
                key[width - 1 - j] = b'1';
            }
        }
        *counts.entry(String::from_utf8(key).expect("ascii")).or_insert(0) += 1;
    }
    Ok(Counts {
        counts,
        shots: opts.shots,
    })
}

/// Seed for the `index`-th sub-run derived from `seed`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::{fake_generic, resolve_backend, BackendModel, QubitCalibration};
    use crate::circuit::{bell, ghz3};

    fn noiseless_backend(n: usize) -> BackendModel {
        let edges: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
        let cal = QubitCalibration {
            readout_error: Some(0.0),
            sq_error: Some(0.0),
            ..Default::default()
        };
        let errors = edges.iter().map(|&e| (e, 0.0)).collect();
        BackendModel::new("clean", n, edges, vec![cal; n], errors).unwrap()
    }

    #[test]
    fn noiseless_bell_support() {
        let b = resolve_backend("fake:generic:5").unwrap();
        let k = run(&bell(), &b, RunOptions::new(1024, 3, false)).unwrap();
        assert_eq!(k.shots, 1024);
        assert!(k.counts.keys().all(|s| s == "00" || s == "11"));
        assert_eq!(k.counts.values().sum::<u64>(), 1024);
    }

    #[test]
    fn born_rule_within_five_sigma() {
        let b = resolve_backend("fake:generic:5").unwrap();
        let n = 100_000u64;
        let k = run(&bell(), &b, RunOptions::new(n, 11, false)).unwrap();
        let sigma = (0.25 / n as f64).sqrt();
        let f = k.counts["00"] as f64 / n as f64;
        assert!((f - 0.5).abs() < 5.0 * sigma);
    }

    #[test]
    fn zero_noise_matches_noiseless() {
        let b = noiseless_backend(3);
        let a = run(&ghz3(), &b, RunOptions::new(2000, 5, true)).unwrap();
        assert!(a.counts.keys().all(|s| s == "000" || s == "111"));
        let f = a.counts["000"] as f64 / 2000.0;
        assert!((f - 0.5).abs() < 5.0 * (0.25f64 / 2000.0).sqrt());
    }

    #[test]
    fn noisy_runs_are_deterministic_and_noisy() {
        let b = fake_generic("fake:generic:3", 3).unwrap();
        let a = run(&ghz3(), &b, RunOptions::new(4000, 9, true)).unwrap();
        assert_eq!(a, run(&ghz3(), &b, RunOptions::new(4000, 9, true)).unwrap());
        assert!(a.counts.len() > 2);
    }

    #[test]
    fn width_cap_and_measurement_checks() {
        let b = resolve_backend("fake:generic:5").unwrap();
        let mut opts = RunOptions::new(10, 0, false);
        opts.max_qubits = 2;
        assert!(matches!(run(&ghz3(), &b, opts), Err(ExecutionError::TooWide { qubits: 3, cap: 2 })));
        let mut c = Circuit::new("m", 1, 1);
        c.push(Gate::h(0));
        assert!(matches!(run(&c, &b, RunOptions::new(1, 0, false)), Err(ExecutionError::NoMeasurements)));
        c.push(Gate::measure(0, 0)).push(Gate::x(0));
        assert!(matches!(
            run(&c, &b, RunOptions::new(1, 0, false)),
            Err(ExecutionError::MidCircuitMeasurement { index: 2 })
        ));
    }

    #[test]
    fn idle_physical_qubits_are_compacted() {
        let b = resolve_backend("fake:generic:20").unwrap();
        let mut c = Circuit::new("wide", 20, 2);
        c.push(Gate::x(17)).push(Gate::measure(17, 1)).push(Gate::measure(3, 0));
        let k = run(&c, &b, RunOptions::new(50, 0, false)).unwrap();
        assert_eq!(k.counts.get("10"), Some(&50));
    }

    #[test]
    fn entropy_examples() {
        let k = Counts::from_map([("00".to_string(), 512), ("11".to_string(), 512)].into());
        assert_eq!(entropy(&k), 1.0);
        assert_eq!(top_probability(&k), 0.5);
        let one = Counts::from_map([("0".to_string(), 7)].into());
        assert_eq!(entropy(&one), 0.0);
        assert_eq!(top_probability(&one), 1.0);
        for n in 1..=4usize {
            let m: BTreeMap<String, u64> = (0..1usize << n).map(|i| (format!("{i:0n$b}"), 3)).collect();
            assert!((entropy(&Counts::from_map(m)) - n as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn untwirl_examples() {
        let k = Counts::from_map([("01".to_string(), 10)].into());
        assert_eq!(untwirl(&k, "00").unwrap(), k);
        assert_eq!(untwirl(&k, "11").unwrap().counts, [("10".to_string(), 10)].into());
        assert_eq!(untwirl(&untwirl(&k, "10").unwrap(), "10").unwrap(), k);
        assert!(untwirl(&k, "1").is_err());
        assert_eq!(mask_bitstring(0b01, &[0, 1]), "01");
        assert_eq!(mask_bitstring(0b100, &[0, 2]), "10");
    }

    #[test]
    fn derived_seeds_differ() {
        let s: BTreeSet<u64> = (0..100).map(|i| derive_seed(42, i)).collect();
        assert_eq!(s.len(), 100);
    }
}
