//! Compilation targets: coupling topology plus calibration numbers.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::canonical;

/// Used when a readout error is not calibrated.
pub const FALLBACK_READOUT_ERROR: f64 = 0.05;
/// Used when T1 is not calibrated, in microseconds.
pub const FALLBACK_T1: f64 = 50.0;
/// Used when T2 is not calibrated, in microseconds.
pub const FALLBACK_T2: f64 = 30.0;
/// Used when a single-qubit gate error is not calibrated.
pub const FALLBACK_SQ_ERROR: f64 = 5e-4;
/// Used when a two-qubit gate error is not calibrated.
pub const FALLBACK_EDGE_ERROR: f64 = 1e-2;

#[derive(Debug, thiserror::Error)]
pub enum BackendError {
    #[error("malformed backend spec `{0}` (expected `fake:generic:<N>` or `file:<path>`)")]
    MalformedSpec(String),
    #[error("backend needs at least 2 qubits, got {0}")]
    TooFewQubits(usize),
    #[error("cannot read backend file {path}: {reason}")]
    Unreadable { path: String, reason: String },
    #[error("invalid backend: {0}")]
    Invalid(String),
}

/// Per-qubit calibration. Absent fields fall back to fixed constants.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct QubitCalibration {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub readout_error: Option<f64>,
    /// Microseconds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t1: Option<f64>,
    /// Microseconds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sq_error: Option<f64>,
}

impl QubitCalibration {
    pub fn readout_error(&self) -> f64 {
        self.readout_error.unwrap_or(FALLBACK_READOUT_ERROR)
    }
    pub fn t1(&self) -> f64 {
        self.t1.unwrap_or(FALLBACK_T1)
    }
    pub fn t2(&self) -> f64 {
        self.t2.unwrap_or(FALLBACK_T2)
    }
    pub fn sq_error(&self) -> f64 {
        self.sq_error.unwrap_or(FALLBACK_SQ_ERROR)
    }

    fn validate(&self, q: usize) -> Result<(), BackendError> {
        let bad = |what: &str| Err(BackendError::Invalid(format!("qubit {q}: {what}")));
        for (label, p) in [("readout_error", self.readout_error), ("sq_error", self.sq_error)] {
            if let Some(p) = p {
                if !(0.0..=1.0).contains(&p) {
                    return bad(&format!("{label} {p} outside [0,1]"));
                }
            }
        }
        for (label, t) in [("t1", self.t1), ("t2", self.t2)] {
            if let Some(t) = t {
                if !t.is_finite() || t <= 0.0 {
                    return bad(&format!("{label} must be finite and positive"));
                }
            }
        }
        if let (Some(t1), Some(t2)) = (self.t1, self.t2) {
            if t2 > 2.0 * t1 {
                return bad("t2 exceeds 2*t1");
            }
        }
        Ok(())
    }
}

/// Serialized backend description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackendFile {
    pub name: String,
    pub num_qubits: usize,
    pub edges: Vec<[usize; 2]>,
    pub qubits: Vec<QubitCalibration>,
    #[serde(default)]
    pub edge_errors: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BackendModel {
    name: String,
    num_qubits: usize,
    edges: BTreeSet<(usize, usize)>,
    qubit_cal: Vec<QubitCalibration>,
    edge_error: BTreeMap<(usize, usize), f64>,
    neighbors: Vec<Vec<usize>>,
    distances: Vec<Vec<usize>>,
    calibration_id: String,
}

fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

impl BackendModel {
    pub fn new(
        name: impl Into<String>,
        num_qubits: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
        qubit_cal: Vec<QubitCalibration>,
        edge_error: BTreeMap<(usize, usize), f64>,
    ) -> Result<Self, BackendError> {
        if num_qubits < 2 {
            return Err(BackendError::TooFewQubits(num_qubits));
        }
        if qubit_cal.len() != num_qubits {
            return Err(BackendError::Invalid(format!(
                "{} qubit calibrations for {num_qubits} qubits",
                qubit_cal.len()
            )));
        }
        for (q, cal) in qubit_cal.iter().enumerate() {
            cal.validate(q)?;
        }
        let mut edge_set = BTreeSet::new();
        for (a, b) in edges {
            if a == b {
                return Err(BackendError::Invalid(format!("self-loop on qubit {a}")));
            }
            if a >= num_qubits || b >= num_qubits {
                return Err(BackendError::Invalid(format!("edge ({a},{b}) out of range")));
            }
            edge_set.insert(edge_key(a, b));
        }
        let mut normalized_errors = BTreeMap::new();
        for ((a, b), e) in edge_error {
            let key = edge_key(a, b);
            if !edge_set.contains(&key) {
                return Err(BackendError::Invalid(format!("edge error for non-edge ({a},{b})")));
            }
            if !(0.0..=1.0).contains(&e) {
                return Err(BackendError::Invalid(format!("edge error {e} outside [0,1]")));
            }
            normalized_errors.insert(key, e);
        }
        let mut neighbors = vec![Vec::new(); num_qubits];
        for &(a, b) in &edge_set {
            neighbors[a].push(b);
            neighbors[b].push(a);
        }
        for n in &mut neighbors {
            n.sort_unstable();
        }
        let distances: Vec<Vec<usize>> = (0..num_qubits).map(|s| bfs_distances(&neighbors, s)).collect();
        if distances[0].contains(&usize::MAX) {
            return Err(BackendError::Invalid("coupling graph is not connected".into()));
        }
        let mut model = BackendModel {
            name: name.into(),
            num_qubits,
            edges: edge_set,
            qubit_cal,
            edge_error: normalized_errors,
            neighbors,
            distances,
            calibration_id: String::new(),
        };
        model.calibration_id = model.compute_calibration_id();
        Ok(model)
    }

    fn compute_calibration_id(&self) -> String {
        let file = self.to_file();
        let mut h = Sha256::new();
        h.update(canonical::to_canonical_string(&(&file.edges, &file.qubits, &file.edge_errors)));
        hex::encode(h.finalize())
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }
    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }
    pub fn calibration(&self, q: usize) -> QubitCalibration {
        self.qubit_cal.get(q).copied().unwrap_or_default()
    }
    /// Digest over topology and every calibration value.
    pub fn calibration_id(&self) -> &str {
        &self.calibration_id
    }
    pub fn neighbors(&self, q: usize) -> &[usize] {
        &self.neighbors[q]
    }
    pub fn is_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&edge_key(a, b))
    }
    /// Hop distance on the coupling graph.
    pub fn distance(&self, a: usize, b: usize) -> usize {
        self.distances[a][b]
    }

    /// Two-qubit error for a coupled pair, or the fallback constant.
    pub fn edge_error(&self, a: usize, b: usize) -> f64 {
        self.edge_error
            .get(&edge_key(a, b))
            .copied()
            .unwrap_or(FALLBACK_EDGE_ERROR)
    }

    pub fn readout_error(&self, q: usize) -> f64 {
        self.calibration(q).readout_error()
    }

    pub fn sq_error(&self, q: usize) -> f64 {
        self.calibration(q).sq_error()
    }

    /// `Q(p) = (1 - r_p) + 1e-5 * (T1_p + T2_p)`, with fallbacks for missing fields.
    pub fn quality_score(&self, p: usize) -> f64 {
        quality_score(&self.calibration(p))
    }

    /// Minimum-hop path from `p` to `q`, both endpoints included. BFS visits
    /// neighbours in ascending index order, so ties go to the lowest index.
    pub fn shortest_path(&self, p: usize, q: usize) -> Vec<usize> {
        if p == q {
            return vec![p];
        }
        let mut parent = vec![usize::MAX; self.num_qubits];
        let mut seen = vec![false; self.num_qubits];
        let mut queue = VecDeque::from([p]);
        seen[p] = true;
        while let Some(u) = queue.pop_front() {
            if u == q {
                break;
            }
            for &v in &self.neighbors[u] {
                if !seen[v] {
                    seen[v] = true;
                    parent[v] = u;
                    queue.push_back(v);
                }
            }
        }
        let mut path = vec![q];
        let mut cur = q;
        while cur != p {
            cur = parent[cur];
            path.push(cur);
        }
        path.reverse();
        path
    }

    pub fn to_file(&self) -> BackendFile {
        BackendFile {
            name: self.name.clone(),
            num_qubits: self.num_qubits,
            edges: self.edges.iter().map(|&(a, b)| [a, b]).collect(),
            qubits: self.qubit_cal.clone(),
            edge_errors: self
                .edge_error
                .iter()
                .map(|(&(a, b), &e)| (format!("{a}-{b}"), e))
                .collect(),
        }
    }

    pub fn from_file(file: BackendFile) -> Result<Self, BackendError> {
        let mut errors = BTreeMap::new();
        for (key, e) in file.edge_errors {
            let parsed = key
                .split_once('-')
                .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)));
            let (a, b) = parsed.ok_or_else(|| BackendError::Invalid(format!("bad edge key `{key}`")))?;
            errors.insert((a, b), e);
        }
        BackendModel::new(
            file.name,
            file.num_qubits,
            file.edges.into_iter().map(|[a, b]| (a, b)),
            file.qubits,
            errors,
        )
    }
}

pub fn quality_score(cal: &QubitCalibration) -> f64 {
    (1.0 - cal.readout_error()) + 1e-5 * (cal.t1() + cal.t2())
}

fn bfs_distances(neighbors: &[Vec<usize>], source: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; neighbors.len()];
    dist[source] = 0;
    let mut queue = VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        for &v in &neighbors[u] {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}

/// Ring backend with calibration drawn from a generator seeded by the spec string.
pub fn fake_generic(spec: &str, n: usize) -> Result<BackendModel, BackendError> {
    if n < 2 {
        return Err(BackendError::TooFewQubits(n));
    }
    let seed: [u8; 32] = Sha256::digest(spec.as_bytes()).into();
    let mut rng = ChaCha8Rng::from_seed(seed);
    let qubits = (0..n)
        .map(|_| {
            let t1 = rng.gen_range(50.0..=150.0);
            let t2 = rng.gen_range(30.0..=f64::min(120.0, 2.0 * t1));
            QubitCalibration {
                readout_error: Some(rng.gen_range(0.01..=0.05)),
                t1: Some(t1),
                t2: Some(t2),
                sq_error: Some(rng.gen_range(1e-4..=1e-3)),
            }
        })
        .collect();
    let edges: BTreeSet<(usize, usize)> = (0..n).map(|i| edge_key(i, (i + 1) % n)).collect();
    let errors = edges.iter().map(|&e| (e, rng.gen_range(5e-3..=2e-2))).collect();
    BackendModel::new(spec, n, edges, qubits, errors)
}

/// Resolve `fake:generic:<N>` or `file:<path>` into a backend.
pub fn resolve_backend(spec: &str) -> Result<BackendModel, BackendError> {
    if let Some(n) = spec.strip_prefix("fake:generic:") {
        let n: usize = n.parse().map_err(|_| BackendError::MalformedSpec(spec.to_string()))?;
        return fake_generic(spec, n);
    }
    if let Some(path) = spec.strip_prefix("file:") {
        return load_backend_file(Path::new(path));
    }
    Err(BackendError::MalformedSpec(spec.to_string()))
}

pub fn load_backend_file(path: &Path) -> Result<BackendModel, BackendError> {
    let unreadable = |reason: String| BackendError::Unreadable {
        path: path.display().to_string(),
        reason,
    };
    let text = fs::read_to_string(path).map_err(|e| unreadable(e.to_string()))?;
    let file: BackendFile = serde_json::from_str(&text).map_err(|e| unreadable(e.to_string()))?;
    BackendModel::from_file(file)
}
