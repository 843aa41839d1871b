//! Gate-level circuit representation and structural metrics.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::canonical;

/// Supported gate identifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateKind {
    H,
    X,
    Y,
    Z,
    S,
    Sdg,
    T,
    Sx,
    Rx,
    Ry,
    Rz,
    Cx,
    Cz,
    Swap,
    Barrier,
    Measure,
}

impl GateKind {
    pub const ALL: [GateKind; 16] = [
        GateKind::H,
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::S,
        GateKind::Sdg,
        GateKind::T,
        GateKind::Sx,
        GateKind::Rx,
        GateKind::Ry,
        GateKind::Rz,
        GateKind::Cx,
        GateKind::Cz,
        GateKind::Swap,
        GateKind::Barrier,
        GateKind::Measure,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            GateKind::H => "h",
            GateKind::X => "x",
            GateKind::Y => "y",
            GateKind::Z => "z",
            GateKind::S => "s",
            GateKind::Sdg => "sdg",
            GateKind::T => "t",
            GateKind::Sx => "sx",
            GateKind::Rx => "rx",
            GateKind::Ry => "ry",
            GateKind::Rz => "rz",
            GateKind::Cx => "cx",
            GateKind::Cz => "cz",
            GateKind::Swap => "swap",
            GateKind::Barrier => "barrier",
            GateKind::Measure => "measure",
        }
    }

    /// Number of angle parameters the gate carries.
    pub fn num_params(self) -> usize {
        match self {
            GateKind::Rx | GateKind::Ry | GateKind::Rz => 1,
            _ => 0,
        }
    }

    /// Fixed operand count; `None` for barriers, which accept any width.
    pub fn num_qubits(self) -> Option<usize> {
        match self {
            GateKind::Barrier => None,
            GateKind::Cx | GateKind::Cz | GateKind::Swap => Some(2),
            _ => Some(1),
        }
    }

    pub fn is_two_qubit(self) -> bool {
        self.num_qubits() == Some(2)
    }

    /// Unitary gates: everything except barriers and measurements.
    pub fn is_unitary(self) -> bool {
        !matches!(self, GateKind::Barrier | GateKind::Measure)
    }

    /// Members of the native basis `{rz, sx, x, cx}` plus measure/barrier.
    pub fn is_native(self) -> bool {
        matches!(
            self,
            GateKind::Rz | GateKind::Sx | GateKind::X | GateKind::Cx | GateKind::Barrier | GateKind::Measure
        )
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GateKind {
    type Err = CircuitError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GateKind::ALL
            .iter()
            .copied()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| CircuitError::UnknownGate(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CircuitError {
    #[error("unknown gate `{0}`")]
    UnknownGate(String),
    #[error("gate {index} ({gate}): {reason}")]
    InvalidGate {
        index: usize,
        gate: GateKind,
        reason: String,
    },
    #[error("circuit name must be non-empty")]
    EmptyName,
    #[error("circuit must have at least one qubit")]
    NoQubits,
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

/// One operation of a circuit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub name: GateKind,
    pub qubits: Vec<usize>,
    #[serde(default)]
    pub params: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clbit: Option<usize>,
}

impl Gate {
    pub fn new(name: GateKind, qubits: &[usize]) -> Self {
        Gate {
            name,
            qubits: qubits.to_vec(),
            params: Vec::new(),
            clbit: None,
        }
    }

    pub fn with_param(name: GateKind, qubit: usize, angle: f64) -> Self {
        Gate {
            name,
            qubits: vec![qubit],
            params: vec![angle],
            clbit: None,
        }
    }

    pub fn measure(qubit: usize, clbit: usize) -> Self {
        Gate {
            name: GateKind::Measure,
            qubits: vec![qubit],
            params: Vec::new(),
            clbit: Some(clbit),
        }
    }

    pub fn h(q: usize) -> Self {
        Gate::new(GateKind::H, &[q])
    }
    pub fn x(q: usize) -> Self {
        Gate::new(GateKind::X, &[q])
    }
    pub fn sx(q: usize) -> Self {
        Gate::new(GateKind::Sx, &[q])
    }
    pub fn rz(q: usize, angle: f64) -> Self {
        Gate::with_param(GateKind::Rz, q, angle)
    }
    pub fn cx(control: usize, target: usize) -> Self {
        Gate::new(GateKind::Cx, &[control, target])
    }
    pub fn swap(a: usize, b: usize) -> Self {
        Gate::new(GateKind::Swap, &[a, b])
    }
    pub fn barrier(qubits: &[usize]) -> Self {
        Gate::new(GateKind::Barrier, qubits)
    }

    /// The single angle of a rotation gate.
    pub fn angle(&self) -> f64 {
        self.params.first().copied().unwrap_or(0.0)
    }

    fn check(&self, index: usize, num_qubits: usize, num_clbits: usize) -> Result<(), CircuitError> {
        let fail = |reason: String| CircuitError::InvalidGate {
            index,
            gate: self.name,
            reason,
        };
        match self.name.num_qubits() {
            Some(n) if self.qubits.len() != n => {
                return Err(fail(format!("expects {n} qubit(s), got {}", self.qubits.len())))
            }
            None if self.qubits.is_empty() => return Err(fail("barrier needs at least one qubit".into())),
            _ => {}
        }
        for (i, &q) in self.qubits.iter().enumerate() {
            if q >= num_qubits {
                return Err(fail(format!("qubit {q} out of range for width {num_qubits}")));
            }
            if self.qubits[..i].contains(&q) {
                return Err(fail(format!("repeated qubit {q}")));
            }
        }
        if self.params.len() != self.name.num_params() {
            return Err(fail(format!(
                "expects {} parameter(s), got {}",
                self.name.num_params(),
                self.params.len()
            )));
        }
        if self.params.iter().any(|p| !p.is_finite()) {
            return Err(fail("non-finite parameter".into()));
        }
        match (self.name, self.clbit) {
            (GateKind::Measure, Some(c)) if c >= num_clbits => {
                Err(fail(format!("clbit {c} out of range for {num_clbits} clbits")))
            }
            (GateKind::Measure, None) => Err(fail("measure needs a clbit".into())),
            (GateKind::Measure, Some(_)) => Ok(()),
            (_, Some(_)) => Err(fail("only measure carries a clbit".into())),
            (_, None) => Ok(()),
        }
    }
}

/// Ordered gate list over indexed qubits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub name: String,
    pub num_qubits: usize,
    pub num_clbits: usize,
    pub gates: Vec<Gate>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, String>,
}

/// Fields that take part in the fingerprint (metadata excluded).
#[derive(Serialize)]
struct CanonicalCircuit<'a> {
    name: &'a str,
    num_qubits: usize,
    num_clbits: usize,
    gates: &'a [Gate],
}

impl Circuit {
    pub fn new(name: impl Into<String>, num_qubits: usize, num_clbits: usize) -> Self {
        Circuit {
            name: name.into(),
            num_qubits,
            num_clbits,
            gates: Vec::new(),
            metadata: BTreeMap::new(),
        }
    }

    /// Same header, no gates.
    pub fn empty_like(&self) -> Self {
        Circuit {
            name: self.name.clone(),
            num_qubits: self.num_qubits,
            num_clbits: self.num_clbits,
            gates: Vec::new(),
            metadata: self.metadata.clone(),
        }
    }

    pub fn push(&mut self, gate: Gate) -> &mut Self {
        self.gates.push(gate);
        self
    }

    pub fn validate(&self) -> Result<(), CircuitError> {
        if self.name.is_empty() {
            return Err(CircuitError::EmptyName);
        }
        if self.num_qubits == 0 {
            return Err(CircuitError::NoQubits);
        }
        for (i, g) in self.gates.iter().enumerate() {
            g.check(i, self.num_qubits, self.num_clbits)?;
        }
        Ok(())
    }

    /// Longest chain of gates sharing a qubit or clbit. Barriers align the
    /// wires they touch but add no depth.
    pub fn depth(&self) -> usize {
        self.layers().1
    }

    /// ASAP layer of every gate, plus total depth. A barrier's entry is the
    /// layer its wires are synchronised to.
    pub fn layers(&self) -> (Vec<usize>, usize) {
        let mut qfront = vec![0usize; self.num_qubits];
        let mut cfront = vec![0usize; self.num_clbits];
        let mut layers = Vec::with_capacity(self.gates.len());
        let mut depth = 0;
        for g in &self.gates {
            let mut start = g.qubits.iter().map(|&q| qfront[q]).max().unwrap_or(0);
            if let Some(c) = g.clbit {
                start = start.max(cfront[c]);
            }
            layers.push(start);
            let end = if g.name == GateKind::Barrier { start } else { start + 1 };
            for &q in &g.qubits {
                qfront[q] = end;
            }
            if let Some(c) = g.clbit {
                cfront[c] = end;
            }
            depth = depth.max(end);
        }
        (layers, depth)
    }

    /// Gates with two qubit operands.
    pub fn two_qubit_count(&self) -> usize {
        self.gates.iter().filter(|g| g.name.is_two_qubit()).count()
    }

    /// Gate count excluding barriers.
    pub fn size(&self) -> usize {
        self.gates.iter().filter(|g| g.name != GateKind::Barrier).count()
    }

    pub fn has_measurements(&self) -> bool {
        self.gates.iter().any(|g| g.name == GateKind::Measure)
    }

    /// `(qubit, clbit)` pairs in program order.
    pub fn measurements(&self) -> Vec<(usize, usize)> {
        self.gates
            .iter()
            .filter(|g| g.name == GateKind::Measure)
            .map(|g| (g.qubits[0], g.clbit.unwrap_or(0)))
            .collect()
    }

    /// Number of two-qubit interactions each qubit takes part in.
    pub fn interaction_degree(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.num_qubits];
        for g in self.gates.iter().filter(|g| g.name.is_two_qubit()) {
            for &q in &g.qubits {
                deg[q] += 1;
            }
        }
        deg
    }

    pub fn canonical_string(&self) -> String {
        canonical::to_canonical_string(&CanonicalCircuit {
            name: &self.name,
            num_qubits: self.num_qubits,
            num_clbits: self.num_clbits,
            gates: &self.gates,
        })
    }

    /// SHA-256 of the canonical serialization, as 64 hex characters.
    pub fn fingerprint(&self) -> String {
        canonical::sha256_hex(self.canonical_string())
    }

    /// Parse the line-oriented gate text format.
    ///
    /// ```text
    /// # comment
    /// qubits 2
    /// clbits 2
    /// h 0
    /// rz(1.5707963267948966) 1
    /// cx 0 1
    /// measure 0 -> 0
    /// ```
    pub fn parse_gate_text(name: &str, text: &str) -> Result<Circuit, CircuitError> {
        let mut num_qubits = None;
        let mut num_clbits = 0;
        let mut gates = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let perr = |reason: String| CircuitError::Parse { line: line_no, reason };
            let (head, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let parse_usize = |tok: &str| tok.trim().parse::<usize>().map_err(|_| perr(format!("bad integer `{tok}`")));
            match head {
                "qubits" => num_qubits = Some(parse_usize(rest)?),
                "clbits" => num_clbits = parse_usize(rest)?,
                _ => {
                    let (gname, params) = match head.split_once('(') {
                        Some((g, p)) => {
                            let p = p.strip_suffix(')').ok_or_else(|| perr("unclosed parameter list".into()))?;
                            let params = p
                                .split(',')
                                .map(|t| parse_angle(t.trim()).ok_or_else(|| perr(format!("bad angle `{t}`"))))
                                .collect::<Result<Vec<_>, _>>()?;
                            (g, params)
                        }
                        None => (head, Vec::new()),
                    };
                    let kind: GateKind = gname.parse().map_err(|_| perr(format!("unknown gate `{gname}`")))?;
                    let (qpart, cpart) = match rest.split_once("->") {
                        Some((q, c)) => (q, Some(c)),
                        None => (rest, None),
                    };
                    let qubits = qpart
                        .split_whitespace()
                        .map(parse_usize)
                        .collect::<Result<Vec<_>, _>>()?;
                    let clbit = cpart.map(parse_usize).transpose()?;
                    gates.push(Gate {
                        name: kind,
                        qubits,
                        params,
                        clbit,
                    });
                }
            }
        }
        let num_qubits = num_qubits.ok_or(CircuitError::Parse {
            line: 0,
            reason: "missing `qubits` header".into(),
        })?;
        let circuit = Circuit {
            name: name.to_string(),
            num_qubits,
            num_clbits,
            gates,
            metadata: BTreeMap::new(),
        };
        circuit.validate()?;
        Ok(circuit)
    }

    /// Render in the gate text format accepted by [`Circuit::parse_gate_text`].
    pub fn to_gate_text(&self) -> String {
        let mut out = format!("qubits {}\nclbits {}\n", self.num_qubits, self.num_clbits);
        for g in &self.gates {
            out.push_str(g.name.as_str());
            if !g.params.is_empty() {
                let ps: Vec<String> = g.params.iter().map(|p| format!("{p:?}")).collect();
                out.push('(');
                out.push_str(&ps.join(","));
                out.push(')');
            }
            for q in &g.qubits {
                out.push_str(&format!(" {q}"));
            }
            if let Some(c) = g.clbit {
                out.push_str(&format!(" -> {c}"));
            }
            out.push('\n');
        }
        out
    }
}

fn parse_angle(tok: &str) -> Option<f64> {
    // Accept plain decimals and the forms `pi`, `-pi`, `pi/4`, `3*pi/4`.
    if let Ok(v) = tok.parse::<f64>() {
        return Some(v);
    }
    let (sign, body) = match tok.strip_prefix('-') {
        Some(b) => (-1.0, b),
        None => (1.0, tok),
    };
    let (num, den) = match body.split_once('/') {
        Some((n, d)) => (n, d.parse::<f64>().ok()?),
        None => (body, 1.0),
    };
    let coeff = match num.split_once('*') {
        Some((c, "pi")) => c.parse::<f64>().ok()?,
        None if num == "pi" => 1.0,
        _ => return None,
    };
    Some(sign * coeff * PI / den)
}

/// Controlled phase `cp(theta)` expressed over `{rz, cx}` (exact up to global phase).
fn push_controlled_phase(c: &mut Circuit, control: usize, target: usize, theta: f64) {
    c.push(Gate::rz(control, theta / 2.0));
    c.push(Gate::cx(control, target));
    c.push(Gate::rz(target, -theta / 2.0));
    c.push(Gate::cx(control, target));
    c.push(Gate::rz(target, theta / 2.0));
}

fn measure_all(c: &mut Circuit) {
    for q in 0..c.num_qubits {
        c.push(Gate::measure(q, q));
    }
}

pub fn bell() -> Circuit {
    let mut c = Circuit::new("bell", 2, 2);
    c.push(Gate::h(0)).push(Gate::cx(0, 1));
    measure_all(&mut c);
    c
}

pub fn ghz3() -> Circuit {
    let mut c = Circuit::new("ghz3", 3, 3);
    c.push(Gate::h(0)).push(Gate::cx(0, 1)).push(Gate::cx(1, 2));
    measure_all(&mut c);
    c
}

/// Four-qubit QFT: Hadamards with a controlled-phase ladder over `{rz, cx}`,
/// then the bit-reversal swaps.
pub fn qft4() -> Circuit {
    let n = 4;
    let mut c = Circuit::new("qft4", n, n);
    for j in 0..n {
        c.push(Gate::h(j));
        for k in (j + 1)..n {
            let theta = PI / f64::from(1u32 << (k - j));
            push_controlled_phase(&mut c, k, j, theta);
        }
    }
    c.push(Gate::swap(0, 3)).push(Gate::swap(1, 2));
    measure_all(&mut c);
    c
}

/// The built-in three-circuit dataset: Bell, GHZ-3 and QFT-4.
pub fn example_dataset() -> Vec<Circuit> {
    vec![bell(), ghz3(), qft4()]
}
