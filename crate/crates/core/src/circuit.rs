//! Reversible circuit IR over the NCT gate set (NOT, CNOT, Toffoli).
//!
//! A [`Circuit`] is a flat gate list over dense wire indices plus an output
//! relabeling. The relabeling says which physical wire carries each logical
//! output bit: output bit `j` is read from wire `relabel[j]`. Rotations and
//! bit permutations are expressed through the relabeling and never cost a
//! gate.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Index of a wire inside a circuit.
pub type Wire = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CircuitError {
    #[error("gate {0} uses the same wire more than once")]
    DuplicateWire(Gate),
    #[error("gate {gate} references wire {wire}, circuit has {wires} wires")]
    WireOutOfRange { gate: Gate, wire: Wire, wires: usize },
    #[error("wire count mismatch: {left} vs {right}")]
    WireCountMismatch { left: usize, right: usize },
    #[error("wire map is not a bijection on {0} wires")]
    NotBijective(usize),
    #[error("circuit must have at least one wire")]
    NoWires,
    #[error("unknown gate mnemonic {0:?}")]
    UnknownGate(String),
    #[error("gate {kind} expects {expected} wires, got {got}")]
    Arity {
        kind: String,
        expected: usize,
        got: usize,
    },
}

/// One NCT gate. Controls come before the target in every accessor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gate {
    Not { target: Wire },
    Cnot { control: Wire, target: Wire },
    Toffoli { c1: Wire, c2: Wire, target: Wire },
}

/// Coarse gate class, used for histograms and cost weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GateKind {
    Not,
    Cnot,
    Toffoli,
}

impl Gate {
    pub fn kind(&self) -> GateKind {
        match self {
            Gate::Not { .. } => GateKind::Not,
            Gate::Cnot { .. } => GateKind::Cnot,
            Gate::Toffoli { .. } => GateKind::Toffoli,
        }
    }

    pub fn target(&self) -> Wire {
        match *self {
            Gate::Not { target } | Gate::Cnot { target, .. } | Gate::Toffoli { target, .. } => {
                target
            }
        }
    }

    /// Wires in controls-first order.
    pub fn wires(&self) -> Vec<Wire> {
        match *self {
            Gate::Not { target } => vec![target],
            Gate::Cnot { control, target } => vec![control, target],
            Gate::Toffoli { c1, c2, target } => vec![c1, c2, target],
        }
    }

    /// Same gate with every wire index passed through `f`.
    pub fn map_wires(&self, mut f: impl FnMut(Wire) -> Wire) -> Gate {
        match *self {
            Gate::Not { target } => Gate::Not { target: f(target) },
            Gate::Cnot { control, target } => Gate::Cnot {
                control: f(control),
                target: f(target),
            },
            Gate::Toffoli { c1, c2, target } => Gate::Toffoli {
                c1: f(c1),
                c2: f(c2),
                target: f(target),
            },
        }
    }

    pub fn mnemonic(&self) -> &'static str {
        match self {
            Gate::Not { .. } => "X",
            Gate::Cnot { .. } => "CX",
            Gate::Toffoli { .. } => "CCX",
        }
    }

    pub fn from_mnemonic(g: &str, w: &[Wire]) -> Result<Gate, CircuitError> {
        let arity = |expected: usize| {
            if w.len() == expected {
                Ok(())
            } else {
                Err(CircuitError::Arity {
                    kind: g.to_string(),
                    expected,
                    got: w.len(),
                })
            }
        };
        match g {
            "X" => arity(1).map(|_| Gate::Not { target: w[0] }),
            "CX" => arity(2).map(|_| Gate::Cnot {
                control: w[0],
                target: w[1],
            }),
            "CCX" => arity(3).map(|_| Gate::Toffoli {
                c1: w[0],
                c2: w[1],
                target: w[2],
            }),
            other => Err(CircuitError::UnknownGate(other.to_string())),
        }
    }

    pub fn validate(&self, wires: usize) -> Result<(), CircuitError> {
        let ws = self.wires();
        for (i, &a) in ws.iter().enumerate() {
            if a >= wires {
                return Err(CircuitError::WireOutOfRange {
                    gate: *self,
                    wire: a,
                    wires,
                });
            }
            if ws[..i].contains(&a) {
                return Err(CircuitError::DuplicateWire(*self));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::Not { target } => write!(f, "X({target})"),
            Gate::Cnot { control, target } => write!(f, "CNOT({control},{target})"),
            Gate::Toffoli { c1, c2, target } => write!(f, "Toffoli({c1},{c2},{target})"),
        }
    }
}

/// A bijection on wire indices, in "source" form: position `j` of the
/// relabeled register takes the bit previously at `map[j]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WireMap {
    map: Vec<Wire>,
}

impl WireMap {
    pub fn identity(wires: usize) -> Self {
        WireMap {
            map: (0..wires).collect(),
        }
    }

    pub fn new(map: Vec<Wire>) -> Result<Self, CircuitError> {
        if !is_permutation(&map) {
            return Err(CircuitError::NotBijective(map.len()));
        }
        Ok(WireMap { map })
    }

    /// Left rotation by `amount` of the `width`-bit word stored (LSB first)
    /// at wires `offset..offset + width`; all other wires stay fixed.
    pub fn rotate_left(wires: usize, offset: usize, width: usize, amount: usize) -> Self {
        assert!(offset + width <= wires && width > 0);
        let mut map: Vec<Wire> = (0..wires).collect();
        for j in 0..width {
            map[offset + j] = offset + (j + width - amount % width) % width;
        }
        WireMap { map }
    }

    pub fn rotate_right(wires: usize, offset: usize, width: usize, amount: usize) -> Self {
        Self::rotate_left(wires, offset, width, width - amount % width)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn source(&self, j: Wire) -> Wire {
        self.map[j]
    }

    pub fn as_slice(&self) -> &[Wire] {
        &self.map
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &m)| i == m)
    }

    /// Map equivalent to applying `self` first and `then` afterwards.
    pub fn then(&self, then: &WireMap) -> Result<WireMap, CircuitError> {
        if self.len() != then.len() {
            return Err(CircuitError::WireCountMismatch {
                left: self.len(),
                right: then.len(),
            });
        }
        Ok(WireMap {
            map: then.map.iter().map(|&j| self.map[j]).collect(),
        })
    }

    pub fn inverse(&self) -> WireMap {
        WireMap {
            map: invert(&self.map),
        }
    }

    /// Apply to a bit vector given as a `u64` (wires < 64).
    pub fn apply_u64(&self, value: u64) -> u64 {
        self.map
            .iter()
            .enumerate()
            .fold(0, |acc, (j, &src)| acc | (((value >> src) & 1) << j))
    }
}

pub(crate) fn is_permutation(map: &[Wire]) -> bool {
    let mut seen = vec![false; map.len()];
    for &m in map {
        if m >= map.len() || seen[m] {
            return false;
        }
        seen[m] = true;
    }
    true
}

pub(crate) fn invert(map: &[Wire]) -> Vec<Wire> {
    let mut inv = vec![0; map.len()];
    for (i, &m) in map.iter().enumerate() {
        inv[m] = i;
    }
    inv
}

/// Gate list plus output relabeling over a fixed number of wires.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Circuit {
    wires: usize,
    gates: Vec<Gate>,
    relabel: Vec<Wire>,
}

impl Circuit {
    pub fn new(wires: usize) -> Result<Self, CircuitError> {
        if wires == 0 {
            return Err(CircuitError::NoWires);
        }
        Ok(Circuit {
            wires,
            gates: Vec::new(),
            relabel: (0..wires).collect(),
        })
    }

    pub fn from_parts(
        wires: usize,
        gates: Vec<Gate>,
        relabel: Vec<Wire>,
    ) -> Result<Self, CircuitError> {
        let mut c = Circuit::new(wires)?;
        if relabel.len() != wires || !is_permutation(&relabel) {
            return Err(CircuitError::NotBijective(wires));
        }
        for g in &gates {
            g.validate(wires)?;
        }
        c.gates = gates;
        c.relabel = relabel;
        Ok(c)
    }

    pub fn wire_count(&self) -> usize {
        self.wires
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn relabel(&self) -> &[Wire] {
        &self.relabel
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Appends a gate after validating its wires.
    ///
    /// Gate wires are physical indices; the current relabeling is not
    /// applied to them.
    pub fn push(&mut self, gate: Gate) -> Result<(), CircuitError> {
        gate.validate(self.wires)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn append(mut self, gate: Gate) -> Result<Self, CircuitError> {
        self.push(gate)?;
        Ok(self)
    }

    pub fn count(&self, kind: GateKind) -> usize {
        self.gates.iter().filter(|g| g.kind() == kind).count()
    }

    /// Reversed gate list. Gates are self-inverse; when the relabeling is
    /// nontrivial the gate wires are re-indexed so that the inverse reads
    /// its inputs in logical order, and its relabeling is the inverse
    /// permutation.
    pub fn inverse(&self) -> Circuit {
        let inv = invert(&self.relabel);
        Circuit {
            wires: self.wires,
            gates: self
                .gates
                .iter()
                .rev()
                .map(|g| g.map_wires(|w| inv[w]))
                .collect(),
            relabel: inv,
        }
    }

    /// Runs `self`, then `next` on `self`'s logical outputs.
    pub fn compose(&self, next: &Circuit) -> Result<Circuit, CircuitError> {
        if self.wires != next.wires {
            return Err(CircuitError::WireCountMismatch {
                left: self.wires,
                right: next.wires,
            });
        }
        let mut gates = self.gates.clone();
        gates.extend(next.gates.iter().map(|g| g.map_wires(|w| self.relabel[w])));
        Ok(Circuit {
            wires: self.wires,
            gates,
            relabel: next.relabel.iter().map(|&j| self.relabel[j]).collect(),
        })
    }

    /// Permutes the logical outputs by `map` at zero gate cost.
    pub fn rewire(&self, map: &WireMap) -> Result<Circuit, CircuitError> {
        if map.len() != self.wires {
            return Err(CircuitError::WireCountMismatch {
                left: self.wires,
                right: map.len(),
            });
        }
        Ok(Circuit {
            wires: self.wires,
            gates: self.gates.clone(),
            relabel: map.as_slice().iter().map(|&j| self.relabel[j]).collect(),
        })
    }

    /// One gate per line, `y <- Gate(...)` style, with `names` giving the
    /// display name of each wire.
    pub fn listing(&self, names: &[String]) -> String {
        let name = |w: Wire| names.get(w).cloned().unwrap_or_else(|| format!("q{w}"));
        let mut out = String::new();
        for (i, g) in self.gates.iter().enumerate() {
            let args: Vec<String> = g.wires().into_iter().map(name).collect();
            let op = match g.kind() {
                GateKind::Not => "X",
                GateKind::Cnot => "CNOT",
                GateKind::Toffoli => "Toffoli",
            };
            out.push_str(&format!(
                "{}. {} <- {}({})\n",
                i + 1,
                name(g.target()),
                op,
                args.join(", ")
            ));
        }
        if !self.relabel.iter().enumerate().all(|(i, &m)| i == m) {
            let outs: Vec<String> = self.relabel.iter().map(|&w| name(w)).collect();
            out.push_str(&format!("output (bit 0 first): {}\n", outs.join(", ")));
        }
        out
    }

    /// OpenQASM 2.0 text on a single register `q`. Wire `i` is `q[i]`; the
    /// output relabeling is reported as a trailing comment, never as swaps.
    pub fn to_qasm(&self) -> String {
        let mut out = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
        out.push_str(&format!("qreg q[{}];\n", self.wires));
        for g in &self.gates {
            let args: Vec<String> = g.wires().iter().map(|w| format!("q[{w}]")).collect();
            let op = match g.kind() {
                GateKind::Not => "x",
                GateKind::Cnot => "cx",
                GateKind::Toffoli => "ccx",
            };
            out.push_str(&format!("{op} {};\n", args.join(",")));
        }
        if !self.relabel.iter().enumerate().all(|(i, &m)| i == m) {
            let outs: Vec<String> = self.relabel.iter().map(|w| w.to_string()).collect();
            out.push_str(&format!("// output bit j is on q[relabel[j]]: {}\n", outs.join(" ")));
        }
        out
    }
}

#[derive(Serialize, Deserialize)]
struct GateJson {
    g: String,
    w: Vec<Wire>,
}

/// JSON document form: `{"wires", "gates": [{"g", "w"}], "relabel"}` plus
/// an optional free-form `metadata` object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitDocument {
    #[serde(flatten)]
    pub circuit: Circuit,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<serde_json::Value>,
}

#[derive(Serialize, Deserialize)]
struct CircuitJson {
    wires: usize,
    gates: Vec<GateJson>,
    relabel: Vec<Wire>,
}

impl Serialize for Circuit {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        CircuitJson {
            wires: self.wires,
            gates: self
                .gates
                .iter()
                .map(|g| GateJson {
                    g: g.mnemonic().to_string(),
                    w: g.wires(),
                })
                .collect(),
            relabel: self.relabel.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Circuit {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = CircuitJson::deserialize(d)?;
        let gates = raw
            .gates
            .iter()
            .map(|g| Gate::from_mnemonic(&g.g, &g.w))
            .collect::<Result<Vec<_>, _>>()
            .map_err(serde::de::Error::custom)?;
        Circuit::from_parts(raw.wires, gates, raw.relabel).map_err(serde::de::Error::custom)
    }
}
