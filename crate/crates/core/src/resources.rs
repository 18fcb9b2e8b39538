//! Clifford+T resource counting for NCT circuits.
//!
//! Every Toffoli is expanded into a fixed block of Clifford+T gates
//! ([`DecompositionModel`]); NOT and CNOT are counted as themselves. Depth is
//! an as-soon-as-possible schedule over wires, with each Toffoli occupying
//! its three wires as one atomic block.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, Gate};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResourceError {
    #[error("qubit counts differ: {left} vs {right}")]
    QubitMismatch { left: usize, right: usize },
}

/// Clifford+T cost of one Toffoli.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionModel {
    pub t_gates: u64,
    pub h_gates: u64,
    pub cnot_gates: u64,
    pub depth: u64,
    pub t_depth: u64,
}

impl Default for DecompositionModel {
    fn default() -> Self {
        DecompositionModel {
            t_gates: 7,
            h_gates: 2,
            cnot_gates: 6,
            depth: 8,
            t_depth: 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ResourceSummary {
    pub qubits: usize,
    pub cnot: u64,
    pub h: u64,
    pub t: u64,
    pub x: u64,
    /// Toffoli gates before decomposition.
    pub toffoli: u64,
    pub full_depth: u64,
    pub t_depth: u64,
}

impl ResourceSummary {
    /// All gates after decomposition.
    pub fn total_gates(&self) -> u64 {
        self.cnot + self.h + self.t + self.x
    }

    pub fn clifford_gates(&self) -> u64 {
        self.cnot + self.h + self.x
    }
}

/// Componentwise `a - b`; depths may go either way, hence signed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ResourceDelta {
    pub cnot: i64,
    pub h: i64,
    pub t: i64,
    pub x: i64,
    pub toffoli: i64,
    pub full_depth: i64,
    pub t_depth: i64,
}

pub fn count(circuit: &Circuit, model: &DecompositionModel) -> ResourceSummary {
    let mut s = ResourceSummary {
        qubits: circuit.wire_count(),
        ..Default::default()
    };
    for g in circuit.gates() {
        match g {
            Gate::Not { .. } => s.x += 1,
            Gate::Cnot { .. } => s.cnot += 1,
            Gate::Toffoli { .. } => {
                s.toffoli += 1;
                s.t += model.t_gates;
                s.h += model.h_gates;
                s.cnot += model.cnot_gates;
            }
        }
    }
    let (full, t) = depth(circuit, model);
    s.full_depth = full;
    s.t_depth = t;
    s
}

/// `(full_depth, t_depth)` under ASAP layering.
///
/// The two figures are independent longest paths: T-depth weighs NOT and
/// CNOT as zero.
pub fn depth(circuit: &Circuit, model: &DecompositionModel) -> (u64, u64) {
    let n = circuit.wire_count();
    let mut full = vec![0u64; n];
    let mut tl = vec![0u64; n];
    for g in circuit.gates() {
        let (d, td) = match g {
            Gate::Toffoli { .. } => (model.depth, model.t_depth),
            _ => (1, 0),
        };
        let ws = g.wires();
        let start = ws.iter().map(|&w| full[w]).max().unwrap_or(0);
        let tstart = ws.iter().map(|&w| tl[w]).max().unwrap_or(0);
        for &w in &ws {
            full[w] = start + d;
            tl[w] = tstart + td;
        }
    }
    (
        full.into_iter().max().unwrap_or(0),
        tl.into_iter().max().unwrap_or(0),
    )
}

pub fn diff(a: &ResourceSummary, b: &ResourceSummary) -> Result<ResourceDelta, ResourceError> {
    if a.qubits != b.qubits {
        return Err(ResourceError::QubitMismatch {
            left: a.qubits,
            right: b.qubits,
        });
    }
    let d = |x: u64, y: u64| x as i64 - y as i64;
    Ok(ResourceDelta {
        cnot: d(a.cnot, b.cnot),
        h: d(a.h, b.h),
        t: d(a.t, b.t),
        x: d(a.x, b.x),
        toffoli: d(a.toffoli, b.toffoli),
        full_depth: d(a.full_depth, b.full_depth),
        t_depth: d(a.t_depth, b.t_depth),
    })
}

/// Plain-text table with one row per named summary.
pub fn render_table(rows: &[(String, ResourceSummary)]) -> String {
    let header = [
        "Cipher", "#Qubits", "#CNOT", "#H", "#T", "#X", "#Toffoli", "Depth", "T-depth",
    ];
    let body: Vec<[String; 9]> = rows
        .iter()
        .map(|(name, s)| {
            [
                name.clone(),
                s.qubits.to_string(),
                s.cnot.to_string(),
                s.h.to_string(),
                s.t.to_string(),
                s.x.to_string(),
                s.toffoli.to_string(),
                s.full_depth.to_string(),
                s.t_depth.to_string(),
            ]
        })
        .collect();
    let mut widths = header.map(str::len);
    for r in &body {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.len());
        }
    }
    let mut out = String::new();
    let line = |out: &mut String, cells: &[String]| {
        let parts: Vec<String> = cells
            .iter()
            .zip(widths)
            .enumerate()
            .map(|(i, (c, w))| {
                if i == 0 {
                    format!("{c:<w$}")
                } else {
                    format!("{c:>w$}")
                }
            })
            .collect();
        let _ = writeln!(out, "{}", parts.join("  ").trim_end());
    };
    line(&mut out, &header.map(String::from));
    for r in &body {
        line(&mut out, r);
    }
    out
}
