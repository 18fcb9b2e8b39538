//! Classical basis-state execution of NCT circuits.
//!
//! Wire `i` corresponds to bit `i` of a [`BasisState`]. Besides single
//! runs there is a lane-parallel runner that pushes 64 independent inputs
//! through a circuit at once, one `u64` per wire.

use thiserror::Error;

use crate::circuit::{Circuit, Gate};

/// Largest wire count accepted by [`truth_table`].
pub const MAX_TRUTH_TABLE_WIRES: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("input has {got} bits, circuit has {expected} wires")]
    LengthMismatch { expected: usize, got: usize },
    #[error("truth tables are limited to {MAX_TRUTH_TABLE_WIRES} wires, circuit has {0}")]
    TooManyWires(usize),
}

/// Bit vector, one bit per wire.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BasisState {
    words: Vec<u64>,
    len: usize,
}

impl BasisState {
    pub fn zeros(len: usize) -> Self {
        BasisState {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn from_u64(len: usize, value: u64) -> Self {
        let mut s = BasisState::zeros(len);
        s.set_field(0, len.min(64), value as u128);
        s
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut s = BasisState::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            s.set(i, b);
        }
        s
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, bit: bool) {
        assert!(i < self.len);
        let mask = 1u64 << (i % 64);
        if bit {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    fn flip(&mut self, i: usize) {
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    /// Writes `width` (≤ 128) low bits of `value` at bits `offset..`.
    pub fn set_field(&mut self, offset: usize, width: usize, value: u128) {
        assert!(width <= 128);
        for j in 0..width {
            self.set(offset + j, (value >> j) & 1 == 1);
        }
    }

    pub fn field(&self, offset: usize, width: usize) -> u128 {
        assert!(width <= 128);
        (0..width).fold(0u128, |acc, j| acc | ((self.get(offset + j) as u128) << j))
    }

    pub fn to_u64(&self) -> u64 {
        self.field(0, self.len.min(64)) as u64
    }
}

/// Image of every input `v` (wire `i` = bit `i` of `v`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TruthTable {
    wires: usize,
    outputs: Vec<u32>,
}

impl TruthTable {
    pub fn identity(wires: usize) -> Self {
        TruthTable {
            wires,
            outputs: (0..1u32 << wires).collect(),
        }
    }

    pub fn wires(&self) -> usize {
        self.wires
    }

    pub fn outputs(&self) -> &[u32] {
        &self.outputs
    }

    pub fn apply(&self, v: u32) -> u32 {
        self.outputs[v as usize]
    }

    pub fn is_permutation(&self) -> bool {
        let mut seen = vec![false; self.outputs.len()];
        self.outputs.iter().all(|&o| {
            let fresh = !seen[o as usize];
            seen[o as usize] = true;
            fresh
        })
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &TruthTable) -> TruthTable {
        TruthTable {
            wires: self.wires,
            outputs: self.outputs.iter().map(|&o| next.apply(o)).collect(),
        }
    }
}

#[inline]
fn apply_gate_u64(state: u64, g: &Gate) -> u64 {
    match *g {
        Gate::Not { target } => state ^ (1 << target),
        Gate::Cnot { control, target } => state ^ (((state >> control) & 1) << target),
        Gate::Toffoli { c1, c2, target } => {
            state ^ ((((state >> c1) & (state >> c2)) & 1) << target)
        }
    }
}

fn run_small(circuit: &Circuit, input: u64) -> u64 {
    let phys = circuit.gates().iter().fold(input, apply_gate_u64);
    circuit
        .relabel()
        .iter()
        .enumerate()
        .fold(0, |acc, (j, &w)| acc | (((phys >> w) & 1) << j))
}

pub fn run(circuit: &Circuit, input: &BasisState) -> Result<BasisState, SimError> {
    if input.len() != circuit.wire_count() {
        return Err(SimError::LengthMismatch {
            expected: circuit.wire_count(),
            got: input.len(),
        });
    }
    let mut s = input.clone();
    for g in circuit.gates() {
        match *g {
            Gate::Not { target } => s.flip(target),
            Gate::Cnot { control, target } => {
                if s.get(control) {
                    s.flip(target)
                }
            }
            Gate::Toffoli { c1, c2, target } => {
                if s.get(c1) && s.get(c2) {
                    s.flip(target)
                }
            }
        }
    }
    let mut out = BasisState::zeros(s.len());
    for (j, &w) in circuit.relabel().iter().enumerate() {
        out.set(j, s.get(w));
    }
    Ok(out)
}

/// Exhaustive image table, certified to be a permutation.
pub fn truth_table(circuit: &Circuit) -> Result<TruthTable, SimError> {
    let n = circuit.wire_count();
    if n > MAX_TRUTH_TABLE_WIRES {
        return Err(SimError::TooManyWires(n));
    }
    let tt = TruthTable {
        wires: n,
        outputs: (0..1u64 << n)
            .map(|v| run_small(circuit, v) as u32)
            .collect(),
    };
    assert!(tt.is_permutation(), "NCT circuit produced a non-bijective table");
    Ok(tt)
}

/// Runs up to 64 inputs at once: `lanes[w]` holds bit `w` of every input,
/// lane `k` being input `k`. Returns the relabeled output lanes.
pub fn run_lanes(circuit: &Circuit, lanes: &[u64]) -> Result<Vec<u64>, SimError> {
    if lanes.len() != circuit.wire_count() {
        return Err(SimError::LengthMismatch {
            expected: circuit.wire_count(),
            got: lanes.len(),
        });
    }
    let mut s = lanes.to_vec();
    for g in circuit.gates() {
        match *g {
            Gate::Not { target } => s[target] = !s[target],
            Gate::Cnot { control, target } => s[target] ^= s[control],
            Gate::Toffoli { c1, c2, target } => s[target] ^= s[c1] & s[c2],
        }
    }
    Ok(circuit.relabel().iter().map(|&w| s[w]).collect())
}

/// Transposes up to 64 basis states into per-wire lanes.
pub fn states_to_lanes(states: &[BasisState], wires: usize) -> Vec<u64> {
    assert!(states.len() <= 64);
    let mut lanes = vec![0u64; wires];
    for (k, s) in states.iter().enumerate() {
        for (w, lane) in lanes.iter_mut().enumerate() {
            *lane |= (s.get(w) as u64) << k;
        }
    }
    lanes
}

pub fn lanes_to_states(lanes: &[u64], count: usize) -> Vec<BasisState> {
    (0..count)
        .map(|k| {
            let mut s = BasisState::zeros(lanes.len());
            for (w, lane) in lanes.iter().enumerate() {
                s.set(w, (lane >> k) & 1 == 1);
            }
            s
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::WireMap;

    #[test]
    fn gate_semantics() {
        let x = Circuit::new(1).unwrap().append(Gate::Not { target: 0 }).unwrap();
        assert_eq!(run(&x, &BasisState::from_u64(1, 0)).unwrap().to_u64(), 1);

        let t = Circuit::new(3)
            .unwrap()
            .append(Gate::Toffoli { c1: 0, c2: 1, target: 2 })
            .unwrap();
        let out = run(&t, &BasisState::from_bits(&[true, true, false])).unwrap();
        assert_eq!(out, BasisState::from_bits(&[true, true, true]));

        let c = Circuit::new(2)
            .unwrap()
            .append(Gate::Cnot { control: 0, target: 1 })
            .unwrap();
        let a = run(&c, &BasisState::from_bits(&[true, false])).unwrap();
        assert_eq!(a, BasisState::from_bits(&[true, true]));
        let b = run(&c, &BasisState::from_bits(&[false, true])).unwrap();
        assert_eq!(b, BasisState::from_bits(&[false, true]));
    }

    #[test]
    fn length_and_width_errors() {
        let c = Circuit::new(3).unwrap();
        assert_eq!(
            run(&c, &BasisState::zeros(2)),
            Err(SimError::LengthMismatch { expected: 3, got: 2 })
        );
        assert_eq!(
            truth_table(&Circuit::new(17).unwrap()),
            Err(SimError::TooManyWires(17))
        );
    }

    #[test]
    fn empty_circuit_is_identity() {
        let tt = truth_table(&Circuit::new(4).unwrap()).unwrap();
        assert_eq!(tt, TruthTable::identity(4));
    }

    #[test]
    fn relabel_applies_at_output() {
        let c = Circuit::new(4)
            .unwrap()
            .rewire(&WireMap::rotate_left(4, 0, 4, 1))
            .unwrap();
        assert_eq!(truth_table(&c).unwrap().apply(0b0001), 0b0010);
        assert_eq!(truth_table(&c).unwrap().apply(0b1000), 0b0001);
    }

    #[test]
    fn lanes_agree_with_single_runs() {
        let c = Circuit::from_parts(
            5,
            vec![
                Gate::Toffoli { c1: 0, c2: 3, target: 4 },
                Gate::Cnot { control: 4, target: 1 },
                Gate::Not { target: 2 },
            ],
            vec![4, 3, 2, 1, 0],
        )
        .unwrap();
        let states: Vec<BasisState> = (0..32).map(|v| BasisState::from_u64(5, v)).collect();
        let out = run_lanes(&c, &states_to_lanes(&states, 5)).unwrap();
        let back = lanes_to_states(&out, states.len());
        for (s, o) in states.iter().zip(&back) {
            assert_eq!(&run(&c, s).unwrap(), o);
        }
    }

    #[test]
    fn wide_fields_round_trip() {
        let mut s = BasisState::zeros(144);
        s.set_field(64, 80, 0x0123_4567_89ab_cdef_fedc);
        s.set_field(0, 64, 0xdead_beef_0bad_f00d);
        assert_eq!(s.field(64, 80), 0x0123_4567_89ab_cdef_fedc);
        assert_eq!(s.field(0, 64), 0xdead_beef_0bad_f00d);
    }
}
