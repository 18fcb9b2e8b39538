//! Full reversible circuits for LBlock and LiCi on plaintext and key wires only.
//!
//! Plaintext bit `i` sits on wire `i` and key bit `j` on wire `64 + j`, so
//! a `(plaintext, key)` pair loads without any reordering. Rotations and the
//! LBlock nibble permutation are tracked as a logical-to-physical wire map
//! and end up in the circuit's output relabeling, never as gates.

use std::collections::BTreeMap;
use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, CircuitError, Gate, Wire};
use crate::reference::{lblock, lici, Cipher, ReferenceError};
use crate::sim::run_lanes;
use crate::synth::SynthesisResult;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error("no circuit supplied for S-box {0}")]
    MissingSbox(String),
    #[error("S-box {0} circuit does not end in a Toffoli gate")]
    NotTrailingToffoli(String),
    #[error("S-box {0} circuit must act on 4 wires")]
    SboxWidth(String),
    #[error(transparent)]
    Rounds(#[from] ReferenceError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Original,
    #[default]
    Improved,
}

impl std::str::FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "original" => Ok(Variant::Original),
            "improved" => Ok(Variant::Improved),
            other => Err(format!("unknown variant {other:?} (expected original or improved)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WireRole {
    Left,
    Right,
    Key,
}

/// Wire roles of a cipher circuit. `left` is L for LBlock and X for LiCi.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CipherLayout {
    pub cipher: Cipher,
    pub wire_count: usize,
    pub left: Range<Wire>,
    pub right: Range<Wire>,
    pub key: Range<Wire>,
}

impl CipherLayout {
    pub fn of(cipher: Cipher) -> Self {
        CipherLayout {
            cipher,
            wire_count: 64 + cipher.key_bits(),
            left: 32..64,
            right: 0..32,
            key: 64..64 + cipher.key_bits(),
        }
    }

    pub fn role(&self, w: Wire) -> Option<WireRole> {
        if self.left.contains(&w) {
            Some(WireRole::Left)
        } else if self.right.contains(&w) {
            Some(WireRole::Right)
        } else if self.key.contains(&w) {
            Some(WireRole::Key)
        } else {
            None
        }
    }

    /// Display names such as `L3`, `R0`, `K79` (or `X`/`Y` for LiCi).
    pub fn wire_names(&self) -> Vec<String> {
        let (l, r) = match self.cipher {
            Cipher::Lblock => ("L", "R"),
            Cipher::Lici => ("X", "Y"),
        };
        (0..self.wire_count)
            .map(|w| match self.role(w) {
                Some(WireRole::Left) => format!("{l}{}", w - self.left.start),
                Some(WireRole::Right) => format!("{r}{}", w - self.right.start),
                _ => format!("K{}", w - self.key.start),
            })
            .collect()
    }

    /// Input lanes for up to 64 `(plaintext, key)` samples.
    pub fn load_lanes(&self, samples: &[(u64, u128)]) -> Vec<u64> {
        assert!(samples.len() <= 64);
        let mut lanes = vec![0u64; self.wire_count];
        for (k, &(pt, key)) in samples.iter().enumerate() {
            for (b, lane) in lanes[..64].iter_mut().enumerate() {
                *lane |= ((pt >> b) & 1) << k;
            }
            for (b, lane) in lanes[64..].iter_mut().enumerate() {
                *lane |= (((key >> b) & 1) as u64) << k;
            }
        }
        lanes
    }

    /// Splits output lanes back into `(state, key register)` per sample.
    pub fn read_lanes(&self, lanes: &[u64], count: usize) -> Vec<(u64, u128)> {
        (0..count)
            .map(|k| {
                let state = lanes[..64]
                    .iter()
                    .enumerate()
                    .fold(0u64, |acc, (b, l)| acc | (((l >> k) & 1) << b));
                let key = lanes[64..]
                    .iter()
                    .enumerate()
                    .fold(0u128, |acc, (b, l)| acc | ((((l >> k) & 1) as u128) << b));
                (state, key)
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct BuildOptions {
    pub rounds: usize,
    pub variant: Variant,
    pub sbox_circuits: BTreeMap<String, SynthesisResult>,
}

impl BuildOptions {
    pub fn new(rounds: usize, variant: Variant, sbox_circuits: BTreeMap<String, SynthesisResult>) -> Self {
        BuildOptions {
            rounds,
            variant,
            sbox_circuits,
        }
    }

    fn sbox(&self, name: &str) -> Result<&Circuit, BuildError> {
        let r = self
            .sbox_circuits
            .get(name)
            .ok_or_else(|| BuildError::MissingSbox(name.to_string()))?;
        if r.circuit.wire_count() != 4 {
            return Err(BuildError::SboxWidth(name.to_string()));
        }
        Ok(&r.circuit)
    }
}

/// Result of splitting an S-box circuit at its final Toffoli.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fusion {
    /// Every gate but the last, on the host wires.
    pub forward: Circuit,
    /// The final Toffoli, retargeted onto the host's `r_target`.
    pub fused: Gate,
    pub uncompute: Circuit,
    /// S-box output bit that the final Toffoli completes.
    pub output_bit: usize,
}

/// Splits `sbox` so that its final Toffoli writes into `r_target` instead of
/// the nibble. `l_wires[w]` is the host wire for S-box wire `w`; the
/// returned circuits live on `wire_count` host wires.
pub fn fuse_trailing_toffoli(
    sbox: &Circuit,
    l_wires: &[Wire; 4],
    r_target: Wire,
    wire_count: usize,
) -> Result<Fusion, BuildError> {
    let Some(&Gate::Toffoli { c1, c2, target }) = sbox.gates().last() else {
        return Err(BuildError::NotTrailingToffoli(format!("{} gates", sbox.len())));
    };
    if sbox.wire_count() != 4 {
        return Err(BuildError::SboxWidth(format!("{}-wire circuit", sbox.wire_count())));
    }
    let gates: Vec<Gate> = sbox.gates()[..sbox.len() - 1]
        .iter()
        .map(|g| g.map_wires(|w| l_wires[w]))
        .collect();
    let forward = Circuit::from_parts(wire_count, gates, (0..wire_count).collect())?;
    let fused = Gate::Toffoli {
        c1: l_wires[c1],
        c2: l_wires[c2],
        target: r_target,
    };
    fused.validate(wire_count)?;
    let output_bit = sbox
        .relabel()
        .iter()
        .position(|&w| w == target)
        .expect("relabel is a permutation");
    Ok(Fusion {
        uncompute: forward.inverse(),
        forward,
        fused,
        output_bit,
    })
}

/// Gate sink plus the logical view of the registers.
struct Builder {
    wires: usize,
    gates: Vec<Gate>,
}

impl Builder {
    fn cnot(&mut self, control: Wire, target: Wire) {
        self.gates.push(Gate::Cnot { control, target });
    }

    fn not(&mut self, target: Wire) {
        self.gates.push(Gate::Not { target });
    }

    /// Applies `sbox` in place on `nibble` (S-box wire `w` on `nibble[w]`)
    /// and updates `nibble` so that entry `j` holds output bit `j`.
    fn sbox(&mut self, sbox: &Circuit, nibble: &mut [Wire]) {
        let host: Vec<Wire> = nibble.to_vec();
        self.gates
            .extend(sbox.gates().iter().map(|g| g.map_wires(|w| host[w])));
        for (j, &w) in sbox.relabel().iter().enumerate() {
            nibble[j] = host[w];
        }
    }

    fn finish(self, outputs: Vec<Wire>) -> Result<Circuit, CircuitError> {
        Circuit::from_parts(self.wires, self.gates, outputs)
    }
}

/// `reg` rotated left by `amount`: new bit `b` is old bit `b - amount`.
fn rotl(reg: &[Wire], amount: usize) -> Vec<Wire> {
    let n = reg.len();
    (0..n).map(|b| reg[(b + n - amount % n) % n]).collect()
}

fn rotr(reg: &[Wire], amount: usize) -> Vec<Wire> {
    rotl(reg, reg.len() - amount % reg.len())
}

fn set_bits(index: u32) -> impl Iterator<Item = usize> {
    (0..32).filter(move |b| (index >> b) & 1 == 1)
}

fn lblock_key_update(b: &mut Builder, key: &mut Vec<Wire>, s8: &Circuit, s9: &Circuit, index: u32) {
    *key = rotl(key, 29);
    b.sbox(s9, &mut key[76..80]);
    b.sbox(s8, &mut key[72..76]);
    for t in set_bits(index) {
        b.not(key[46 + t]);
    }
}

pub fn build_lblock(options: &BuildOptions) -> Result<Circuit, BuildError> {
    let rounds = options.rounds;
    if !(1..=lblock::ROUNDS).contains(&rounds) {
        return Err(ReferenceError::RoundsOutOfRange {
            rounds,
            max: lblock::ROUNDS,
        }
        .into());
    }
    let round_sboxes: Vec<&Circuit> = (0..8)
        .map(|i| options.sbox(&format!("s{i}")))
        .collect::<Result<_, _>>()?;
    let s8 = options.sbox("s8")?;
    let s9 = options.sbox("s9")?;
    if options.variant == Variant::Improved {
        for (i, c) in round_sboxes.iter().enumerate() {
            if !matches!(c.gates().last(), Some(Gate::Toffoli { .. })) {
                return Err(BuildError::NotTrailingToffoli(format!("s{i}")));
            }
        }
    }

    let layout = CipherLayout::of(Cipher::Lblock);
    let mut b = Builder {
        wires: layout.wire_count,
        gates: Vec::new(),
    };
    let mut l: Vec<Wire> = layout.left.clone().collect();
    let mut r: Vec<Wire> = layout.right.clone().collect();
    let mut key: Vec<Wire> = layout.key.clone().collect();

    for round in 1..=rounds {
        let mark = b.gates.len();
        let saved_l = l.clone();
        for j in 0..32 {
            b.cnot(key[48 + j], l[j]);
        }
        r = rotl(&r, 8);
        match options.variant {
            Variant::Original => {
                for (n, sc) in round_sboxes.iter().enumerate() {
                    b.sbox(sc, &mut l[4 * n..4 * n + 4]);
                }
            }
            Variant::Improved => {
                for (n, sc) in round_sboxes.iter().enumerate() {
                    let m = lblock::PERMUTATION_SOURCE
                        .iter()
                        .position(|&s| s == n)
                        .expect("permutation covers every nibble");
                    let nib: [Wire; 4] = l[4 * n..4 * n + 4].try_into().unwrap();
                    let Some(&Gate::Toffoli { target, .. }) = sc.gates().last() else {
                        unreachable!("checked above")
                    };
                    let j = sc.relabel().iter().position(|&w| w == target).unwrap();
                    let f = fuse_trailing_toffoli(sc, &nib, r[4 * m + j], b.wires)?;
                    b.gates.extend_from_slice(f.forward.gates());
                    b.gates.push(f.fused);
                    for (jj, &w) in sc.relabel().iter().enumerate() {
                        l[4 * n + jj] = nib[w];
                    }
                }
            }
        }
        let forward: Vec<Gate> = b.gates[mark..]
            .iter()
            .copied()
            .filter(|g| !(g.kind() == crate::circuit::GateKind::Toffoli && r.contains(&g.target())))
            .collect();
        for (m, &src) in lblock::PERMUTATION_SOURCE.iter().enumerate() {
            for j in 0..4 {
                b.cnot(l[4 * src + j], r[4 * m + j]);
            }
        }
        b.gates.extend(forward.into_iter().rev());
        l = saved_l;
        std::mem::swap(&mut l, &mut r);
        if round < rounds {
            lblock_key_update(&mut b, &mut key, s8, s9, round as u32);
        }
    }

    // ciphertext R_r || L_r: low half is L, high half is R
    let outputs: Vec<Wire> = l.iter().chain(&r).chain(&key).copied().collect();
    Ok(b.finish(outputs)?)
}

fn lici_key_update(b: &mut Builder, key: &mut Vec<Wire>, s: &Circuit, index: u32) {
    *key = rotl(key, 13);
    b.sbox(s, &mut key[0..4]);
    b.sbox(s, &mut key[4..8]);
    for t in set_bits(index & 0x1f) {
        b.not(key[59 + t]);
    }
}

pub fn build_lici(options: &BuildOptions) -> Result<Circuit, BuildError> {
    let rounds = options.rounds;
    if !(1..=lici::ROUNDS).contains(&rounds) {
        return Err(ReferenceError::RoundsOutOfRange {
            rounds,
            max: lici::ROUNDS,
        }
        .into());
    }
    let s = options.sbox("S")?;
    let layout = CipherLayout::of(Cipher::Lici);
    let mut b = Builder {
        wires: layout.wire_count,
        gates: Vec::new(),
    };
    let mut x: Vec<Wire> = layout.left.clone().collect();
    let mut y: Vec<Wire> = layout.right.clone().collect();
    let mut key: Vec<Wire> = layout.key.clone().collect();

    for round in 1..=rounds {
        for n in 0..8 {
            b.sbox(s, &mut x[4 * n..4 * n + 4]);
        }
        for j in 0..32 {
            b.cnot(x[j], y[j]);
        }
        for j in 0..32 {
            b.cnot(key[j], y[j]);
        }
        let next_x = rotl(&y, 3);
        for j in 0..32 {
            b.cnot(next_x[j], x[j]);
        }
        for j in 0..32 {
            b.cnot(key[32 + j], x[j]);
        }
        y = rotr(&x, 7);
        x = next_x;
        if round < rounds {
            lici_key_update(&mut b, &mut key, s, round as u32);
        }
    }

    let outputs: Vec<Wire> = y.iter().chain(&x).chain(&key).copied().collect();
    Ok(b.finish(outputs)?)
}

pub fn build(cipher: Cipher, options: &BuildOptions) -> Result<Circuit, BuildError> {
    match cipher {
        Cipher::Lblock => build_lblock(options),
        Cipher::Lici => build_lici(options),
    }
}

/// Metadata block recorded alongside a built circuit.
pub fn metadata(cipher: Cipher, options: &BuildOptions) -> serde_json::Value {
    let names: Vec<&str> = match cipher {
        Cipher::Lblock => vec!["s0", "s1", "s2", "s3", "s4", "s5", "s6", "s7", "s8", "s9"],
        Cipher::Lici => vec!["S"],
    };
    let sboxes: serde_json::Map<String, serde_json::Value> = names
        .iter()
        .filter_map(|n| options.sbox_circuits.get(*n).map(|r| (n, r)))
        .map(|(n, r)| {
            (
                n.to_string(),
                serde_json::json!({
                    "table": r.table,
                    "cost": r.cost,
                    "histogram": r.histogram,
                    "trailing_toffoli": r.ends_with_toffoli(),
                }),
            )
        })
        .collect();
    serde_json::json!({
        "cipher": cipher,
        "variant": match cipher {
            Cipher::Lblock => serde_json::to_value(options.variant).unwrap(),
            Cipher::Lici => serde_json::Value::Null,
        },
        "rounds": options.rounds,
        "sboxes": sboxes,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub sample: usize,
    pub plaintext: String,
    pub key: String,
    pub expected_state: String,
    pub got_state: String,
    pub expected_key: String,
    pub got_key: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub cipher: Cipher,
    pub rounds: usize,
    pub samples: usize,
    pub seed: u64,
    pub mismatches: usize,
    pub first_mismatch: Option<Mismatch>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.mismatches == 0
    }
}

/// Random `(plaintext, key)` pairs drawn from a seeded generator.
pub fn random_samples(cipher: Cipher, count: usize, seed: u64) -> Vec<(u64, u128)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (rng.gen::<u64>(), rng.gen::<u128>() & cipher.key_mask()))
        .collect()
}

/// Simulates `circuit` on the given samples and compares the state wires
/// with the reference ciphertext and the key wires with the reference key
/// register.
pub fn verify_against_reference(
    circuit: &Circuit,
    cipher: Cipher,
    rounds: usize,
    samples: &[(u64, u128)],
    seed: u64,
) -> Result<VerificationReport, BuildError> {
    let layout = CipherLayout::of(cipher);
    if circuit.wire_count() != layout.wire_count {
        return Err(CircuitError::WireCountMismatch {
            left: circuit.wire_count(),
            right: layout.wire_count,
        }
        .into());
    }
    let mut report = VerificationReport {
        cipher,
        rounds,
        samples: samples.len(),
        seed,
        mismatches: 0,
        first_mismatch: None,
    };
    for (chunk_idx, chunk) in samples.chunks(64).enumerate() {
        let out = run_lanes(circuit, &layout.load_lanes(chunk)).expect("lane count matches layout");
        for (k, ((state, kreg), &(pt, key))) in layout
            .read_lanes(&out, chunk.len())
            .into_iter()
            .zip(chunk)
            .enumerate()
        {
            let want = cipher.encrypt(pt, key, rounds)?;
            let want_key = cipher.final_key(key, rounds)?;
            if state != want || kreg != want_key {
                report.mismatches += 1;
                if report.first_mismatch.is_none() {
                    let kw = cipher.key_bits() / 4;
                    report.first_mismatch = Some(Mismatch {
                        sample: chunk_idx * 64 + k,
                        plaintext: format!("{pt:016x}"),
                        key: format!("{key:0kw$x}"),
                        expected_state: format!("{want:016x}"),
                        got_state: format!("{state:016x}"),
                        expected_key: format!("{want_key:0kw$x}"),
                        got_key: format!("{kreg:0kw$x}"),
                    });
                }
            }
        }
    }
    Ok(report)
}
