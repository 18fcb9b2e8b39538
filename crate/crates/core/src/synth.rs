//! In-place synthesis of 4-bit S-boxes over the NCT gate set.
//!
//! The search is a bidirectional uniform-cost search over permutations of
//! `{0..15}`. A permutation is stored as four 16-bit *planes* packed in a
//! `u64`: bit `v` of plane `b` is bit `b` of the image of `v`. In that form a
//! gate applied after the permutation is a single XOR on one plane, and a
//! relabeling of output wires is a reordering of planes.
//!
//! Output relabeling is free, so both frontiers are keyed by the canonical
//! form of a state modulo output-wire permutation (planes sorted ascending).
//! The forward frontier grows from the identity, the backward frontier from
//! the target table; a circuit is found whenever a state finalized on one
//! side, or one gate away from it, is already finalized on the other side.
//! With both sides complete through costs `a` and `b`, every circuit of cost
//! at most `a + b + 1` would have been seen, which bounds the optimum.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, Gate, GateKind};
use crate::reference::SboxTable;
use crate::sim::truth_table;

const IDENTITY: u64 = 0xAAAA | (0xCCCC << 16) | (0xF0F0 << 32) | (0xFF00 << 48);
const PLANE: u64 = 0xFFFF;
const NO_GATE: u8 = u8::MAX;
// planes of a permutation are distinct, so this is never a valid state
const VIRTUAL_ROOT: u64 = u64::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthError {
    #[error("no circuit found within cost budget {budget}")]
    NotFound { budget: u32 },
    #[error("cost budget must be positive")]
    ZeroBudget,
    #[error("gate weights must be strictly positive")]
    BadWeights,
    #[error("search stopped at {states} states before proving a circuit optimal")]
    StateLimit { states: usize },
}

/// Candidate gates on four wires with their integer cost weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GateLibrary {
    gates: Vec<Gate>,
    not_weight: u32,
    cnot_weight: u32,
    toffoli_weight: u32,
}

impl Default for GateLibrary {
    /// Weights in half units: Toffoli 5, CNOT 1, NOT 0.5.
    fn default() -> Self {
        GateLibrary::with_weights(1, 2, 10).unwrap()
    }
}

impl GateLibrary {
    pub fn with_weights(not: u32, cnot: u32, toffoli: u32) -> Result<Self, SynthError> {
        if not == 0 || cnot == 0 || toffoli == 0 {
            return Err(SynthError::BadWeights);
        }
        let mut gates = Vec::new();
        for t in 0..4 {
            gates.push(Gate::Not { target: t });
        }
        for c in 0..4 {
            for t in 0..4 {
                if c != t {
                    gates.push(Gate::Cnot { control: c, target: t });
                }
            }
        }
        for t in 0..4 {
            for c1 in 0..4 {
                for c2 in c1 + 1..4 {
                    if c1 != t && c2 != t {
                        gates.push(Gate::Toffoli { c1, c2, target: t });
                    }
                }
            }
        }
        Ok(GateLibrary {
            gates,
            not_weight: not,
            cnot_weight: cnot,
            toffoli_weight: toffoli,
        })
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn weight(&self, kind: GateKind) -> u32 {
        match kind {
            GateKind::Not => self.not_weight,
            GateKind::Cnot => self.cnot_weight,
            GateKind::Toffoli => self.toffoli_weight,
        }
    }

    pub fn circuit_cost(&self, circuit: &Circuit) -> u32 {
        circuit.gates().iter().map(|g| self.weight(g.kind())).sum()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateHistogram {
    pub toffoli: usize,
    pub cnot: usize,
    pub not: usize,
}

impl GateHistogram {
    pub fn of(circuit: &Circuit) -> Self {
        GateHistogram {
            toffoli: circuit.count(GateKind::Toffoli),
            cnot: circuit.count(GateKind::Cnot),
            not: circuit.count(GateKind::Not),
        }
    }

    pub fn total(&self) -> usize {
        self.toffoli + self.cnot + self.not
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SynthesisResult {
    pub name: String,
    pub table: String,
    pub circuit: Circuit,
    pub cost: u32,
    pub histogram: GateHistogram,
    pub nodes_explored: u64,
}

impl SynthesisResult {
    /// Wraps an existing 4-wire circuit, e.g. a hand-written listing.
    pub fn from_circuit(table: &SboxTable, circuit: Circuit, library: &GateLibrary) -> Self {
        SynthesisResult {
            name: table.name().to_string(),
            table: table.to_hex(),
            cost: library.circuit_cost(&circuit),
            histogram: GateHistogram::of(&circuit),
            circuit,
            nodes_explored: 0,
        }
    }

    pub fn ends_with_toffoli(&self) -> bool {
        matches!(self.circuit.gates().last(), Some(Gate::Toffoli { .. }))
    }
}

/// Exhaustive check of a synthesized circuit against its table.
pub fn verify(result: &SynthesisResult, table: &SboxTable) -> bool {
    circuit_implements(&result.circuit, table)
}

pub fn circuit_implements(circuit: &Circuit, table: &SboxTable) -> bool {
    if circuit.wire_count() != 4 {
        return false;
    }
    match truth_table(circuit) {
        Ok(tt) => (0..16).all(|v| tt.apply(v) == table.apply(v as u8) as u32),
        Err(_) => false,
    }
}

fn plane(state: u64, b: usize) -> u64 {
    (state >> (16 * b)) & PLANE
}

fn apply(state: u64, g: &Gate) -> u64 {
    match *g {
        Gate::Not { target } => state ^ (PLANE << (16 * target)),
        Gate::Cnot { control, target } => state ^ (plane(state, control) << (16 * target)),
        Gate::Toffoli { c1, c2, target } => {
            state ^ ((plane(state, c1) & plane(state, c2)) << (16 * target))
        }
    }
}

fn from_table(table: &SboxTable) -> u64 {
    let mut s = 0u64;
    for v in 0..16 {
        let y = table.apply(v as u8) as u64;
        for b in 0..4 {
            s |= ((y >> b) & 1) << (16 * b + v);
        }
    }
    s
}

/// Canonical form modulo output relabeling and its source map:
/// plane `p` of the result is plane `map[p]` of the input.
fn canonical(state: u64) -> (u64, [usize; 4]) {
    let mut idx = [0usize, 1, 2, 3];
    idx.sort_unstable_by_key(|&b| plane(state, b));
    let c = idx
        .iter()
        .enumerate()
        .fold(0, |acc, (p, &b)| acc | (plane(state, b) << (16 * p)));
    (c, idx)
}

fn canonical_key(state: u64) -> u64 {
    let mut p = [
        state & PLANE,
        (state >> 16) & PLANE,
        (state >> 32) & PLANE,
        (state >> 48) & PLANE,
    ];
    // four-element sorting network
    let cs = |p: &mut [u64; 4], a: usize, b: usize| {
        if p[a] > p[b] {
            p.swap(a, b)
        }
    };
    cs(&mut p, 0, 1);
    cs(&mut p, 2, 3);
    cs(&mut p, 0, 2);
    cs(&mut p, 1, 3);
    cs(&mut p, 1, 2);
    p[0] | (p[1] << 16) | (p[2] << 32) | (p[3] << 48)
}

#[derive(Clone, Copy)]
struct Entry {
    cost: u32,
    parent: u64,
    gate: u8,
    done: bool,
}

struct Frontier {
    start: u64,
    map: FxHashMap<u64, Entry>,
    buckets: Vec<Vec<u64>>,
    // every entry with cost < level is finalized
    level: u32,
}

impl Frontier {
    fn new(start: u64) -> Self {
        Frontier {
            start,
            map: FxHashMap::default(),
            buckets: Vec::new(),
            level: 0,
        }
    }

    fn seed_root(&mut self) {
        let key = canonical_key(self.start);
        self.map.insert(
            key,
            Entry {
                cost: 0,
                parent: key,
                gate: NO_GATE,
                done: false,
            },
        );
        self.push_bucket(0, key);
    }

    /// Root children through Toffoli gates only; the root itself is not
    /// a member, so every path out of this frontier starts with a Toffoli.
    fn seed_toffoli_children(&mut self, library: &GateLibrary) {
        let root = canonical_key(self.start);
        for (gi, g) in library.gates().iter().enumerate() {
            if g.kind() != GateKind::Toffoli {
                continue;
            }
            let child = canonical_key(apply(root, g));
            let cost = library.weight(GateKind::Toffoli);
            self.relax(child, cost, VIRTUAL_ROOT, gi as u8);
        }
    }

    fn push_bucket(&mut self, cost: u32, key: u64) {
        let c = cost as usize;
        if self.buckets.len() <= c {
            self.buckets.resize_with(c + 1, Vec::new);
        }
        self.buckets[c].push(key);
    }

    fn relax(&mut self, key: u64, cost: u32, parent: u64, gate: u8) {
        match self.map.get_mut(&key) {
            Some(e) if e.done || e.cost <= cost => return,
            Some(e) => {
                e.cost = cost;
                e.parent = parent;
                e.gate = gate;
            }
            None => {
                self.map.insert(
                    key,
                    Entry {
                        cost,
                        parent,
                        gate,
                        done: false,
                    },
                );
            }
        }
        self.push_bucket(cost, key);
    }

    fn done_cost(&self, key: u64) -> Option<u32> {
        self.map.get(&key).filter(|e| e.done).map(|e| e.cost)
    }

    fn pending(&self) -> bool {
        self.buckets.len() > self.level as usize
    }

    fn next_bucket_len(&self) -> usize {
        self.buckets.get(self.level as usize).map_or(0, Vec::len)
    }

    /// Gate sequence (indices into the library) from the start state to
    /// `key`, expressed in canonical frames.
    fn chain(&self, key: u64) -> Vec<u8> {
        let mut gates = Vec::new();
        let mut k = key;
        loop {
            let e = self.map[&k];
            if e.gate == NO_GATE {
                break;
            }
            gates.push(e.gate);
            if e.parent == VIRTUAL_ROOT {
                break;
            }
            k = e.parent;
        }
        gates.reverse();
        gates
    }

    /// Replays the chain from the start state and returns the real gates,
    /// the real end state and the source map from the real state to the
    /// canonical key (`key` plane `p` = real plane `map[p]`).
    fn realize(&self, key: u64, library: &GateLibrary) -> (Vec<Gate>, u64, [usize; 4]) {
        let (mut canon, mut map) = canonical(self.start);
        let mut real = self.start;
        let mut gates = Vec::new();
        for gi in self.chain(key) {
            let g = library.gates()[gi as usize];
            let g_real = g.map_wires(|w| map[w]);
            real = apply(real, &g_real);
            gates.push(g_real);
            let (c, sigma) = canonical(apply(canon, &g));
            map = [map[sigma[0]], map[sigma[1]], map[sigma[2]], map[sigma[3]]];
            canon = c;
        }
        debug_assert_eq!(canon, key);
        (gates, real, map)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Meet {
    forward: u64,
    gate: Option<u8>,
    backward: u64,
    cost: u32,
}

/// Options for [`synthesize`].
#[derive(Debug, Clone)]
pub struct SynthesisOptions {
    pub library: GateLibrary,
    /// Upper bound on total cost, in library weight units.
    pub budget: u32,
    /// Require the last gate to be a Toffoli.
    pub trailing_toffoli: bool,
    /// Stop once both frontiers together hold this many states. Each state
    /// costs roughly 65 bytes.
    pub max_states: usize,
}

impl Default for SynthesisOptions {
    fn default() -> Self {
        SynthesisOptions {
            library: GateLibrary::default(),
            budget: 80,
            trailing_toffoli: false,
            max_states: 40_000_000,
        }
    }
}

impl SynthesisOptions {
    pub fn trailing_toffoli(mut self, on: bool) -> Self {
        self.trailing_toffoli = on;
        self
    }

    pub fn budget(mut self, budget: u32) -> Self {
        self.budget = budget;
        self
    }
}

fn encoding(g: &Gate) -> (u8, Vec<usize>) {
    let k = match g.kind() {
        GateKind::Toffoli => 0,
        GateKind::Cnot => 1,
        GateKind::Not => 2,
    };
    (k, g.wires())
}

/// Orders equal-cost candidates: fewer Toffoli, then fewer gates, then the
/// lexicographically smallest gate list.
fn tie_break(a: &Circuit, b: &Circuit) -> Ordering {
    let ka = (a.count(GateKind::Toffoli), a.len());
    let kb = (b.count(GateKind::Toffoli), b.len());
    ka.cmp(&kb).then_with(|| {
        let ea: Vec<_> = a.gates().iter().map(encoding).collect();
        let eb: Vec<_> = b.gates().iter().map(encoding).collect();
        ea.cmp(&eb).then_with(|| a.relabel().cmp(b.relabel()))
    })
}

struct Search<'a> {
    library: &'a GateLibrary,
    forward: Frontier,
    backward: Frontier,
    trailing: bool,
    best: Option<(u32, Circuit)>,
    table: &'a SboxTable,
    nodes: u64,
    max_states: usize,
    truncated: bool,
}

impl Search<'_> {
    fn build(&self, m: &Meet) -> Circuit {
        let (mut fgates, _, fmap) = self.forward.realize(m.forward, self.library);
        let (bgates, _, bmap) = self.backward.realize(m.backward, self.library);
        // y is the forward real state, plus the joining gate if any;
        // yk is its canonical-frame image (plane p = y plane ymap[p])
        let mut ymap = fmap;
        let mut yk = m.forward;
        if let Some(gi) = m.gate {
            let g = self.library.gates()[gi as usize];
            let g_real = g.map_wires(|w| fmap[w]);
            fgates.push(g_real);
            let (c, tau) = canonical(apply(yk, &g));
            ymap = [fmap[tau[0]], fmap[tau[1]], fmap[tau[2]], fmap[tau[3]]];
            yk = c;
        }
        debug_assert_eq!(yk, m.backward);
        // backward real plane bmap[p] equals forward real plane ymap[p]
        let mut u = [0usize; 4];
        for p in 0..4 {
            u[bmap[p]] = ymap[p];
        }
        let head = Circuit::from_parts(4, fgates, u.to_vec()).expect("4-wire gates");
        let tail = Circuit::from_parts(4, bgates.into_iter().rev().collect(), vec![0, 1, 2, 3])
            .expect("4-wire gates");
        head.compose(&tail).expect("same width")
    }

    fn offer(&mut self, m: Meet) {
        if let Some((best, _)) = &self.best {
            if m.cost > *best {
                return;
            }
        }
        let circuit = self.build(&m);
        assert!(
            circuit_implements(&circuit, self.table),
            "joined circuit does not implement {}",
            self.table
        );
        if self.trailing && !matches!(circuit.gates().last(), Some(Gate::Toffoli { .. })) {
            return;
        }
        let replace = match &self.best {
            None => true,
            Some((best, cur)) => {
                m.cost < *best || (m.cost == *best && tie_break(&circuit, cur) == Ordering::Less)
            }
        };
        if replace {
            self.best = Some((m.cost, circuit));
        }
    }

    /// Finalizes one cost level on the chosen side.
    fn step(&mut self, forward_side: bool) {
        let (this, other) = if forward_side {
            (&mut self.forward, &self.backward)
        } else {
            (&mut self.backward, &self.forward)
        };
        let level = this.level;
        let bucket = this
            .buckets
            .get_mut(level as usize)
            .map(std::mem::take)
            .unwrap_or_default();
        let mut meets = Vec::new();
        let lib = self.library;
        for key in bucket {
            let e = match this.map.get_mut(&key) {
                Some(e) if !e.done && e.cost == level => e,
                _ => continue,
            };
            e.done = true;
            self.nodes += 1;
            if let Some(oc) = other.done_cost(key) {
                meets.push((key, None, key, level + oc));
            }
            for (gi, g) in lib.gates().iter().enumerate() {
                let w = lib.weight(g.kind());
                let child = canonical_key(apply(key, g));
                if let Some(oc) = other.done_cost(child) {
                    meets.push((key, Some(gi as u8), child, level + w + oc));
                }
                if this.map.len() + other.map.len() >= self.max_states {
                    self.truncated = true;
                } else {
                    this.relax(child, level + w, key, gi as u8);
                }
            }
        }
        this.level += 1;
        for (a, g, b, cost) in meets {
            let m = if forward_side {
                Meet {
                    forward: a,
                    gate: g,
                    backward: b,
                    cost,
                }
            } else {
                // the joining gate was applied on the backward side; view the
                // meet from the forward state `b` instead
                match g {
                    None => Meet {
                        forward: b,
                        gate: None,
                        backward: a,
                        cost,
                    },
                    Some(gi) => {
                        let gate = self.library.gates()[gi as usize];
                        let Some(m) = self.flip_meet(a, gate, b, cost) else {
                            continue;
                        };
                        m
                    }
                }
            };
            self.offer(m);
        }
    }

    /// A backward state `bk` whose gate-`g` neighbor is the forward state
    /// `fk`: find a library gate taking `fk` onto `bk`'s class.
    fn flip_meet(&self, bk: u64, _g: Gate, fk: u64, cost: u32) -> Option<Meet> {
        let fcost = self.forward.done_cost(fk)?;
        let bcost = self.backward.done_cost(bk)?;
        for (gi, h) in self.library.gates().iter().enumerate() {
            if fcost + self.library.weight(h.kind()) + bcost != cost {
                continue;
            }
            if canonical_key(apply(fk, h)) == bk {
                return Some(Meet {
                    forward: fk,
                    gate: Some(gi as u8),
                    backward: bk,
                    cost,
                });
            }
        }
        None
    }
}

/// Finds a cheapest 4-wire NCT circuit (with free output relabeling) whose
/// truth table equals `table`.
pub fn synthesize(table: &SboxTable, options: &SynthesisOptions) -> Result<SynthesisResult, SynthError> {
    if options.budget == 0 {
        return Err(SynthError::ZeroBudget);
    }
    let library = &options.library;
    let target = from_table(table);
    let mut search = Search {
        library,
        forward: Frontier::new(IDENTITY),
        backward: Frontier::new(target),
        trailing: options.trailing_toffoli,
        best: None,
        table,
        nodes: 0,
        max_states: options.max_states,
        truncated: false,
    };
    search.forward.seed_root();
    if options.trailing_toffoli {
        search.backward.seed_toffoli_children(library);
    } else {
        search.backward.seed_root();
    }

    loop {
        // complete through level - 1 on each side
        let reach = search.forward.level as i64 + search.backward.level as i64 - 1;
        if let Some((best, _)) = &search.best {
            if (*best as i64) <= reach {
                break;
            }
        }
        if reach >= options.budget as i64 {
            break;
        }
        let (f, b) = (&search.forward, &search.backward);
        if !f.pending() && !b.pending() {
            break;
        }
        if search.truncated {
            break;
        }
        // the trailing-Toffoli backward side only starts at the Toffoli weight
        let grow_forward = if !b.pending() {
            true
        } else if !f.pending() {
            false
        } else {
            let fw = f.map.len() + f.next_bucket_len();
            let bw = b.map.len() + b.next_bucket_len();
            fw <= bw
        };
        search.step(grow_forward);
    }

    let nodes = search.nodes;
    if search.truncated {
        // levels past the truncation are incomplete, so only a circuit
        // already proven optimal survives
        let reach = search.forward.level as i64 + search.backward.level as i64 - 1;
        if !matches!(&search.best, Some((best, _)) if (*best as i64) <= reach) {
            return Err(SynthError::StateLimit {
                states: search.forward.map.len() + search.backward.map.len(),
            });
        }
    }
    match search.best {
        Some((cost, circuit)) if cost <= options.budget => {
            Ok(SynthesisResult {
                name: table.name().to_string(),
                table: table.to_hex(),
                histogram: GateHistogram::of(&circuit),
                cost,
                circuit,
                nodes_explored: nodes,
            })
        }
        _ => Err(SynthError::NotFound {
            budget: options.budget,
        }),
    }
}

/// Pre-synthesized circuits for all eleven S-boxes, keyed `s0`..`s9` and
/// `S`. Each one ends in a Toffoli, so the set serves both LBlock variants.
/// Entries are re-verified on load.
pub fn builtin_sbox_circuits() -> BTreeMap<String, SynthesisResult> {
    let map: BTreeMap<String, SynthesisResult> =
        serde_json::from_str(include_str!("../fixtures/sboxes.json"))
            .expect("bundled S-box fixture parses");
    for (name, r) in &map {
        let table = SboxTable::named(name).expect("fixture names are known S-boxes");
        assert!(verify(r, &table), "bundled circuit for {name} is wrong");
    }
    map
}
