use proptest::prelude::*;

use revcipher_core::resources::{count, depth};
use revcipher_core::sim::{run, run_lanes, truth_table, BasisState};
use revcipher_core::{Circuit, CircuitDocument, DecompositionModel, Gate, WireMap};

fn gate_from(n: usize, kind: u8, a: usize, b: usize, c: usize, linear_only: bool) -> Gate {
    let t = a % n;
    let mut rest: Vec<usize> = (0..n).filter(|&w| w != t).collect();
    let c1 = rest.remove(b % rest.len());
    let kind = if linear_only { kind % 2 } else { kind % 3 };
    match kind {
        0 => Gate::Not { target: t },
        1 => Gate::Cnot { control: c1, target: t },
        _ if rest.is_empty() => Gate::Cnot { control: c1, target: t },
        _ => Gate::Toffoli {
            c1,
            c2: rest[c % rest.len()],
            target: t,
        },
    }
}

fn argsort(keys: &[u32]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..keys.len()).collect();
    idx.sort_by_key(|&i| (keys[i], i));
    idx
}

fn circuit_on(n: usize, max_gates: usize, linear_only: bool) -> impl Strategy<Value = Circuit> {
    (
        prop::collection::vec((any::<u8>(), any::<usize>(), any::<usize>(), any::<usize>()), 0..max_gates),
        prop::collection::vec(any::<u32>(), n),
    )
        .prop_map(move |(raw, keys)| {
            let gates = raw
                .into_iter()
                .map(|(k, a, b, c)| gate_from(n, k, a, b, c, linear_only))
                .collect();
            Circuit::from_parts(n, gates, argsort(&keys)).unwrap()
        })
}

fn wires() -> impl Strategy<Value = usize> {
    2usize..=6
}

fn circuit() -> impl Strategy<Value = Circuit> {
    wires().prop_flat_map(|n| circuit_on(n, 24, false))
}

fn pair() -> impl Strategy<Value = (Circuit, Circuit)> {
    wires().prop_flat_map(|n| (circuit_on(n, 16, false), circuit_on(n, 16, false)))
}

fn triple() -> impl Strategy<Value = (Circuit, Circuit, Circuit)> {
    wires().prop_flat_map(|n| (circuit_on(n, 12, false), circuit_on(n, 12, false), circuit_on(n, 12, false)))
}

fn circuit_and_map() -> impl Strategy<Value = (Circuit, WireMap)> {
    wires().prop_flat_map(|n| {
        (
            circuit_on(n, 20, false),
            prop::collection::vec(any::<u32>(), n).prop_map(|k| WireMap::new(argsort(&k)).unwrap()),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn compose_with_inverse_is_identity(c in circuit()) {
        let n = c.wire_count();
        let id = c.compose(&c.inverse()).unwrap();
        let tt = truth_table(&id).unwrap();
        prop_assert!((0..1u32 << n).all(|v| tt.apply(v) == v));
        let back = c.inverse().compose(&c).unwrap();
        let tt = truth_table(&back).unwrap();
        prop_assert!((0..1u32 << n).all(|v| tt.apply(v) == v));
    }

    #[test]
    fn compose_is_associative((a, b, c) in triple()) {
        let left = a.compose(&b).unwrap().compose(&c).unwrap();
        let right = a.compose(&b.compose(&c).unwrap()).unwrap();
        prop_assert_eq!(&left, &right);
        let seq = truth_table(&a).unwrap().then(&truth_table(&b).unwrap()).then(&truth_table(&c).unwrap());
        prop_assert_eq!(truth_table(&left).unwrap(), seq);
    }

    #[test]
    fn rewire_permutes_outputs_for_free((c, m) in circuit_and_map()) {
        let r = c.rewire(&m).unwrap();
        let model = DecompositionModel::default();
        prop_assert_eq!(count(&r, &model), count(&c, &model));
        prop_assert_eq!(depth(&r, &model), depth(&c, &model));
        let (a, b) = (truth_table(&c).unwrap(), truth_table(&r).unwrap());
        for v in 0..1u32 << c.wire_count() {
            prop_assert_eq!(b.apply(v) as u64, m.apply_u64(a.apply(v) as u64));
        }
    }

    #[test]
    fn counts_add_under_composition((a, b) in pair()) {
        let model = DecompositionModel::default();
        let (sa, sb) = (count(&a, &model), count(&b, &model));
        let s = count(&a.compose(&b).unwrap(), &model);
        prop_assert_eq!(s.cnot, sa.cnot + sb.cnot);
        prop_assert_eq!(s.h, sa.h + sb.h);
        prop_assert_eq!(s.t, sa.t + sb.t);
        prop_assert_eq!(s.x, sa.x + sb.x);
        prop_assert_eq!(s.toffoli, sa.toffoli + sb.toffoli);
        prop_assert!(s.full_depth <= sa.full_depth + sb.full_depth);
        prop_assert!(s.full_depth >= sa.full_depth.max(sb.full_depth));
    }

    #[test]
    fn appending_never_lowers_depth(c in circuit(), k in any::<u8>(), a in any::<usize>(), b in any::<usize>(), d in any::<usize>()) {
        let model = DecompositionModel::default();
        let (before, tbefore) = depth(&c, &model);
        let g = gate_from(c.wire_count(), k, a, b, d, false);
        let longer = c.clone().append(g).unwrap();
        let (after, tafter) = depth(&longer, &model);
        prop_assert!(after >= before && after >= 1);
        prop_assert!(tafter >= tbefore);
    }

    #[test]
    fn cnot_only_circuits_are_linear(c in wires().prop_flat_map(|n| circuit_on(n, 24, true))) {
        let cnots_only = Circuit::from_parts(
            c.wire_count(),
            c.gates().iter().copied().filter(|g| matches!(g, Gate::Cnot { .. })).collect(),
            c.relabel().to_vec(),
        ).unwrap();
        let tt = truth_table(&cnots_only).unwrap();
        prop_assert_eq!(tt.apply(0), 0);
        for x in 0..1u32 << c.wire_count() {
            for y in 0..1u32 << c.wire_count() {
                prop_assert_eq!(tt.apply(x ^ y), tt.apply(x) ^ tt.apply(y));
            }
        }
        // NOT gates make it affine
        let tt = truth_table(&c).unwrap();
        let k = tt.apply(0);
        for x in 0..1u32 << c.wire_count() {
            for y in 0..1u32 << c.wire_count() {
                prop_assert_eq!(tt.apply(x ^ y) ^ k, tt.apply(x) ^ tt.apply(y));
            }
        }
    }

    #[test]
    fn simulators_agree(c in circuit(), inputs in prop::collection::vec(any::<u64>(), 1..64)) {
        let n = c.wire_count();
        let mask = (1u64 << n) - 1;
        let tt = truth_table(&c).unwrap();
        let mut lanes = vec![0u64; n];
        for (k, v) in inputs.iter().enumerate() {
            for (w, lane) in lanes.iter_mut().enumerate() {
                *lane |= ((v >> w) & 1) << k;
            }
        }
        let out = run_lanes(&c, &lanes).unwrap();
        for (k, v) in inputs.iter().enumerate() {
            let v = v & mask;
            let basis = run(&c, &BasisState::from_u64(n, v)).unwrap().to_u64();
            let bits = out.iter().enumerate().fold(0u64, |acc, (w, l)| acc | (((l >> k) & 1) << w));
            prop_assert_eq!(basis, tt.apply(v as u32) as u64);
            prop_assert_eq!(bits, basis);
        }
    }

    #[test]
    fn json_round_trip(c in circuit()) {
        let doc = CircuitDocument { circuit: c, metadata: Some(serde_json::json!({"k": 1})) };
        let text = serde_json::to_string(&doc).unwrap();
        let back: CircuitDocument = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, doc);
    }
}
