use std::sync::{Mutex, MutexGuard};

use revcipher_core::sim::truth_table;
use revcipher_core::synth::{
    builtin_sbox_circuits, circuit_implements, synthesize, verify, GateLibrary, SynthError,
    SynthesisOptions, SynthesisResult,
};
use revcipher_core::{Circuit, Gate, SboxTable};

// Full searches hold a few GB each; run them one at a time.
static SEARCH: Mutex<()> = Mutex::new(());

fn exclusive() -> MutexGuard<'static, ()> {
    SEARCH.lock().unwrap_or_else(|e| e.into_inner())
}

/// Hand-written s0 circuit in `target <- gate(controls)` form, with the
/// outputs emitted as y1 y0 y2 y3 on wires 0..3.
fn s0_reference_listing() -> Circuit {
    Circuit::from_parts(
        4,
        vec![
            Gate::Cnot { control: 3, target: 0 },
            Gate::Not { target: 3 },
            Gate::Toffoli { c1: 3, c2: 2, target: 1 },
            Gate::Toffoli { c1: 0, c2: 1, target: 3 },
            Gate::Cnot { control: 0, target: 1 },
            Gate::Not { target: 0 },
            Gate::Toffoli { c1: 1, c2: 2, target: 0 },
            Gate::Toffoli { c1: 3, c2: 0, target: 2 },
        ],
        vec![1, 0, 2, 3],
    )
    .unwrap()
}

#[test]
fn reference_listing_implements_s0() {
    let t = SboxTable::lblock(0);
    let r = SynthesisResult::from_circuit(&t, s0_reference_listing(), &GateLibrary::default());
    assert!(verify(&r, &t));
    assert_eq!((r.histogram.toffoli, r.histogram.cnot, r.histogram.not), (4, 2, 2));
    assert!(r.ends_with_toffoli());
}

#[test]
fn bundled_circuits_are_complete_and_correct() {
    let all = builtin_sbox_circuits();
    assert_eq!(all.len(), 11);
    for t in SboxTable::all() {
        let r = &all[t.name()];
        assert_eq!(r.table, t.to_hex());
        assert!(verify(r, &t), "{}", t.name());
        assert_eq!(r.histogram.toffoli, 4, "{}", t.name());
        assert!(r.ends_with_toffoli(), "{}", t.name());
        assert!(truth_table(&r.circuit).unwrap().is_permutation());
    }
}

#[test]
fn deleting_any_gate_breaks_s0() {
    let t = SboxTable::lblock(0);
    let c = &builtin_sbox_circuits()["s0"].circuit;
    for i in 0..c.len() {
        let mut gates = c.gates().to_vec();
        gates.remove(i);
        let mutated = Circuit::from_parts(4, gates, c.relabel().to_vec()).unwrap();
        assert!(!circuit_implements(&mutated, &t), "gate {i} was redundant");
    }
}

#[test]
fn unconstrained_s0_matches_histogram() {
    let _guard = exclusive();
    let t = SboxTable::lblock(0);
    let r = synthesize(&t, &SynthesisOptions::default()).unwrap();
    assert!(verify(&r, &t));
    assert_eq!((r.histogram.toffoli, r.histogram.cnot, r.histogram.not), (4, 2, 2));
    assert_eq!(r.cost, 46);
}

#[test]
fn trailing_synthesis_is_deterministic_and_matches_bundle() {
    let _guard = exclusive();
    let t = SboxTable::lblock(7);
    let opts = SynthesisOptions::default().trailing_toffoli(true);
    let a = synthesize(&t, &opts).unwrap();
    let b = synthesize(&t, &opts).unwrap();
    assert_eq!(a, b);
    assert_eq!(a, builtin_sbox_circuits()["s7"]);
}

#[test]
fn single_toffoli_permutation_costs_one_toffoli() {
    let c = Circuit::from_parts(4, vec![Gate::Toffoli { c1: 0, c2: 2, target: 3 }], (0..4).collect()).unwrap();
    let tt = truth_table(&c).unwrap();
    let entries: [u8; 16] = std::array::from_fn(|v| tt.apply(v as u32) as u8);
    let table = SboxTable::new("tof", entries).unwrap();
    let r = synthesize(&table, &SynthesisOptions::default()).unwrap();
    assert_eq!(r.cost, 10);
    assert_eq!(r.circuit.len(), 1);
}

#[test]
fn tight_budget_reports_not_found() {
    let t = SboxTable::lblock(0);
    let err = synthesize(&t, &SynthesisOptions::default().budget(20)).unwrap_err();
    assert_eq!(err, SynthError::NotFound { budget: 20 });
}

#[test]
fn state_cap_is_an_error_not_a_partial_answer() {
    let t = SboxTable::lblock(0);
    let opts = SynthesisOptions {
        max_states: 10_000,
        ..SynthesisOptions::default()
    };
    assert!(matches!(synthesize(&t, &opts), Err(SynthError::StateLimit { .. })));
}

#[test]
fn weights_steer_linear_gates_for_lici() {
    let _guard = exclusive();
    // NOT dearer than CNOT: the single-NOT form wins even without the
    // trailing-Toffoli constraint
    let t = SboxTable::lici();
    let opts = SynthesisOptions {
        library: GateLibrary::with_weights(3, 2, 10).unwrap(),
        ..SynthesisOptions::default()
    };
    let r = synthesize(&t, &opts).unwrap();
    assert!(verify(&r, &t));
    assert_eq!(r.histogram.toffoli, 4);
    assert!(r.histogram.not <= 1);
}
