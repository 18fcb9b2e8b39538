use std::collections::BTreeMap;

use revcipher_core::builders::{
    build, build_lblock, build_lici, random_samples, verify_against_reference, BuildOptions,
    CipherLayout, Variant,
};
use revcipher_core::reference::builtin_test_vectors;
use revcipher_core::sim::run_lanes;
use revcipher_core::{builtin_sbox_circuits, Cipher, GateKind, SynthesisResult};

fn sboxes() -> BTreeMap<String, SynthesisResult> {
    builtin_sbox_circuits()
}

fn check_all_rounds(cipher: Cipher, variant: Variant) {
    let s = sboxes();
    for rounds in 1..=cipher.full_rounds() {
        let c = build(cipher, &BuildOptions::new(rounds, variant, s.clone())).unwrap();
        let samples = random_samples(cipher, 100, 1000 + rounds as u64);
        let rep = verify_against_reference(&c, cipher, rounds, &samples, 0).unwrap();
        assert!(rep.passed(), "{cipher:?} {variant:?} rounds={rounds}: {:?}", rep.first_mismatch);
    }
}

#[test]
fn lblock_improved_every_round_count() {
    check_all_rounds(Cipher::Lblock, Variant::Improved);
}

#[test]
fn lblock_original_every_round_count() {
    check_all_rounds(Cipher::Lblock, Variant::Original);
}

#[test]
fn lici_every_round_count() {
    check_all_rounds(Cipher::Lici, Variant::Original);
}

#[test]
fn one_round_lblock_leaves_key_untouched() {
    let c = build_lblock(&BuildOptions::new(1, Variant::Improved, sboxes())).unwrap();
    let layout = CipherLayout::of(Cipher::Lblock);
    let samples = random_samples(Cipher::Lblock, 20, 5);
    let out = layout.read_lanes(&run_lanes(&c, &layout.load_lanes(&samples)).unwrap(), 20);
    for ((state, key), (pt, k0)) in out.into_iter().zip(samples) {
        assert_eq!(state, Cipher::Lblock.encrypt(pt, k0, 1).unwrap());
        assert_eq!(key, k0);
    }
}

#[test]
fn bundled_vectors_through_the_circuit() {
    let s = sboxes();
    for v in builtin_test_vectors() {
        let pt = u64::from_str_radix(&v.plaintext_hex, 16).unwrap();
        let key = u128::from_str_radix(&v.key_hex, 16).unwrap();
        let ct = u64::from_str_radix(&v.ciphertext_hex, 16).unwrap();
        for variant in [Variant::Original, Variant::Improved] {
            let c = build(v.cipher, &BuildOptions::new(v.rounds, variant, s.clone())).unwrap();
            let layout = CipherLayout::of(v.cipher);
            let out = run_lanes(&c, &layout.load_lanes(&[(pt, key)])).unwrap();
            assert_eq!(layout.read_lanes(&out, 1)[0].0, ct, "{variant:?}");
        }
    }
}

#[test]
fn variants_agree_and_differ_by_eight_toffoli_per_round() {
    let s = sboxes();
    for rounds in [1, 5, 32] {
        let orig = build_lblock(&BuildOptions::new(rounds, Variant::Original, s.clone())).unwrap();
        let imp = build_lblock(&BuildOptions::new(rounds, Variant::Improved, s.clone())).unwrap();
        assert_eq!(
            orig.count(GateKind::Toffoli) - imp.count(GateKind::Toffoli),
            8 * rounds
        );
        let layout = CipherLayout::of(Cipher::Lblock);
        let samples = random_samples(Cipher::Lblock, 64, 77);
        let lanes = layout.load_lanes(&samples);
        assert_eq!(run_lanes(&orig, &lanes).unwrap(), run_lanes(&imp, &lanes).unwrap());
    }
}

#[test]
fn circuits_are_in_place() {
    let s = sboxes();
    let lb = build_lblock(&BuildOptions::new(32, Variant::Improved, s.clone())).unwrap();
    let li = build_lici(&BuildOptions::new(31, Variant::Original, s)).unwrap();
    assert_eq!(lb.wire_count(), 144);
    assert_eq!(li.wire_count(), 192);
}

#[test]
fn inverse_restores_inputs() {
    let s = sboxes();
    for cipher in [Cipher::Lblock, Cipher::Lici] {
        let c = build(cipher, &BuildOptions::new(cipher.full_rounds(), Variant::Improved, s.clone())).unwrap();
        let round_trip = c.compose(&c.inverse()).unwrap();
        let layout = CipherLayout::of(cipher);
        let samples = random_samples(cipher, 10, 9);
        let lanes = layout.load_lanes(&samples);
        assert_eq!(run_lanes(&round_trip, &lanes).unwrap(), lanes, "{cipher:?}");
    }
}

#[test]
fn toffoli_totals() {
    let s = sboxes();
    let count = |cipher: Cipher, v: Variant| {
        build(cipher, &BuildOptions::new(cipher.full_rounds(), v, s.clone()))
            .unwrap()
            .count(GateKind::Toffoli)
    };
    assert_eq!(count(Cipher::Lblock, Variant::Original), 32 * 8 * 8 + 31 * 2 * 4);
    assert_eq!(count(Cipher::Lblock, Variant::Improved), 2040);
    assert_eq!(count(Cipher::Lici, Variant::Original), 31 * 8 * 4 + 30 * 2 * 4);
}

#[test]
fn linear_layer_cnot_counts() {
    // LBlock: round key in, copy, round key out; LiCi: four 32-bit XORs
    let s = sboxes();
    let sbox_cnots = |names: &[&str]| -> usize { names.iter().map(|n| s[*n].histogram.cnot).sum() };
    let round = ["s0", "s1", "s2", "s3", "s4", "s5", "s6", "s7"];
    let lb = build_lblock(&BuildOptions::new(32, Variant::Original, s.clone())).unwrap();
    assert_eq!(
        lb.count(GateKind::Cnot),
        32 * 96 + 32 * 2 * sbox_cnots(&round) + 31 * sbox_cnots(&["s8", "s9"])
    );
    let li = build_lici(&BuildOptions::new(31, Variant::Original, s.clone())).unwrap();
    assert_eq!(li.count(GateKind::Cnot), 31 * 128 + (31 * 8 + 30 * 2) * s["S"].histogram.cnot);
}

#[test]
fn round_constants_are_not_gates_on_set_bits() {
    // S-box NOTs plus one NOT per set bit of each update counter
    let s = sboxes();
    let nots = |n: &str| s[n].histogram.not;
    let round: usize = (0..8).map(|i| nots(&format!("s{i}"))).sum();
    let lb = build_lblock(&BuildOptions::new(32, Variant::Improved, s.clone())).unwrap();
    let consts: usize = (1u32..32).map(|i| i.count_ones() as usize).sum();
    assert_eq!(
        lb.count(GateKind::Not),
        32 * 2 * round + 31 * (nots("s8") + nots("s9")) + consts
    );
    let li = build_lici(&BuildOptions::new(31, Variant::Original, s.clone())).unwrap();
    let consts: usize = (1u32..31).map(|i| (i & 0x1f).count_ones() as usize).sum();
    assert_eq!(li.count(GateKind::Not), (31 * 8 + 30 * 2) * nots("S") + consts);
}
