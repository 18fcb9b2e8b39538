//! Builds the three full-round circuits from the bundled S-box fixture and
//! prints their resource table.

use revcipher_core::builders::{build, verify_against_reference, random_samples};
use revcipher_core::resources::{count, render_table};
use revcipher_core::{builtin_sbox_circuits, BuildOptions, Cipher, DecompositionModel, Variant};

fn main() {
    let sboxes = builtin_sbox_circuits();
    let model = DecompositionModel::default();
    let mut rows = Vec::new();
    for (label, cipher, variant) in [
        ("LBlock (original)", Cipher::Lblock, Variant::Original),
        ("LBlock (improved)", Cipher::Lblock, Variant::Improved),
        ("LiCi", Cipher::Lici, Variant::Original),
    ] {
        let opts = BuildOptions::new(cipher.full_rounds(), variant, sboxes.clone());
        let c = build(cipher, &opts).expect("build");
        let samples = random_samples(cipher, 100, 1);
        let rep = verify_against_reference(&c, cipher, opts.rounds, &samples, 1).expect("verify");
        println!("{label}: {} mismatches of {}", rep.mismatches, rep.samples);
        rows.push((label.to_string(), count(&c, &model)));
    }
    print!("{}", render_table(&rows));
}
