//! Synthesizes all eleven S-boxes and prints timings.
//!
//! `--trailing` requires a final Toffoli; `--out FILE` writes the results as
//! a JSON object keyed by S-box name.

use std::collections::BTreeMap;
use std::time::Instant;

use revcipher_core::synth::{synthesize, SynthesisOptions};
use revcipher_core::SboxTable;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let trailing = args.iter().any(|a| a == "--trailing");
    let out = args
        .iter()
        .position(|a| a == "--out")
        .and_then(|i| args.get(i + 1));
    let mut all = BTreeMap::new();
    for t in SboxTable::all() {
        let start = Instant::now();
        match synthesize(&t, &SynthesisOptions::default().trailing_toffoli(trailing)) {
            Ok(r) => {
                println!(
                    "{} cost={} {:?} nodes={} {:?}",
                    t.name(),
                    r.cost,
                    r.histogram,
                    r.nodes_explored,
                    start.elapsed()
                );
                all.insert(t.name().to_string(), r);
            }
            Err(e) => println!("{} {e} {:?}", t.name(), start.elapsed()),
        }
    }
    if let Some(path) = out {
        let json = serde_json::to_string_pretty(&all).expect("results serialize");
        std::fs::write(path, json + "\n").expect("write output file");
    }
}
