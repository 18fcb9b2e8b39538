//! Criterion benchmarks for the revcipher pipeline live in `benches/`.
