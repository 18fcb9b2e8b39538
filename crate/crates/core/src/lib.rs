//! Reversible NCT circuits for the lightweight block ciphers LBlock and LiCi.
//!
//! The crate covers the whole pipeline: an NCT circuit IR ([`circuit`]), a
//! basis-state simulator ([`sim`]), reference ciphers ([`reference`]), an
//! in-place 4-bit S-box synthesizer ([`synth`]), full cipher circuit builders
//! ([`builders`]), Clifford+T resource counting ([`resources`]) and Grover
//! key-search cost estimation ([`grover`]).

pub mod builders;
pub mod circuit;
pub mod grover;
pub mod reference;
pub mod resources;
pub mod sim;
pub mod synth;

pub use circuit::{Circuit, CircuitDocument, CircuitError, Gate, GateKind, Wire, WireMap};
pub use reference::{Cipher, SboxTable};
pub use sim::{BasisState, TruthTable};
pub use builders::{BuildOptions, CipherLayout, Variant};
pub use resources::{DecompositionModel, ResourceSummary};
pub use synth::{builtin_sbox_circuits, SynthesisResult};
