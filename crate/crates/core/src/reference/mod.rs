//! Classical reference implementations of LBlock and LiCi.
//!
//! These are the ground truth every reversible circuit is checked against.
//! Bit 0 is the least significant bit everywhere; nibble `j` of a word is
//! bits `4j+3..4j`, and an S-box reads its input's most significant bit as
//! `x0`.

pub mod lblock;
pub mod lici;
pub mod sbox;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use sbox::{lblock_sbox, SboxTable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReferenceError {
    #[error("unknown S-box {0:?}")]
    UnknownSbox(String),
    #[error("S-box entries are not a permutation of 0..16")]
    NotAPermutation,
    #[error("malformed S-box table {0:?}: expected 16 hex digits")]
    MalformedTable(String),
    #[error("key update index {index} outside 1..={max}")]
    UpdateIndexOutOfRange { index: u32, max: u32 },
    #[error("round count {rounds} outside 1..={max}")]
    RoundsOutOfRange { rounds: usize, max: usize },
    #[error("bad hex value {0:?}")]
    BadHex(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Cipher {
    #[serde(alias = "LBlock")]
    Lblock,
    #[serde(alias = "LiCi")]
    Lici,
}

impl Cipher {
    pub fn key_bits(self) -> usize {
        match self {
            Cipher::Lblock => lblock::KEY_BITS,
            Cipher::Lici => lici::KEY_BITS,
        }
    }

    pub fn block_bits(self) -> usize {
        64
    }

    pub fn full_rounds(self) -> usize {
        match self {
            Cipher::Lblock => lblock::ROUNDS,
            Cipher::Lici => lici::ROUNDS,
        }
    }

    pub fn key_mask(self) -> u128 {
        match self {
            Cipher::Lblock => lblock::KEY_MASK,
            Cipher::Lici => u128::MAX,
        }
    }

    pub fn encrypt(self, plaintext: u64, key: u128, rounds: usize) -> Result<u64, ReferenceError> {
        match self {
            Cipher::Lblock => lblock::encrypt(plaintext, key, rounds),
            Cipher::Lici => lici::encrypt(plaintext, key, rounds),
        }
    }

    /// Key register after the updates performed for `rounds` rounds.
    pub fn final_key(self, key: u128, rounds: usize) -> Result<u128, ReferenceError> {
        match self {
            Cipher::Lblock => lblock::key_schedule(key, rounds).map(|(_, k)| k),
            Cipher::Lici => lici::key_schedule(key, rounds).map(|(_, k)| k),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Cipher::Lblock => "LBlock",
            Cipher::Lici => "LiCi",
        }
    }
}

impl std::str::FromStr for Cipher {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "lblock" => Ok(Cipher::Lblock),
            "lici" => Ok(Cipher::Lici),
            other => Err(format!("unknown cipher {other:?} (expected lblock or lici)")),
        }
    }
}

/// One entry of a test-vector fixture file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestVector {
    pub cipher: Cipher,
    pub plaintext_hex: String,
    pub key_hex: String,
    pub ciphertext_hex: String,
    pub rounds: usize,
}

pub fn parse_hex(s: &str) -> Result<u128, ReferenceError> {
    let clean: String = s
        .trim_start_matches("0x")
        .chars()
        .filter(|c| !c.is_whitespace() && *c != '_')
        .collect();
    if clean.is_empty() || clean.len() > 32 {
        return Err(ReferenceError::BadHex(s.to_string()));
    }
    u128::from_str_radix(&clean, 16).map_err(|_| ReferenceError::BadHex(s.to_string()))
}

impl TestVector {
    /// Encrypts the fixture's plaintext and compares with its ciphertext.
    pub fn check(&self) -> Result<bool, ReferenceError> {
        let pt = parse_hex(&self.plaintext_hex)?;
        let key = parse_hex(&self.key_hex)?;
        let ct = parse_hex(&self.ciphertext_hex)?;
        let got = self.cipher.encrypt(pt as u64, key, self.rounds)?;
        Ok(got as u128 == ct)
    }
}

/// Test vectors bundled with the crate.
pub fn builtin_test_vectors() -> Vec<TestVector> {
    serde_json::from_str(include_str!("../../fixtures/test_vectors.json"))
        .expect("bundled test-vector fixture is valid")
}
