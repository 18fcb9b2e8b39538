use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ReferenceError;

/// A 4-bit S-box given as its 16 images.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SboxTable {
    name: String,
    entries: [u8; 16],
}

pub const LBLOCK_TABLES: [[u8; 16]; 10] = [
    [0xe, 0x9, 0xf, 0x0, 0xd, 0x4, 0xa, 0xb, 0x1, 0x2, 0x8, 0x3, 0x7, 0x6, 0xc, 0x5],
    [0x4, 0xb, 0xe, 0x9, 0xf, 0xd, 0x0, 0xa, 0x7, 0xc, 0x5, 0x6, 0x2, 0x8, 0x1, 0x3],
    [0x1, 0xe, 0x7, 0xc, 0xf, 0xd, 0x0, 0x6, 0xb, 0x5, 0x9, 0x3, 0x2, 0x4, 0x8, 0xa],
    [0x7, 0x6, 0x8, 0xb, 0x0, 0xf, 0x3, 0xe, 0x9, 0xa, 0xc, 0xd, 0x5, 0x2, 0x4, 0x1],
    [0xe, 0x5, 0xf, 0x0, 0x7, 0x2, 0xc, 0xd, 0x1, 0x8, 0x4, 0x9, 0xb, 0xa, 0x6, 0x3],
    [0x2, 0xd, 0xb, 0xc, 0xf, 0xe, 0x0, 0x9, 0x7, 0xa, 0x6, 0x3, 0x1, 0x8, 0x4, 0x5],
    [0xb, 0x9, 0x4, 0xe, 0x0, 0xf, 0xa, 0xd, 0x6, 0xc, 0x5, 0x7, 0x3, 0x8, 0x1, 0x2],
    [0xd, 0xa, 0xf, 0x0, 0xe, 0x4, 0x9, 0xb, 0x2, 0x1, 0x8, 0x3, 0x7, 0x5, 0xc, 0x6],
    [0x8, 0x7, 0xe, 0x5, 0xf, 0xd, 0x0, 0x6, 0xb, 0xc, 0x9, 0xa, 0x2, 0x4, 0x1, 0x3],
    [0xb, 0x5, 0xf, 0x0, 0x7, 0x2, 0x9, 0xd, 0x4, 0x8, 0x1, 0xc, 0xe, 0xa, 0x3, 0x6],
];

// Input 7 maps to 8, the only value missing from the other fifteen images.
pub const LICI_TABLE: [u8; 16] = [
    0x3, 0xf, 0xe, 0x1, 0x0, 0xa, 0x5, 0x8, 0xc, 0x4, 0xb, 0x2, 0x9, 0x7, 0x6, 0xd,
];

impl SboxTable {
    pub fn new(name: impl Into<String>, entries: [u8; 16]) -> Result<Self, ReferenceError> {
        let mut seen = [false; 16];
        for &e in &entries {
            if e > 15 || seen[e as usize] {
                return Err(ReferenceError::NotAPermutation);
            }
            seen[e as usize] = true;
        }
        Ok(SboxTable {
            name: name.into(),
            entries,
        })
    }

    /// `s0`..`s9` for LBlock, `S` (or `lici`) for LiCi.
    pub fn named(name: &str) -> Result<Self, ReferenceError> {
        let entries = match name {
            "S" | "lici" => LICI_TABLE,
            _ => {
                let idx = name
                    .strip_prefix('s')
                    .and_then(|d| d.parse::<usize>().ok())
                    .filter(|&i| i < 10 && name.len() == 2)
                    .ok_or_else(|| ReferenceError::UnknownSbox(name.to_string()))?;
                LBLOCK_TABLES[idx]
            }
        };
        SboxTable::new(if name == "lici" { "S" } else { name }, entries)
    }

    pub fn lblock(i: usize) -> Self {
        SboxTable::new(format!("s{i}"), LBLOCK_TABLES[i]).expect("LBlock tables are permutations")
    }

    pub fn lici() -> Self {
        SboxTable::new("S", LICI_TABLE).expect("LiCi table is a permutation")
    }

    pub fn identity() -> Self {
        let mut e = [0u8; 16];
        for (i, v) in e.iter_mut().enumerate() {
            *v = i as u8;
        }
        SboxTable::new("id", e).unwrap()
    }

    /// All eleven tables used by the two ciphers.
    pub fn all() -> Vec<SboxTable> {
        (0..10).map(SboxTable::lblock).chain([SboxTable::lici()]).collect()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn entries(&self) -> &[u8; 16] {
        &self.entries
    }

    pub fn apply(&self, nibble: u8) -> u8 {
        self.entries[(nibble & 0xf) as usize]
    }

    pub fn inverse(&self) -> SboxTable {
        let mut inv = [0u8; 16];
        for (i, &e) in self.entries.iter().enumerate() {
            inv[e as usize] = i as u8;
        }
        SboxTable {
            name: format!("{}^-1", self.name),
            entries: inv,
        }
    }

    /// Applies the S-box to all nibbles of a word, nibble `j` at bits `4j+3..4j`.
    pub fn apply_word(&self, word: u32) -> u32 {
        (0..8).fold(0, |acc, j| {
            acc | ((self.apply(((word >> (4 * j)) & 0xf) as u8) as u32) << (4 * j))
        })
    }

    pub fn to_hex(&self) -> String {
        self.entries.iter().map(|e| format!("{e:x}")).collect()
    }

    /// Parses 16 hex digits; whitespace is ignored.
    pub fn from_hex(name: impl Into<String>, hex: &str) -> Result<Self, ReferenceError> {
        let digits: Vec<u8> = hex
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| {
                c.to_digit(16)
                    .map(|d| d as u8)
                    .ok_or_else(|| ReferenceError::MalformedTable(hex.to_string()))
            })
            .collect::<Result<_, _>>()?;
        let entries: [u8; 16] = digits
            .try_into()
            .map_err(|_| ReferenceError::MalformedTable(hex.to_string()))?;
        SboxTable::new(name, entries)
    }
}

impl fmt::Display for SboxTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={}", self.name, self.to_hex())
    }
}

impl FromStr for SboxTable {
    type Err = ReferenceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SboxTable::from_hex("custom", s)
    }
}

/// Looks up one of LBlock's ten S-boxes by name.
pub fn lblock_sbox(name: &str, nibble: u8) -> Result<u8, ReferenceError> {
    let t = SboxTable::named(name)?;
    if t.name() == "S" {
        return Err(ReferenceError::UnknownSbox(name.to_string()));
    }
    Ok(t.apply(nibble))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookups() {
        assert_eq!(lblock_sbox("s0", 0x0).unwrap(), 0xe);
        assert_eq!(lblock_sbox("s0", 0x1).unwrap(), 0x9);
        assert_eq!(lblock_sbox("s8", 0x0).unwrap(), 0x8);
        assert_eq!(lblock_sbox("s9", 0x0).unwrap(), 0xb);
        assert!(matches!(
            lblock_sbox("s10", 0),
            Err(ReferenceError::UnknownSbox(_))
        ));
        assert!(lblock_sbox("S", 0).is_err());
    }

    #[test]
    fn every_table_is_a_permutation() {
        for t in SboxTable::all() {
            let mut v = t.entries().to_vec();
            v.sort();
            assert_eq!(v, (0..16).collect::<Vec<u8>>(), "{}", t.name());
        }
    }

    #[test]
    fn lici_completion() {
        let t = SboxTable::lici();
        assert_eq!(t.apply(0), 3);
        assert_eq!(t.apply(1), 0xf);
        assert_eq!(t.apply(7), 8);
        // the fifteen printed columns, in order, skipping input 7
        let printed = [3, 0xf, 0xe, 1, 0, 0xa, 5, 0xc, 4, 0xb, 2, 9, 7, 6, 0xd];
        let listed: Vec<u8> = (0..16).filter(|&x| x != 7).map(|x| t.apply(x)).collect();
        assert_eq!(listed, printed);
    }

    #[test]
    fn hex_parsing() {
        let t = SboxTable::from_hex("s0", "e9f0d4ab12837 6c5").unwrap();
        assert_eq!(t, SboxTable::lblock(0));
        assert_eq!(t.to_hex(), "e9f0d4ab128376c5");
        assert!(matches!(
            SboxTable::from_hex("x", "e9f0d4ab128376c6"),
            Err(ReferenceError::NotAPermutation)
        ));
        assert!(matches!(
            SboxTable::from_hex("x", "e9f0"),
            Err(ReferenceError::MalformedTable(_))
        ));
    }
}
