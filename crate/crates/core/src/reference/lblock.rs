//! Table-driven LBlock: 64-bit block, 80-bit key, 32 rounds.
//!
//! The plaintext is `L || R` with `L` in the high 32 bits. Each round
//! computes `L' = P(S(L ^ K_i)) ^ (R <<< 8)`, `R' = L`; after the last
//! round the halves are emitted without the final swap, so the ciphertext
//! is `R_r || L_r`.

use super::sbox::SboxTable;
use super::ReferenceError;

pub const ROUNDS: usize = 32;
pub const KEY_BITS: usize = 80;
pub const BLOCK_BITS: usize = 64;
pub const KEY_MASK: u128 = (1u128 << KEY_BITS) - 1;

/// Source nibble of each output nibble of the diffusion layer.
pub const PERMUTATION_SOURCE: [usize; 8] = [1, 3, 0, 2, 5, 7, 4, 6];

pub fn rotl80(key: u128, amount: u32) -> u128 {
    let k = key & KEY_MASK;
    ((k << amount) | (k >> (KEY_BITS as u32 - amount))) & KEY_MASK
}

/// Round key: the leftmost 32 bits of the key register.
pub fn round_key(key: u128) -> u32 {
    ((key & KEY_MASK) >> 48) as u32
}

/// Nibble permutation `Z7..Z0 -> Z6 Z4 Z7 Z5 Z2 Z0 Z3 Z1`.
pub fn permute(z: u32) -> u32 {
    PERMUTATION_SOURCE
        .iter()
        .enumerate()
        .fold(0, |acc, (out, &src)| acc | (((z >> (4 * src)) & 0xf) << (4 * out)))
}

pub fn inverse_permute(z: u32) -> u32 {
    PERMUTATION_SOURCE
        .iter()
        .enumerate()
        .fold(0, |acc, (out, &src)| acc | (((z >> (4 * out)) & 0xf) << (4 * src)))
}

/// S-layer: `s_j` on nibble `j`.
pub fn sbox_layer(x: u32) -> u32 {
    (0..8).fold(0, |acc, j| {
        let t = SboxTable::lblock(j);
        acc | ((t.apply(((x >> (4 * j)) & 0xf) as u8) as u32) << (4 * j))
    })
}

pub fn round_function(x: u32, k: u32) -> u32 {
    permute(sbox_layer(x ^ k))
}

/// One key-register update with counter `index` (1..=31). Returns the next
/// round key together with the updated register.
pub fn key_update(key: u128, index: u32) -> Result<(u32, u128), ReferenceError> {
    if !(1..ROUNDS as u32).contains(&index) {
        return Err(ReferenceError::UpdateIndexOutOfRange {
            index,
            max: ROUNDS as u32 - 1,
        });
    }
    let mut k = rotl80(key, 29);
    let s9 = SboxTable::lblock(9);
    let s8 = SboxTable::lblock(8);
    let hi = s9.apply(((k >> 76) & 0xf) as u8) as u128;
    let lo = s8.apply(((k >> 72) & 0xf) as u8) as u128;
    k = (k & !(0xffu128 << 72)) | (hi << 76) | (lo << 72);
    k ^= (index as u128) << 46;
    Ok((round_key(k), k))
}

/// Round keys `K_1..K_rounds` and the register after `rounds - 1` updates.
pub fn key_schedule(key: u128, rounds: usize) -> Result<(Vec<u32>, u128), ReferenceError> {
    check_rounds(rounds)?;
    let mut k = key & KEY_MASK;
    let mut keys = vec![round_key(k)];
    for i in 1..rounds as u32 {
        let (rk, next) = key_update(k, i)?;
        keys.push(rk);
        k = next;
    }
    Ok((keys, k))
}

fn check_rounds(rounds: usize) -> Result<(), ReferenceError> {
    if (1..=ROUNDS).contains(&rounds) {
        Ok(())
    } else {
        Err(ReferenceError::RoundsOutOfRange {
            rounds,
            max: ROUNDS,
        })
    }
}

pub fn encrypt(plaintext: u64, key: u128, rounds: usize) -> Result<u64, ReferenceError> {
    let (keys, _) = key_schedule(key, rounds)?;
    let mut l = (plaintext >> 32) as u32;
    let mut r = plaintext as u32;
    for k in keys {
        let next = round_function(l, k) ^ r.rotate_left(8);
        r = l;
        l = next;
    }
    Ok(((r as u64) << 32) | l as u64)
}

#[cfg(test)]
pub(crate) fn decrypt(ciphertext: u64, key: u128, rounds: usize) -> Result<u64, ReferenceError> {
    let (keys, _) = key_schedule(key, rounds)?;
    let mut r = (ciphertext >> 32) as u32;
    let mut l = ciphertext as u32;
    for k in keys.into_iter().rev() {
        let prev_r = (l ^ round_function(r, k)).rotate_right(8);
        l = r;
        r = prev_r;
    }
    Ok(((l as u64) << 32) | r as u64)
}
