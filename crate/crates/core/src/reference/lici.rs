//! Table-driven LiCi: 64-bit block, 128-bit key, 31 rounds.
//!
//! The plaintext is `X || Y` with `X` in the high 32 bits; each round
//!
//! ```text
//! X' = (S(X) ^ Y ^ RK1) <<< 3
//! Y' = (S(X) ^ X' ^ RK2) >>> 7
//! ```
//!
//! and the ciphertext is `X_r || Y_r`. Round keys are the low 64 bits of the
//! key register (`RK2 = K63..K32`, `RK1 = K31..K0`), read before each update.

use super::sbox::SboxTable;
use super::ReferenceError;

pub const ROUNDS: usize = 31;
pub const KEY_BITS: usize = 128;
pub const BLOCK_BITS: usize = 64;

pub fn round_keys(key: u128) -> (u32, u32) {
    ((key >> 32) as u32, key as u32)
}

/// Extracts `(RK2, RK1)` from `key`, then performs update `index`:
/// rotate left 13, S-box on K3..K0 and K7..K4, counter into K63..K59.
pub fn key_update(key: u128, index: u32) -> (u32, u32, u128) {
    let (rk2, rk1) = round_keys(key);
    let s = SboxTable::lici();
    let mut k = key.rotate_left(13);
    let lo = s.apply((k & 0xf) as u8) as u128;
    let hi = s.apply(((k >> 4) & 0xf) as u8) as u128;
    k = (k & !0xffu128) | (hi << 4) | lo;
    k ^= ((index & 0x1f) as u128) << 59;
    (rk2, rk1, k)
}

/// Round key pairs for rounds `1..=rounds` plus the register after
/// `rounds - 1` updates.
pub fn key_schedule(key: u128, rounds: usize) -> Result<(Vec<(u32, u32)>, u128), ReferenceError> {
    check_rounds(rounds)?;
    let mut k = key;
    let mut out = Vec::with_capacity(rounds);
    for i in 1..rounds as u32 {
        let (rk2, rk1, next) = key_update(k, i);
        out.push((rk2, rk1));
        k = next;
    }
    out.push(round_keys(k));
    Ok((out, k))
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
    let s = SboxTable::lici();
    let mut x = (plaintext >> 32) as u32;
    let mut y = plaintext as u32;
    for (rk2, rk1) in keys {
        let sx = s.apply_word(x);
        let nx = (sx ^ y ^ rk1).rotate_left(3);
        let ny = (sx ^ nx ^ rk2).rotate_right(7);
        x = nx;
        y = ny;
    }
    Ok(((x as u64) << 32) | y as u64)
}

#[cfg(test)]
pub(crate) fn decrypt(ciphertext: u64, key: u128, rounds: usize) -> Result<u64, ReferenceError> {
    let (keys, _) = key_schedule(key, rounds)?;
    let inv = SboxTable::lici().inverse();
    let mut x = (ciphertext >> 32) as u32;
    let mut y = ciphertext as u32;
    for (rk2, rk1) in keys.into_iter().rev() {
        let sx = y.rotate_left(7) ^ rk2 ^ x;
        let py = x.rotate_right(3) ^ sx ^ rk1;
        x = inv.apply_word(sx);
        y = py;
    }
    Ok(((x as u64) << 32) | y as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn first_round_keys_precede_update() {
        let key = 0x0011_2233_4455_6677_8899_aabb_ccdd_eeff_u128;
        let (keys, _) = key_schedule(key, 1).unwrap();
        assert_eq!(keys, vec![(0x8899_aabb, 0xccdd_eeff)]);
    }

    #[test]
    fn zero_key_update() {
        let (_, _, k) = key_update(0, 1);
        assert_eq!(k & 0xf, 3);
        assert_eq!((k >> 4) & 0xf, 3);
        assert_eq!(k & !0xffu128, 1u128 << 59);
    }

    #[test]
    fn update_one_flips_k59_only() {
        let key = 0x0123_4567_89ab_cdef_0fed_cba9_8765_4321_u128;
        let (_, _, a) = key_update(key, 1);
        let (_, _, b) = key_update(key, 0);
        assert_eq!(a ^ b, 1u128 << 59);
    }

    #[test]
    fn schedule_length() {
        let (keys, _) = key_schedule(7, ROUNDS).unwrap();
        assert_eq!(keys.len(), 31);
        assert!(encrypt(0, 0, 0).is_err());
        assert!(encrypt(0, 0, 32).is_err());
    }

    #[test]
    fn decrypt_inverts_encrypt() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..1000 {
            let pt: u64 = rng.gen();
            let key: u128 = rng.gen();
            let ct = encrypt(pt, key, ROUNDS).unwrap();
            assert_eq!(decrypt(ct, key, ROUNDS).unwrap(), pt);
        }
    }
}
