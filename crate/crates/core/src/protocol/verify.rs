//! 64-bit verification tag: polynomial evaluation over GF(2^64).
//!
//! The payload is split into 64-bit blocks `b_1..b_L` (LSB-first bit
//! packing) followed by a length block, and the tag is the Horner
//! evaluation `((b_1·k + b_2)·k + ...)·k` at a point `k` derived from the
//! frame seed. Two distinct payloads of `L` blocks collide for at most
//! `L + 1` of the 2^64 points.

/// Low terms of the reduction polynomial x^64 + x^4 + x^3 + x + 1.
const POLY: u64 = 0x1B;

/// Carry-less product modulo the reduction polynomial.
pub fn gf64_mul(mut a: u64, mut b: u64) -> u64 {
    let mut r = 0u64;
    while b != 0 {
        if b & 1 == 1 {
            r ^= a;
        }
        b >>= 1;
        let carry = a >> 63;
        a <<= 1;
        if carry == 1 {
            a ^= POLY;
        }
    }
    r
}

/// SplitMix64 finalizer, used to derive independent 64-bit values from one
/// seed.
pub fn mix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

const TAG_DOMAIN: u64 = 0x7461_675f_6b65_7931;

/// Evaluation point for a frame seed; never zero.
pub fn tag_point(seed: u64) -> u64 {
    mix64(seed ^ TAG_DOMAIN) | 1
}

/// Tag of a 0/1 payload under the given seed.
pub fn payload_tag(bits: &[u8], seed: u64) -> u64 {
    let k = tag_point(seed);
    let mut h = 0u64;
    for chunk in bits.chunks(64) {
        let block = chunk
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &b)| acc | (u64::from(b & 1) << i));
        h = gf64_mul(h ^ block, k);
    }
    gf64_mul(h ^ bits.len() as u64, k)
}
