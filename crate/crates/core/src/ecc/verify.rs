//! Error verification tags: polynomial evaluation over GF(2^64).
//!
//! The bit string is packed LSB-first into 64-bit words `m_1..m_L`, followed
//! by its bit length, and evaluated by Horner's rule at the disclosed key
//! `k`. Two distinct strings collide for at most `(L+1)/2^64` of the keys.

use serde::{Deserialize, Serialize};

/// Reduction polynomial `x^64 + x^4 + x^3 + x + 1` without the leading term.
const POLY: u64 = 0x1b;

pub const TAG_BITS: usize = 64;

/// Multiplication in GF(2^64).
pub fn gf64_mul(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
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

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationTag {
    pub key: u64,
    pub value: u64,
}

pub fn tag(bits: &[u8], key: u64) -> VerificationTag {
    let mut h = 0u64;
    for chunk in bits.chunks(64) {
        let word = chunk
            .iter()
            .enumerate()
            .fold(0u64, |w, (i, &b)| w | (u64::from(b & 1) << i));
        h = gf64_mul(h ^ word, key);
    }
    h = gf64_mul(h ^ bits.len() as u64, key);
    VerificationTag { key, value: h }
}

/// True iff `bits_a` hashes to Bob's tag under Bob's key.
pub fn verify(bits_a: &[u8], tag_b: &VerificationTag) -> bool {
    tag(bits_a, tag_b.key).value == tag_b.value
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn field_identities() {
        assert_eq!(gf64_mul(1, 0xdead_beef), 0xdead_beef);
        assert_eq!(gf64_mul(0, 12345), 0);
        // x^63 · x = x^64 = x^4 + x^3 + x + 1
        assert_eq!(gf64_mul(1 << 63, 2), POLY);
        let (a, b, c) = (0x1234_5678_9abc_def0, 0x0fed_cba9_8765_4321, 0xa5a5_5a5a_0f0f_f0f0);
        assert_eq!(gf64_mul(a, b), gf64_mul(b, a));
        assert_eq!(gf64_mul(a, b ^ c), gf64_mul(a, b) ^ gf64_mul(a, c));
        assert_eq!(gf64_mul(gf64_mul(a, b), c), gf64_mul(a, gf64_mul(b, c)));
    }

    #[test]
    fn identical_and_empty_inputs_verify() {
        let bits = vec![1, 0, 1, 1, 0, 0, 1];
        assert!(verify(&bits, &tag(&bits, 0x9e37_79b9_7f4a_7c15)));
        assert!(verify(&[], &tag(&[], 42)));
    }

    #[test]
    fn single_bit_flip_never_collides_over_many_keys() {
        let mut rng = ChaCha8Rng::seed_from_u64(64);
        let bits: Vec<u8> = (0..1000).map(|_| rng.random::<u8>() & 1).collect();
        let mut collisions = 0;
        for _ in 0..10_000 {
            let key: u64 = rng.random();
            let mut flipped = bits.clone();
            let k = rng.random_range(0..bits.len());
            flipped[k] ^= 1;
            collisions += usize::from(verify(&flipped, &tag(&bits, key)));
        }
        assert_eq!(collisions, 0);
    }

    #[test]
    fn trailing_zero_extension_is_detected() {
        let key = 0x0123_4567_89ab_cdef;
        assert_ne!(tag(&[1, 0], key).value, tag(&[1, 0, 0], key).value);
    }
}
