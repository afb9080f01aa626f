//! Privacy amplification by Toeplitz hashing.
//!
//! The `m × n` matrix `T[i][j] = d[i + n − 1 − j]` is fixed by its
//! `n + m − 1` diagonal bits `d`. Column `j` is the window `d[n−1−j ..
//! n−1−j+m]`, so `T·x` is the XOR of the windows selected by the set bits
//! of `x`, which lets the input be absorbed in arbitrary chunks.
//!
//! Diagonal bits come from ChaCha20 keyed with the little-endian seed in
//! the first eight key bytes (rest zero), nonce and counter zero; bit `k`
//! is bit `k mod 64` of the `⌊k/64⌋`-th output word.

mod keyfile;

pub use keyfile::{read_key_file, write_key_file, FinalKey};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// `max(0, ⌊rate·n⌋)`.
pub fn final_length(rate: f64, n_symbols: u64) -> u64 {
    let len = (rate * n_symbols as f64).floor();
    if len > 0.0 {
        len as u64
    } else {
        0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaRequest {
    pub input_bits: Vec<u8>,
    pub out_len: usize,
    pub seed: u64,
}

pub fn toeplitz_hash(req: &PaRequest) -> Result<Vec<u8>> {
    let t = ToeplitzMatrix::from_seed(req.seed, req.input_bits.len(), req.out_len)?;
    t.hash(&req.input_bits)
}

/// A concrete member of the Toeplitz family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToeplitzMatrix {
    in_len: usize,
    out_len: usize,
    diag: Vec<u64>,
}

fn pack(bits: &[u8]) -> Vec<u64> {
    let mut words = vec![0u64; bits.len().div_ceil(64)];
    for (k, &b) in bits.iter().enumerate() {
        words[k / 64] |= u64::from(b & 1) << (k % 64);
    }
    words
}

fn unpack(words: &[u64], len: usize) -> Vec<u8> {
    (0..len).map(|k| ((words[k / 64] >> (k % 64)) & 1) as u8).collect()
}

impl ToeplitzMatrix {
    fn check(in_len: usize, out_len: usize) -> Result<()> {
        if out_len > in_len {
            return Err(invalid(
                "out_len",
                format!("{out_len} exceeds the input length {in_len}"),
            ));
        }
        Ok(())
    }

    pub fn from_seed(seed: u64, in_len: usize, out_len: usize) -> Result<Self> {
        Self::check(in_len, out_len)?;
        let n_bits = (in_len + out_len).saturating_sub(1);
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        let mut rng = ChaCha20Rng::from_seed(key);
        let mut diag: Vec<u64> = (0..n_bits.div_ceil(64)).map(|_| rng.next_u64()).collect();
        if !n_bits.is_multiple_of(64) {
            if let Some(last) = diag.last_mut() {
                *last &= (1u64 << (n_bits % 64)) - 1;
            }
        }
        Ok(ToeplitzMatrix {
            in_len,
            out_len,
            diag,
        })
    }

    /// Explicit diagonal `d[0..n+m−1]`.
    pub fn from_diagonal(diag_bits: &[u8], in_len: usize, out_len: usize) -> Result<Self> {
        Self::check(in_len, out_len)?;
        let expect = (in_len + out_len).saturating_sub(1);
        if diag_bits.len() != expect {
            return Err(Error::LengthMismatch {
                expected: expect,
                actual: diag_bits.len(),
            });
        }
        Ok(ToeplitzMatrix {
            in_len,
            out_len,
            diag: pack(diag_bits),
        })
    }

    pub fn in_len(&self) -> usize {
        self.in_len
    }

    pub fn out_len(&self) -> usize {
        self.out_len
    }

    /// Diagonal bit `k`.
    pub fn diagonal(&self, k: usize) -> u8 {
        ((self.diag[k / 64] >> (k % 64)) & 1) as u8
    }

    /// Entry `T[i][j]`.
    pub fn entry(&self, i: usize, j: usize) -> u8 {
        self.diagonal(i + self.in_len - 1 - j)
    }

    /// XORs the `out_len`-bit window of the diagonal starting at `start` into
    /// `acc`.
    fn xor_window(&self, start: usize, acc: &mut [u64]) {
        let (word, shift) = (start / 64, start % 64);
        for (k, a) in acc.iter_mut().enumerate() {
            let lo = self.diag.get(word + k).copied().unwrap_or(0);
            let v = if shift == 0 {
                lo
            } else {
                let hi = self.diag.get(word + k + 1).copied().unwrap_or(0);
                (lo >> shift) | (hi << (64 - shift))
            };
            *a ^= v;
        }
        if !self.out_len.is_multiple_of(64) {
            if let Some(last) = acc.last_mut() {
                *last &= (1u64 << (self.out_len % 64)) - 1;
            }
        }
    }

    pub fn hash(&self, input: &[u8]) -> Result<Vec<u8>> {
        let mut h = self.hasher();
        h.absorb(input)?;
        h.finalize()
    }

    pub fn hasher(&self) -> ToeplitzHasher<'_> {
        ToeplitzHasher {
            matrix: self,
            acc: vec![0; self.out_len.div_ceil(64)],
            absorbed: 0,
        }
    }
}

/// Incremental evaluation of `T·x`, fed with consecutive slices of `x`.
#[derive(Debug, Clone)]
pub struct ToeplitzHasher<'a> {
    matrix: &'a ToeplitzMatrix,
    acc: Vec<u64>,
    absorbed: usize,
}

impl ToeplitzHasher<'_> {
    pub fn absorb(&mut self, chunk: &[u8]) -> Result<()> {
        let n = self.matrix.in_len;
        if self.absorbed + chunk.len() > n {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: self.absorbed + chunk.len(),
            });
        }
        for (k, &b) in chunk.iter().enumerate() {
            if b & 1 == 1 {
                let j = self.absorbed + k;
                self.matrix.xor_window(n - 1 - j, &mut self.acc);
            }
        }
        self.absorbed += chunk.len();
        Ok(())
    }

    pub fn finalize(self) -> Result<Vec<u8>> {
        if self.absorbed != self.matrix.in_len {
            return Err(Error::LengthMismatch {
                expected: self.matrix.in_len,
                actual: self.absorbed,
            });
        }
        Ok(unpack(&self.acc, self.matrix.out_len))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_chacha::ChaCha8Rng;

    fn dense(t: &ToeplitzMatrix, x: &[u8]) -> Vec<u8> {
        (0..t.out_len())
            .map(|i| (0..t.in_len()).fold(0, |acc, j| acc ^ (t.entry(i, j) & x[j])))
            .collect()
    }

    #[test]
    fn lengths() {
        assert_eq!(final_length(-0.3, 1000), 0);
        assert_eq!(final_length(0.0, 1000), 0);
        assert_eq!(final_length(0.01, 1_000_000), 10_000);
        assert_eq!(final_length(0.0015, 1000), 1);
    }

    #[test]
    fn four_to_two_by_hand() {
        // d = 1 0 1 1 0:
        //   T = [[d3 d2 d1 d0], [d4 d3 d2 d1]] = [[1 1 0 1], [0 1 1 0]]
        let t = ToeplitzMatrix::from_diagonal(&[1, 0, 1, 1, 0], 4, 2).unwrap();
        assert_eq!([t.entry(0, 0), t.entry(0, 1), t.entry(0, 2), t.entry(0, 3)], [1, 1, 0, 1]);
        assert_eq!([t.entry(1, 0), t.entry(1, 1), t.entry(1, 2), t.entry(1, 3)], [0, 1, 1, 0]);
        assert_eq!(t.hash(&[1, 0, 0, 0]).unwrap(), vec![1, 0]);
        assert_eq!(t.hash(&[0, 1, 1, 0]).unwrap(), vec![1, 0]);
        assert_eq!(t.hash(&[1, 1, 1, 1]).unwrap(), vec![1, 0]);
        assert_eq!(t.hash(&[0, 0, 1, 1]).unwrap(), vec![1, 1]);
    }

    #[test]
    fn packed_matches_dense_on_awkward_sizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for &(n, m) in &[(1, 1), (63, 5), (64, 64), (65, 63), (300, 129), (1000, 1)] {
            let t = ToeplitzMatrix::from_seed(rng.random(), n, m).unwrap();
            let x: Vec<u8> = (0..n).map(|_| rng.random::<u8>() & 1).collect();
            assert_eq!(t.hash(&x).unwrap(), dense(&t, &x), "{n}x{m}");
        }
    }

    #[test]
    fn empty_output_and_rejections() {
        let req = PaRequest { input_bits: vec![1, 0, 1], out_len: 0, seed: 9 };
        assert!(toeplitz_hash(&req).unwrap().is_empty());
        let req = PaRequest { input_bits: vec![1, 0, 1], out_len: 4, seed: 9 };
        assert!(toeplitz_hash(&req).is_err());
        let t = ToeplitzMatrix::from_seed(1, 10, 3).unwrap();
        let mut h = t.hasher();
        h.absorb(&[1; 4]).unwrap();
        assert!(h.clone().finalize().is_err());
        assert!(h.absorb(&[0; 7]).is_err());
    }

    #[test]
    fn seeded_instances_differ_and_repeat() {
        let x: Vec<u8> = (0..256).map(|i| (i % 3 == 0) as u8).collect();
        let a = toeplitz_hash(&PaRequest { input_bits: x.clone(), out_len: 64, seed: 1 }).unwrap();
        let b = toeplitz_hash(&PaRequest { input_bits: x.clone(), out_len: 64, seed: 1 }).unwrap();
        let c = toeplitz_hash(&PaRequest { input_bits: x, out_len: 64, seed: 2 }).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn first_diagonal_word_is_pinned() {
        let t = ToeplitzMatrix::from_seed(0, 64, 1).unwrap();
        let word: u64 = (0..64).map(|k| u64::from(t.diagonal(k)) << k).sum();
        assert_eq!(word, ChaCha20Rng::from_seed([0; 32]).next_u64());
    }
}
