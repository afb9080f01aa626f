//! Flooding sum-product decoding against a target syndrome.
//!
//! Alice holds LLRs for Bob's word `u` and Bob's syndrome `s = H·u`. A check
//! node with `s_c = 1` constrains the parity of its neighbors to be odd, so
//! its outgoing messages are negated relative to plain decoding.

use super::SparseParityCheck;
use crate::error::{Error, Result};

/// Magnitude clamp for every LLR in the decoder.
pub const LLR_CLAMP: f64 = 30.0;

pub const DEFAULT_MAX_ITERS: usize = 200;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeResult {
    pub bits: Vec<u8>,
    pub converged: bool,
    pub iterations: usize,
    pub syndrome_matched: bool,
}

/// Reusable message storage for one parity-check matrix.
#[derive(Debug, Clone)]
pub struct BpDecoder<'h> {
    h: &'h SparseParityCheck,
    // edges are numbered row-major
    row_start: Vec<usize>,
    var_edges: Vec<Vec<usize>>,
    v2c: Vec<f64>,
    c2v: Vec<f64>,
    scratch: Vec<f64>,
}

fn clamp(x: f64) -> f64 {
    x.clamp(-LLR_CLAMP, LLR_CLAMP)
}

impl<'h> BpDecoder<'h> {
    pub fn new(h: &'h SparseParityCheck) -> Self {
        let mut n_edges = 0;
        let mut row_start = Vec::with_capacity(h.n_rows() + 1);
        let mut var_edges = vec![Vec::new(); h.n_cols()];
        for r in 0..h.n_rows() {
            row_start.push(n_edges);
            for &c in h.row(r) {
                var_edges[c].push(n_edges);
                n_edges += 1;
            }
        }
        row_start.push(n_edges);
        BpDecoder {
            h,
            row_start,
            var_edges,
            v2c: vec![0.0; n_edges],
            c2v: vec![0.0; n_edges],
            scratch: Vec::new(),
        }
    }

    pub fn decode(&mut self, llr: &[f64], syndrome: &[u8], max_iters: usize) -> Result<DecodeResult> {
        let h = self.h;
        if llr.len() != h.n_cols() {
            return Err(Error::LengthMismatch {
                expected: h.n_cols(),
                actual: llr.len(),
            });
        }
        if syndrome.len() != h.n_rows() {
            return Err(Error::LengthMismatch {
                expected: h.n_rows(),
                actual: syndrome.len(),
            });
        }
        let channel: Vec<f64> = llr.iter().map(|&l| clamp(l)).collect();
        self.c2v.fill(0.0);
        let mut bits: Vec<u8> = channel.iter().map(|&l| u8::from(l < 0.0)).collect();
        if h.syndrome_unchecked(&bits) == syndrome {
            return Ok(DecodeResult {
                bits,
                converged: true,
                iterations: 0,
                syndrome_matched: true,
            });
        }

        for iter in 1..=max_iters.max(1) {
            for (v, edges) in self.var_edges.iter().enumerate() {
                let total: f64 = channel[v] + edges.iter().map(|&e| self.c2v[e]).sum::<f64>();
                for &e in edges {
                    self.v2c[e] = clamp(total - self.c2v[e]);
                }
            }

            for r in 0..h.n_rows() {
                let (lo, hi) = (self.row_start[r], self.row_start[r + 1]);
                let deg = hi - lo;
                self.scratch.clear();
                self.scratch
                    .extend(self.v2c[lo..hi].iter().map(|&m| (0.5 * m).tanh()));
                // suffix products, then sweep forward with a running prefix
                let mut suffix = vec![1.0; deg + 1];
                for k in (0..deg).rev() {
                    suffix[k] = suffix[k + 1] * self.scratch[k];
                }
                let flip = if syndrome[r] & 1 == 1 { -1.0 } else { 1.0 };
                let mut prefix = 1.0;
                for k in 0..deg {
                    let p = (prefix * suffix[k + 1]).clamp(-1.0 + 1e-15, 1.0 - 1e-15);
                    self.c2v[lo + k] = clamp(flip * 2.0 * p.atanh());
                    prefix *= self.scratch[k];
                }
            }

            for (v, edges) in self.var_edges.iter().enumerate() {
                let total: f64 = channel[v] + edges.iter().map(|&e| self.c2v[e]).sum::<f64>();
                bits[v] = u8::from(total < 0.0);
            }
            if h.syndrome_unchecked(&bits) == syndrome {
                return Ok(DecodeResult {
                    bits,
                    converged: true,
                    iterations: iter,
                    syndrome_matched: true,
                });
            }
        }
        Ok(DecodeResult {
            bits,
            converged: false,
            iterations: max_iters.max(1),
            syndrome_matched: false,
        })
    }
}

/// One-shot decode; see [`BpDecoder`] for repeated use of the same code.
pub fn bp_decode(
    llr: &[f64],
    h: &SparseParityCheck,
    syndrome: &[u8],
    max_iters: usize,
) -> Result<DecodeResult> {
    BpDecoder::new(h).decode(llr, syndrome, max_iters)
}
