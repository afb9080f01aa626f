//! Syndrome-based LDPC error correction over the virtual binary channel.
//!
//! Bob discloses `H·u` for his random word `u`; Alice decodes her soft copy
//! toward that syndrome. Verification tags then confirm the corrected word.

mod alist;
mod decoder;
mod registry;
mod sparse;
mod verify;

pub use alist::{load_code, parse_alist, to_alist, write_code};
pub use decoder::{bp_decode, BpDecoder, DecodeResult, DEFAULT_MAX_ITERS, LLR_CLAMP};
pub use registry::{select_code, CodeRegistry, CodeSpec, Selection};
pub use sparse::SparseParityCheck;
pub use verify::{gf64_mul, tag, verify, VerificationTag, TAG_BITS};

use crate::error::Result;

/// `s = H·u` over GF(2).
pub fn compute_syndrome(bits_u: &[u8], h: &SparseParityCheck) -> Result<Vec<u8>> {
    h.syndrome(bits_u)
}

/// Realized reconciliation efficiency `β = R/C` with `C = ½·log₂(1+SNR)`.
pub fn realized_beta(rate: f64, snr: f64) -> f64 {
    rate / (0.5 * (1.0 + snr).log2())
}
