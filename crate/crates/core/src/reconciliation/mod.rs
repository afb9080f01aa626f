//! Eight-dimensional reconciliation.
//!
//! Bob normalizes each 8-sample frame of his data, draws a uniformly random
//! sign vector `u ∈ {±1/√8}^8` and discloses the orthogonal map `M` with
//! `M·y' = u` together with `‖y‖`. Alice applies `M` to her normalized frame
//! and obtains `v`, a noisy copy of `u`. Once the bits of `u` are corrected,
//! `Mᵀ·u·‖y‖` rebuilds Bob's raw frame exactly, which is what lets Alice
//! estimate the channel from every sample without further disclosure.
//!
//! `M = Σ α_i A_i` is stored as its 8 coefficients `α`.

mod basis;

pub use basis::{build_basis, RotationBasis, DIM};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub type Frame = [f64; DIM];

/// `1/√8`, the magnitude of every coordinate of `u`.
pub const U_COORD: f64 = 0.353_553_390_593_273_8;

const UNIT_TOL: f64 = 1e-9;

/// What Bob discloses for one frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MappedFrame {
    pub alpha: Frame,
    pub norm_y: f64,
}

fn norm(v: &Frame) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// Splits `v` into its direction and length.
pub fn normalize(v: &Frame) -> Result<(Frame, f64)> {
    let n = norm(v);
    if n == 0.0 || !n.is_finite() {
        return Err(Error::DegenerateFrame);
    }
    Ok((v.map(|a| a / n), n))
}

/// Uniform point of the hypercube `{±1/√8}^8`.
pub fn draw_u<R: Rng + ?Sized>(rng: &mut R) -> Frame {
    bits_to_u(rng.random::<u8>())
}

/// Bit `i` of `bits` set means `u_i = −1/√8`.
pub fn bits_to_u(bits: u8) -> Frame {
    std::array::from_fn(|i| {
        if bits >> i & 1 == 1 {
            -U_COORD
        } else {
            U_COORD
        }
    })
}

pub fn u_to_bits(u: &Frame) -> u8 {
    u.iter()
        .enumerate()
        .fold(0u8, |acc, (i, &c)| acc | (u8::from(c < 0.0) << i))
}

fn check_unit(name: &'static str, v: &Frame) -> Result<()> {
    let n = norm(v);
    if (n - 1.0).abs() > UNIT_TOL {
        return Err(invalid(name, format!("expected unit norm, got {n}")));
    }
    Ok(())
}

/// Coefficients `α_i = ⟨A_i·y', u⟩` of the map sending `y'` to `u`.
pub fn map(y_unit: &Frame, u: &Frame, basis: &RotationBasis) -> Result<Frame> {
    check_unit("y_unit", y_unit)?;
    check_unit("u", u)?;
    Ok(std::array::from_fn(|i| {
        let ay = basis.apply_unit(i, y_unit);
        ay.iter().zip(u).map(|(a, b)| a * b).sum()
    }))
}

/// Alice's rotation `v = M·x'`.
pub fn apply(alpha: &Frame, x_unit: &Frame, basis: &RotationBasis) -> Frame {
    basis.combine(alpha, x_unit)
}

/// Rebuilds Bob's frame `y = Mᵀ·u·‖y‖` from the corrected `u`.
pub fn invert_recover(alpha: &Frame, u: &Frame, norm_y: f64, basis: &RotationBasis) -> Frame {
    basis.combine_transposed(alpha, u).map(|c| c * norm_y)
}

/// Log-likelihood ratios for the virtual binary channel.
///
/// `v_i ≈ ρ·u_i + w` with `ρ = sqrt(s/(1+s))`, so `√8·v_i/ρ` is a ±1 BIAWGN
/// output with noise variance `1/s`; the LLR is `2·√8·v_i·sqrt(s·(1+s))`.
/// Positive LLR means bit 0 (`u_i = +1/√8`).
pub fn llr_init(v_frames: &[Frame], snr_est: f64) -> Result<Vec<f64>> {
    if !(snr_est > 0.0 && snr_est.is_finite()) {
        return Err(invalid("snr_est", format!("must be positive, got {snr_est}")));
    }
    let scale = 2.0 * (DIM as f64).sqrt() * (snr_est * (1.0 + snr_est)).sqrt();
    Ok(v_frames
        .iter()
        .flat_map(|f| f.iter().map(move |&v| scale * v))
        .collect())
}

/// Bob's side of the mapping over consecutive frames of `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct BobMapping {
    pub frames: Vec<MappedFrame>,
    /// One bit per sample, `0` for `u_i > 0`.
    pub bits: Vec<u8>,
    pub degenerate: usize,
}

/// Maps `y` (length a multiple of 8) frame by frame. Zero-norm frames get
/// the identity map with `norm_y = 0`, which still round-trips exactly, and
/// are counted.
pub fn bob_map<R: Rng + ?Sized>(y: &[f64], rng: &mut R) -> Result<BobMapping> {
    if !y.len().is_multiple_of(DIM) {
        return Err(invalid("y", format!("length {} is not a multiple of {DIM}", y.len())));
    }
    let basis = build_basis();
    let mut out = BobMapping {
        frames: Vec::with_capacity(y.len() / DIM),
        bits: Vec::with_capacity(y.len()),
        degenerate: 0,
    };
    for chunk in y.chunks_exact(DIM) {
        let frame: Frame = chunk.try_into().unwrap();
        let u = draw_u(rng);
        let mapped = match normalize(&frame) {
            Ok((unit, n)) => MappedFrame {
                alpha: map(&unit, &u, basis)?,
                norm_y: n,
            },
            Err(Error::DegenerateFrame) => {
                out.degenerate += 1;
                let mut alpha = [0.0; DIM];
                alpha[0] = 1.0;
                MappedFrame { alpha, norm_y: 0.0 }
            }
            Err(e) => return Err(e),
        };
        out.frames.push(mapped);
        let b = u_to_bits(&u);
        out.bits.extend((0..DIM).map(|i| b >> i & 1));
    }
    Ok(out)
}

/// Alice's rotated frames. A zero-norm frame of `x` yields `v = 0`, i.e.
/// erasures after LLR initialization.
pub fn alice_rotate(x: &[f64], mapped: &[MappedFrame]) -> Result<Vec<Frame>> {
    if x.len() != mapped.len() * DIM {
        return Err(Error::LengthMismatch {
            expected: mapped.len() * DIM,
            actual: x.len(),
        });
    }
    let basis = build_basis();
    Ok(x.chunks_exact(DIM)
        .zip(mapped)
        .map(|(chunk, m)| {
            let frame: Frame = chunk.try_into().unwrap();
            match normalize(&frame) {
                Ok((unit, _)) => apply(&m.alpha, &unit, basis),
                Err(_) => [0.0; DIM],
            }
        })
        .collect())
}

/// Recovers Bob's samples from corrected bits and the disclosed maps.
pub fn alice_recover(bits: &[u8], mapped: &[MappedFrame]) -> Result<Vec<f64>> {
    if bits.len() != mapped.len() * DIM {
        return Err(Error::LengthMismatch {
            expected: mapped.len() * DIM,
            actual: bits.len(),
        });
    }
    let basis = build_basis();
    let mut y = Vec::with_capacity(bits.len());
    for (chunk, m) in bits.chunks_exact(DIM).zip(mapped) {
        let b = chunk
            .iter()
            .enumerate()
            .fold(0u8, |acc, (i, &bit)| acc | ((bit & 1) << i));
        y.extend(invert_recover(&m.alpha, &bits_to_u(b), m.norm_y, basis));
    }
    Ok(y)
}
