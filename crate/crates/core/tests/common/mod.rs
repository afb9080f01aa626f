//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

pub mod oracle;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random physical parameters `(V_A, η, T, ξ, v_el)` with `η < 1`.
pub fn random_channel(rng: &mut impl Rng) -> (f64, f64, f64, f64, f64) {
    (
        rng.random_range(0.2..40.0),
        rng.random_range(0.2..0.99),
        rng.random_range(0.005..1.0),
        rng.random_range(0.0..0.2),
        rng.random_range(0.0..0.4),
    )
}

pub mod recon {
    use cvqkd::channel::{generate_linear_block, Detector, LinearChannel};
    use cvqkd::ecc::{BpDecoder, SparseParityCheck};
    use cvqkd::reconciliation::{alice_recover, alice_rotate, bob_map, build_basis, llr_init, normalize, DIM};
    use nalgebra::SMatrix;
    use rand::Rng;

    pub fn codes_dir() -> std::path::PathBuf {
        std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("codes")
    }

    /// `M = Σ α_i A_i` assembled densely from the basis matrices.
    pub fn assemble(alpha: &[f64; DIM]) -> SMatrix<f64, 8, 8> {
        let basis = build_basis();
        let mut m = SMatrix::<f64, 8, 8>::zeros();
        for (i, a) in alpha.iter().enumerate() {
            let ai = basis.matrix(i);
            m += SMatrix::<f64, 8, 8>::from_fn(|r, c| ai[r][c]) * *a;
        }
        m
    }

    pub struct RoundTrip {
        pub frames: usize,
        pub max_rel_err: f64,
        pub max_orthogonality_err: f64,
        pub max_map_err: f64,
    }

    /// Maps `n_frames` frames drawn at log-uniform SNR in `[0.01, 10]` and
    /// rebuilds Bob's samples from his own bits.
    pub fn round_trip(n_frames: usize, seed: u64) -> RoundTrip {
        let mut rng = super::rng(seed);
        let mut out = RoundTrip { frames: 0, max_rel_err: 0.0, max_orthogonality_err: 0.0, max_map_err: 0.0 };
        let per_draw = 100;
        for k in 0..n_frames / per_draw {
            let snr = 10f64.powf(rng.random_range(-2.0..1.0));
            let ch = LinearChannel::new(snr, 1.0, 1.0).unwrap();
            let b = generate_linear_block(&ch, Detector::Homodyne, per_draw * DIM, 0, seed ^ (k as u64) << 8).unwrap();
            let mapping = bob_map(&b.y, &mut rng).unwrap();
            let y = alice_recover(&mapping.bits, &mapping.frames).unwrap();
            for (f, (got, want)) in y.chunks_exact(DIM).zip(b.y.chunks_exact(DIM)).enumerate() {
                let w = nalgebra::SVector::<f64, 8>::from_column_slice(want);
                let g = nalgebra::SVector::<f64, 8>::from_column_slice(got);
                out.max_rel_err = out.max_rel_err.max((g - w).norm() / w.norm());
                let m = assemble(&mapping.frames[f].alpha);
                let orth = (m.transpose() * m - SMatrix::<f64, 8, 8>::identity()).amax();
                out.max_orthogonality_err = out.max_orthogonality_err.max(orth);
                let (unit, _) = normalize(&want.try_into().unwrap()).unwrap();
                let u = nalgebra::SVector::<f64, 8>::from_fn(|i, _| {
                    let bit = mapping.bits[f * DIM + i];
                    if bit == 0 { 8f64.sqrt().recip() } else { -8f64.sqrt().recip() }
                });
                let mapped = m * nalgebra::SVector::<f64, 8>::from_column_slice(&unit);
                out.max_map_err = out.max_map_err.max((mapped - u).amax());
                out.frames += 1;
            }
        }
        out
    }

    /// Frame error rate of `code` on the reconciled virtual channel at
    /// `snr`, with `t = 1`, `σ² = 1`.
    pub fn frame_error_rate(code: &SparseParityCheck, snr: f64, n_codewords: usize, seed: u64) -> f64 {
        let n = code.n_cols();
        let ch = LinearChannel::new(snr, 1.0, 1.0).unwrap();
        let b = generate_linear_block(&ch, Detector::Homodyne, n * n_codewords, 0, seed).unwrap();
        let mut rng = super::rng(seed);
        let mapping = bob_map(&b.y, &mut rng).unwrap();
        let v = alice_rotate(&b.x, &mapping.frames).unwrap();
        let llr = llr_init(&v, snr).unwrap();
        let mut dec = BpDecoder::new(code);
        let mut errors = 0;
        for c in 0..n_codewords {
            let r = c * n..(c + 1) * n;
            let s = code.syndrome(&mapping.bits[r.clone()]).unwrap();
            let got = dec.decode(&llr[r.clone()], &s, 200).unwrap();
            errors += usize::from(got.bits != mapping.bits[r]);
        }
        errors as f64 / n_codewords as f64
    }
}

pub fn config(name: &str) -> cvqkd::pipeline::RunConfig {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name);
    cvqkd::pipeline::RunConfig::load(&path).unwrap()
}
