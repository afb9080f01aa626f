//! Syndrome decoding on the reconciled channel: frame error rate of the
//! shipped rate-1/2 code as the SNR crosses its waterfall.
//!
//! ```text
//! cargo run --release --example ldpc_decode
//! ```

use std::path::Path;

use cvqkd::channel::{generate_linear_block, Detector, LinearChannel};
use cvqkd::ecc::{load_code, realized_beta, BpDecoder};
use cvqkd::reconciliation::{alice_rotate, bob_map, llr_init};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> cvqkd::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("codes/ldpc_r12_n1000.alist");
    let code = load_code(&path)?;
    let n = code.n_cols();
    let frames = 100;
    println!("code: n = {n}, m = {}, rate = {}", code.n_rows(), code.rate());
    println!("{:>6} {:>6} {:>8} {:>10}", "SNR", "beta", "FER", "avg iters");

    for snr in [1.4, 1.8, 2.2, 2.6, 3.0] {
        let ch = LinearChannel::new(snr, 1.0, 1.0)?;
        let block = generate_linear_block(&ch, Detector::Homodyne, n * frames, 0, 5)?;
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mapping = bob_map(&block.y, &mut rng)?;
        let llr = llr_init(&alice_rotate(&block.x, &mapping.frames)?, snr)?;

        let mut decoder = BpDecoder::new(&code);
        let (mut failed, mut iters) = (0, 0);
        for c in 0..frames {
            let r = c * n..(c + 1) * n;
            let syndrome = code.syndrome(&mapping.bits[r.clone()])?;
            let out = decoder.decode(&llr[r.clone()], &syndrome, 200)?;
            failed += usize::from(out.bits != mapping.bits[r]);
            iters += out.iterations;
        }
        println!(
            "{snr:>6.2} {:>6.3} {:>8.3} {:>10.1}",
            realized_beta(code.rate(), snr),
            failed as f64 / frames as f64,
            iters as f64 / frames as f64
        );
    }
    Ok(())
}
