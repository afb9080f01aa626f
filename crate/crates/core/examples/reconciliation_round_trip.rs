//! Bob maps his frames onto random sign vectors; Alice rotates her frames
//! with the disclosed maps and, given Bob's bits, rebuilds his samples.
//!
//! ```text
//! cargo run --release --example reconciliation_round_trip
//! ```

use cvqkd::channel::{generate_linear_block, Detector, LinearChannel};
use cvqkd::reconciliation::{alice_recover, alice_rotate, bob_map, llr_init};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> cvqkd::Result<()> {
    let snr = 0.5;
    let ch = LinearChannel::new(snr, 1.0, 1.0)?;
    let block = generate_linear_block(&ch, Detector::Homodyne, 8 * 4096, 0, 1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(2);

    let mapping = bob_map(&block.y, &mut rng)?;
    let v = alice_rotate(&block.x, &mapping.frames)?;
    let llr = llr_init(&v, snr)?;

    let raw_errors = llr
        .iter()
        .zip(&mapping.bits)
        .filter(|(l, &b)| (**l < 0.0) != (b == 1))
        .count();
    println!(
        "{} frames; hard decisions on the virtual channel disagree on {:.2}% of bits",
        mapping.frames.len(),
        100.0 * raw_errors as f64 / llr.len() as f64
    );

    let y = alice_recover(&mapping.bits, &mapping.frames)?;
    let worst = y
        .iter()
        .zip(&block.y)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    println!("rebuilt Bob's samples from the corrected bits, max abs error {worst:.2e}");
    Ok(())
}
