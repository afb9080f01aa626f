//! Compresses a reconciled bit string with a seeded Toeplitz hash, both in
//! one shot and streamed in chunks.
//!
//! ```text
//! cargo run --release --example privacy_amplification
//! ```

use cvqkd::privacy::{final_length, ToeplitzMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> cvqkd::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let n = 100_000;
    let reconciled: Vec<u8> = (0..n).map(|_| rng.random_range(0..2)).collect();
    let out_len = final_length(0.1342, n as u64) as usize;

    let t = ToeplitzMatrix::from_seed(0xC0FFEE, n, out_len)?;
    let key = t.hash(&reconciled)?;

    let mut streamed = t.hasher();
    for chunk in reconciled.chunks(7_919) {
        streamed.absorb(chunk)?;
    }
    assert_eq!(streamed.finalize()?, key);

    let ones = key.iter().filter(|&&b| b == 1).count();
    println!("{n} bits -> {out_len}-bit key, {:.2}% ones; streamed hash agrees", 100.0 * ones as f64 / out_len as f64);
    Ok(())
}
