//! Simulates one block over a 25 km fiber and compares the sifted data with
//! the channel model that produced it.
//!
//! ```text
//! cargo run --release --example channel_simulation
//! ```

use cvqkd::channel::{generate_block, ChannelParams, Detector};
use cvqkd::estimation::ml_estimate;

fn main() -> cvqkd::Result<()> {
    let params = ChannelParams::from_distance(25.0, 0.2, 0.612, 0.04, 0.15, 4.0)?;
    println!(
        "T = {:.4}, t = {:.4}, sigma^2 = {:.4}, SNR = {:.4}",
        params.transmittance,
        params.t(),
        params.sigma2(),
        params.snr()
    );

    for detector in [Detector::Homodyne, Detector::Heterodyne] {
        let block = generate_block(&params, detector, 200_000, 10_000, 42)?;
        let (t, s2) = ml_estimate(&block.x, &block.y)?;
        let model = params.linear(detector);
        println!(
            "{detector:?}: {} key samples, {} pilots, t_hat = {t:.4} (model {:.4}), sigma2_hat = {s2:.4} (model {:.4})",
            block.len(),
            block.pilots_x.len(),
            model.t,
            model.sigma2
        );
    }
    Ok(())
}
