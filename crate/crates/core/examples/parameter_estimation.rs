//! Maximum-likelihood channel estimation and its worst-case bounds for a
//! few sample counts.
//!
//! ```text
//! cargo run --release --example parameter_estimation
//! ```

use cvqkd::channel::{generate_block, ChannelParams, Detector};
use cvqkd::estimation::{ChannelEstimate, DEFAULT_EPS_PE};

fn main() -> cvqkd::Result<()> {
    let params = ChannelParams::from_distance(50.0, 0.2, 0.612, 0.04, 0.15, 4.0)?;
    println!("true t = {:.5}, sigma^2 = {:.5}", params.t(), params.sigma2());
    println!("{:>9} {:>9} {:>9} {:>9} {:>10}", "N", "t_hat", "t_min", "s2_hat", "s2_max");
    for n in [10_000, 100_000, 1_000_000, 4_000_000] {
        let block = generate_block(&params, Detector::Homodyne, n, 0, n as u64)?;
        let est = ChannelEstimate::from_samples(&block.x, &block.y, params.v_a, DEFAULT_EPS_PE)?;
        println!(
            "{n:>9} {:>9.5} {:>9.5} {:>9.5} {:>10.5}",
            est.t_hat, est.t_min, est.sigma2_hat, est.sigma2_max
        );
    }
    Ok(())
}
