//! SNR prediction error of pilot-based and previous-block estimation over a
//! sequence of blocks on a stable channel.
//!
//! ```text
//! cargo run --release --example snr_deviation
//! ```

use std::path::Path;

use cvqkd::pipeline::{snr_deviation_report, RunConfig};

fn main() -> cvqkd::Result<()> {
    let cfg = RunConfig::load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/snr_report.json"))?;
    let r = snr_deviation_report(&cfg)?;
    println!("block size {:e}, {} pilots per block", r.block_size as f64, r.n_pilots);
    println!("{:>5} {:>10} {:>12} {:>12}", "block", "true SNR", "pilot dev", "previous dev");
    for row in r.rows.iter().take(10) {
        let fmt = |v: Option<f64>| v.map_or("-".into(), |v| format!("{v:.3e}"));
        println!(
            "{:>5} {:>10.6} {:>12} {:>12}",
            row.block,
            row.snr_true,
            fmt(row.pilot_deviation()),
            fmt(row.previous_deviation())
        );
    }
    println!("max adjacent-block deviation {:.3e}", r.max_adjacent_deviation());
    Ok(())
}
