//! Secret key rate against distance for the legacy and proposed parameter
//! estimation, finite-size and asymptotic.
//!
//! ```text
//! cargo run --release --example key_rate_curve [config.json] [out.csv]
//! ```

use std::path::PathBuf;

use cvqkd::keyrate::RateMethod;
use cvqkd::pipeline::{curve, RunConfig};

fn main() -> cvqkd::Result<()> {
    let mut args = std::env::args().skip(1);
    let cfg_path = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/curve.json"));
    let report = curve(&RunConfig::load(&cfg_path)?)?;

    println!("{:>6} {:>12} {:>12} {:>12}", "km", "legacy 1e10", "proposed 1e10", "asymptotic");
    let legacy = report.curve(RateMethod::Legacy, Some(1e10));
    let proposed = report.curve(RateMethod::Proposed, Some(1e10));
    let asym = report.curve(RateMethod::AsymptoticProposed, None);
    for ((l, p), a) in legacy.iter().zip(&proposed).zip(&asym).step_by(20) {
        println!(
            "{:>6.0} {:>12.3e} {:>12.3e} {:>12.3e}",
            l.distance_km, l.rate.rate, p.rate.rate, a.rate.rate
        );
    }
    for c in &report.cutoffs {
        println!(
            "{:<20} N={:<8} cutoff {:.2} km",
            c.method.name(),
            c.big_n.map_or("inf".into(), |n| format!("{n:e}")),
            c.distance_km.unwrap_or(f64::NAN)
        );
    }
    if let Some(out) = args.next() {
        std::fs::write(&out, report.to_csv())?;
        println!("wrote {out}");
    }
    Ok(())
}
