//! Runs the desk-scale configuration with both parameter-estimation orders
//! and compares key output and disclosure.
//!
//! ```text
//! cargo run --release --example two_party_pipeline
//! ```

use std::path::Path;

use cvqkd::pipeline::{run, Method, RunConfig};

fn main() -> cvqkd::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    for (file, method) in [("desk_legacy.json", Method::Legacy), ("desk_proposed.json", Method::Proposed)] {
        let cfg = RunConfig::load(&dir.join(file))?;
        let result = run(&cfg, method)?;
        println!("{method:?}");
        println!("  {:>5} {:>6} {:>9} {:>10} {:>10}", "block", "code", "key bits", "disclosed", "keys match");
        let mut total = 0;
        for o in &result.outcomes {
            let r = &o.report;
            total += r.final_key_len;
            println!(
                "  {:>5} {:>6} {:>9} {:>10} {:>10}",
                r.block_id,
                r.code_id.as_deref().unwrap_or("-"),
                r.final_key_len,
                r.leakage.disclosed_samples,
                o.alice_key == o.bob_key
            );
        }
        println!("  total {total} bits from {} samples\n", cfg.n_blocks as usize * cfg.channel.n_pulses);
    }
    Ok(())
}
