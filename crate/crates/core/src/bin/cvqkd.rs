use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cvqkd::channel::write_blocks;
use cvqkd::pipeline::{block_data, curve, run, snr_deviation_report, Method, RunConfig};
use cvqkd::privacy::{write_key_file, FinalKey};

#[derive(Parser)]
#[command(name = "cvqkd", version, about = "CV-QKD post-processing simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the sifted blocks a run would see and write them to a file.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the two-party post-processing and print one JSON report per block.
    Run {
        #[arg(long, value_parser = parse_method)]
        method: Option<Method>,
        #[arg(long)]
        config: PathBuf,
        /// Write the JSON reports here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write each verified block's final key to this directory.
        #[arg(long)]
        keys_dir: Option<PathBuf>,
    },
    /// Analytic key rate against distance for every method.
    Curve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Per-block SNR estimation deviations.
    SnrReport {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: cvqkd::Error| e.to_string())
}

fn simulate(cfg: &RunConfig, out: &Path) -> cvqkd::Result<()> {
    let blocks = (1..=cfg.n_blocks)
        .map(|b| block_data(cfg, b))
        .collect::<cvqkd::Result<Vec<_>>>()?;
    write_blocks(out, &blocks)?;
    eprintln!("wrote {} blocks to {}", blocks.len(), out.display());
    Ok(())
}

fn run_cmd(cfg: &RunConfig, method: Method, out: Option<&Path>, keys_dir: Option<&Path>) -> cvqkd::Result<()> {
    let result = run(cfg, method)?;
    let mut text = String::new();
    let mut total = 0u64;
    for o in &result.outcomes {
        text.push_str(&serde_json::to_string(&o.report)?);
        text.push('\n');
        total += o.report.final_key_len;
        if let Some(err) = &o.report.error {
            eprintln!("block {}: {err}", o.report.block_id);
        }
        if let (Some(dir), true) = (keys_dir, o.report.final_key_len > 0) {
            std::fs::create_dir_all(dir)?;
            let key = FinalKey {
                block_id: o.report.block_id,
                seed: cfg.channel.seed,
                bits: o.alice_key.clone(),
            };
            write_key_file(&dir.join(format!("block_{:04}.key", o.report.block_id)), &key)?;
        }
    }
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    eprintln!("{} blocks, {total} final key bits", result.outcomes.len());
    Ok(())
}

fn main_inner(cli: Cli) -> cvqkd::Result<()> {
    match cli.command {
        Command::Simulate { config, out } => simulate(&RunConfig::load(&config)?, &out),
        Command::Run { method, config, out, keys_dir } => {
            let cfg = RunConfig::load(&config)?;
            let method = method.unwrap_or(cfg.method);
            run_cmd(&cfg, method, out.as_deref(), keys_dir.as_deref())
        }
        Command::Curve { config, out } => {
            let report = curve(&RunConfig::load(&config)?)?;
            std::fs::write(&out, report.to_csv())?;
            for c in &report.cutoffs {
                let n = c.big_n.map_or("inf".into(), |n| format!("{n:e}"));
                let d = c.distance_km.map_or("none".into(), |d| format!("{d:.2} km"));
                eprintln!("cutoff {:<20} N={n:<6} {d}", c.method.name());
            }
            Ok(())
        }
        Command::SnrReport { config, out } => {
            let report = snr_deviation_report(&RunConfig::load(&config)?)?;
            std::fs::write(&out, report.to_csv())?;
            eprintln!("max adjacent-block SNR deviation {:.3e}", report.max_adjacent_deviation());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
