//! Regenerates the LDPC matrices shipped in `codes/`.
//!
//! ```text
//! cargo run --release --example make_codes [out_dir]
//! ```

use std::path::PathBuf;

use cvqkd::ecc::{write_code, SparseParityCheck};

struct Recipe {
    file: &'static str,
    n: usize,
    rows: usize,
    col_deg: usize,
    seed: u64,
}

const RECIPES: [Recipe; 2] = [
    Recipe { file: "ldpc_r12_n1000.alist", n: 1000, rows: 500, col_deg: 3, seed: 12 },
    Recipe { file: "ldpc_r14_n1000.alist", n: 1000, rows: 750, col_deg: 3, seed: 14 },
];

fn main() -> cvqkd::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("codes"));
    std::fs::create_dir_all(&out)?;
    for r in &RECIPES {
        let h = SparseParityCheck::progressive_edge_growth(r.n, r.rows, r.col_deg, r.seed)?;
        let path = out.join(r.file);
        write_code(&path, &h)?;
        println!("{}: n={} m={} rate={:.4} edges={}", path.display(), h.n_cols(), h.n_rows(), h.rate(), h.n_edges());
    }
    Ok(())
}
