use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};

/// Binary parity-check matrix in row and column adjacency form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseParityCheck {
    n_cols: usize,
    rows: Vec<Vec<usize>>,
    cols: Vec<Vec<usize>>,
}

impl SparseParityCheck {
    /// Builds the matrix from the column indices of each row.
    pub fn from_rows(n_cols: usize, rows: Vec<Vec<usize>>) -> Result<Self> {
        let mut cols = vec![Vec::new(); n_cols];
        for (r, row) in rows.iter().enumerate() {
            for &c in row {
                if c >= n_cols {
                    return Err(invalid("rows", format!("row {r} references column {c} >= {n_cols}")));
                }
                if cols[c].last() == Some(&r) {
                    return Err(invalid("rows", format!("row {r} lists column {c} twice")));
                }
                cols[c].push(r);
            }
        }
        let h = SparseParityCheck { n_cols, rows, cols };
        h.validate()?;
        Ok(h)
    }

    fn validate(&self) -> Result<()> {
        if self.rows.is_empty() || self.rows.len() >= self.n_cols {
            return Err(invalid(
                "shape",
                format!("need 0 < rows < cols, got {}x{}", self.rows.len(), self.n_cols),
            ));
        }
        if let Some(c) = self.cols.iter().position(Vec::is_empty) {
            return Err(invalid("cols", format!("column {c} has no checks")));
        }
        Ok(())
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    /// `1 − rows/cols`.
    pub fn rate(&self) -> f64 {
        1.0 - self.n_rows() as f64 / self.n_cols as f64
    }

    pub fn row(&self, r: usize) -> &[usize] {
        &self.rows[r]
    }

    pub fn col(&self, c: usize) -> &[usize] {
        &self.cols[c]
    }

    pub fn n_edges(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// `H·bits` over GF(2).
    pub fn syndrome(&self, bits: &[u8]) -> Result<Vec<u8>> {
        if bits.len() != self.n_cols {
            return Err(Error::LengthMismatch {
                expected: self.n_cols,
                actual: bits.len(),
            });
        }
        Ok(self.syndrome_unchecked(bits))
    }

    pub(crate) fn syndrome_unchecked(&self, bits: &[u8]) -> Vec<u8> {
        self.rows
            .iter()
            .map(|row| row.iter().fold(0u8, |acc, &c| acc ^ (bits[c] & 1)))
            .collect()
    }

    /// Progressive edge growth: each variable node of degree `col_deg` is
    /// attached, one edge at a time, to a lowest-degree check node that is
    /// farthest from it in the current graph. Ties are broken by a seeded RNG.
    pub fn progressive_edge_growth(
        n_cols: usize,
        n_rows: usize,
        col_deg: usize,
        seed: u64,
    ) -> Result<Self> {
        if col_deg == 0 || col_deg > n_rows {
            return Err(invalid("col_deg", format!("must lie in 1..={n_rows}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rows: Vec<Vec<usize>> = vec![Vec::new(); n_rows];
        let mut cols: Vec<Vec<usize>> = vec![Vec::new(); n_cols];
        let mut reached = vec![false; n_rows];
        let mut var_seen = vec![false; n_cols];

        for v in 0..n_cols {
            for _ in 0..col_deg {
                let candidates: Vec<usize> = if cols[v].is_empty() {
                    (0..n_rows).collect()
                } else {
                    reached.fill(false);
                    var_seen.fill(false);
                    var_seen[v] = true;
                    let mut n_reached = 0;
                    let mut frontier = cols[v].clone();
                    for &c in &frontier {
                        reached[c] = true;
                        n_reached += 1;
                    }
                    loop {
                        let mut next = Vec::new();
                        for &c in &frontier {
                            for &v2 in &rows[c] {
                                if std::mem::replace(&mut var_seen[v2], true) {
                                    continue;
                                }
                                for &c2 in &cols[v2] {
                                    if !std::mem::replace(&mut reached[c2], true) {
                                        next.push(c2);
                                        n_reached += 1;
                                    }
                                }
                            }
                        }
                        if next.is_empty() {
                            break (0..n_rows).filter(|&c| !reached[c]).collect();
                        }
                        if n_reached == n_rows {
                            break next;
                        }
                        frontier = next;
                    }
                };
                let candidates: Vec<usize> =
                    candidates.into_iter().filter(|c| !cols[v].contains(c)).collect();
                let min_deg = candidates.iter().map(|&c| rows[c].len()).min().unwrap();
                let best: Vec<usize> = candidates
                    .into_iter()
                    .filter(|&c| rows[c].len() == min_deg)
                    .collect();
                let c = best[rng.random_range(0..best.len())];
                rows[c].push(v);
                cols[v].push(c);
            }
        }
        for row in &mut rows {
            row.sort_unstable();
        }
        Self::from_rows(n_cols, rows)
    }
}
