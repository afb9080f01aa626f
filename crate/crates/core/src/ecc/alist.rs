//! MacKay's alist text format.
//!
//! ```text
//! n_cols n_rows
//! max_col_degree max_row_degree
//! <col degrees>
//! <row degrees>
//! <n_cols lines: 1-based row indices of each column, 0-padded>
//! <n_rows lines: 1-based column indices of each row, 0-padded>
//! ```

use std::fmt::Write as _;
use std::path::Path;

use super::SparseParityCheck;
use crate::error::{Error, Result};

fn err(line: usize, reason: impl Into<String>) -> Error {
    Error::Alist {
        line,
        reason: reason.into(),
    }
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl Lines<'_> {
    /// Next non-blank line as integers, with its 1-based line number.
    fn next_ints(&mut self, what: &str) -> Result<(usize, Vec<usize>)> {
        for (i, raw) in self.inner.by_ref() {
            self.last = i + 1;
            if raw.trim().is_empty() {
                continue;
            }
            let ints = raw
                .split_whitespace()
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|_| err(i + 1, format!("expected integer in {what}, got `{t}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            return Ok((i + 1, ints));
        }
        Err(err(self.last + 1, format!("unexpected end of file, expected {what}")))
    }

    fn exact(&mut self, what: &str, n: usize) -> Result<(usize, Vec<usize>)> {
        let (line, v) = self.next_ints(what)?;
        if v.len() != n {
            return Err(err(line, format!("{what}: expected {n} values, got {}", v.len())));
        }
        Ok((line, v))
    }
}

pub fn parse_alist(text: &str) -> Result<SparseParityCheck> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        last: 0,
    };
    let (l, dims) = lines.exact("dimensions", 2)?;
    let (n_cols, n_rows) = (dims[0], dims[1]);
    if n_cols == 0 || n_rows == 0 {
        return Err(err(l, "dimensions must be positive"));
    }
    let (_, maxes) = lines.exact("maximum degrees", 2)?;
    let (max_col, max_row) = (maxes[0], maxes[1]);
    let (lc, col_deg) = lines.exact("column degrees", n_cols)?;
    let (lr, row_deg) = lines.exact("row degrees", n_rows)?;
    if col_deg.iter().copied().max() != Some(max_col) {
        return Err(err(lc, format!("maximum column degree is not {max_col}")));
    }
    if row_deg.iter().copied().max() != Some(max_row) {
        return Err(err(lr, format!("maximum row degree is not {max_row}")));
    }

    let read_lists = |lines: &mut Lines, count: usize, degs: &[usize], bound: usize, what: &str| {
        (0..count)
            .map(|k| {
                let (line, raw) = lines.next_ints(what)?;
                let idx: Vec<usize> = raw.into_iter().filter(|&v| v != 0).collect();
                if idx.len() != degs[k] {
                    return Err(err(
                        line,
                        format!("{what} {k}: degree list says {}, found {}", degs[k], idx.len()),
                    ));
                }
                if let Some(&bad) = idx.iter().find(|&&v| v > bound) {
                    return Err(err(line, format!("{what} {k}: index {bad} exceeds {bound}")));
                }
                Ok((line, idx.into_iter().map(|v| v - 1).collect::<Vec<_>>()))
            })
            .collect::<Result<Vec<_>>>()
    };
    let col_lists = read_lists(&mut lines, n_cols, &col_deg, n_rows, "column")?;
    let row_lists = read_lists(&mut lines, n_rows, &row_deg, n_cols, "row")?;

    let rows: Vec<Vec<usize>> = row_lists.iter().map(|(_, r)| r.clone()).collect();
    let h = SparseParityCheck::from_rows(n_cols, rows).map_err(|e| err(lr, e.to_string()))?;
    for (c, (line, list)) in col_lists.iter().enumerate() {
        let mut want = list.clone();
        want.sort_unstable();
        let mut have = h.col(c).to_vec();
        have.sort_unstable();
        if want != have {
            return Err(err(*line, format!("column {c} disagrees with the row lists")));
        }
    }
    Ok(h)
}

pub fn load_code(path: &Path) -> Result<SparseParityCheck> {
    let text = std::fs::read_to_string(path)?;
    parse_alist(&text).map_err(|e| match e {
        Error::Alist { line, reason } => Error::Format {
            path: path.to_path_buf(),
            reason: format!("line {line}: {reason}"),
        },
        other => other,
    })
}

pub fn to_alist(h: &SparseParityCheck) -> String {
    let n = h.n_cols();
    let m = h.n_rows();
    let col_deg: Vec<usize> = (0..n).map(|c| h.col(c).len()).collect();
    let row_deg: Vec<usize> = (0..m).map(|r| h.row(r).len()).collect();
    let max_col = *col_deg.iter().max().unwrap();
    let max_row = *row_deg.iter().max().unwrap();
    let join = |v: &mut dyn Iterator<Item = usize>| {
        v.map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
    };
    let mut s = String::new();
    writeln!(s, "{n} {m}").unwrap();
    writeln!(s, "{max_col} {max_row}").unwrap();
    writeln!(s, "{}", join(&mut col_deg.iter().copied())).unwrap();
    writeln!(s, "{}", join(&mut row_deg.iter().copied())).unwrap();
    for c in 0..n {
        let mut list: Vec<usize> = h.col(c).iter().map(|r| r + 1).collect();
        list.resize(max_col, 0);
        writeln!(s, "{}", join(&mut list.into_iter())).unwrap();
    }
    for r in 0..m {
        let mut list: Vec<usize> = h.row(r).iter().map(|c| c + 1).collect();
        list.resize(max_row, 0);
        writeln!(s, "{}", join(&mut list.into_iter())).unwrap();
    }
    s
}

pub fn write_code(path: &Path, h: &SparseParityCheck) -> Result<()> {
    std::fs::write(path, to_alist(h))?;
    Ok(())
}
