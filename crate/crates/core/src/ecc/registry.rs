use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{load_code, SparseParityCheck};
use crate::error::{invalid, Error, Result};

/// Registry entry as written in the run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeSpec {
    #[serde(default)]
    pub id: String,
    pub path: PathBuf,
    pub rate: f64,
    pub snr_low: f64,
    pub snr_high: f64,
}

/// Codes sorted by SNR window, windows half-open `[snr_low, snr_high)`.
#[derive(Debug, Clone)]
pub struct CodeRegistry {
    specs: Vec<CodeSpec>,
    codes: Vec<SparseParityCheck>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Selection<'a> {
    pub index: usize,
    pub spec: &'a CodeSpec,
    pub code: &'a SparseParityCheck,
    /// Set when no window contained the SNR and the nearest one was used.
    pub out_of_window: bool,
}

impl CodeRegistry {
    /// Validates windows and pairs each spec with its matrix.
    pub fn new(entries: Vec<(CodeSpec, SparseParityCheck)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyRegistry);
        }
        let mut entries = entries;
        entries.sort_by(|a, b| a.0.snr_low.total_cmp(&b.0.snr_low));
        for (i, (spec, code)) in entries.iter().enumerate() {
            if !(spec.snr_low < spec.snr_high) {
                return Err(invalid("snr_low", format!("code {i}: window is empty")));
            }
            if (spec.rate - code.rate()).abs() > 1e-3 {
                return Err(invalid(
                    "rate",
                    format!("code {i}: declared {}, matrix has {}", spec.rate, code.rate()),
                ));
            }
        }
        for w in entries.windows(2) {
            if w[1].0.snr_low < w[0].0.snr_high {
                return Err(invalid("snr_low", "code SNR windows overlap"));
            }
        }
        let (specs, codes) = entries.into_iter().unzip();
        Ok(CodeRegistry { specs, codes })
    }

    /// Loads every alist named in `specs`; relative paths resolve against
    /// `base`.
    pub fn load(specs: &[CodeSpec], base: &Path) -> Result<Self> {
        let entries = specs
            .iter()
            .map(|s| {
                let path = if s.path.is_absolute() {
                    s.path.clone()
                } else {
                    base.join(&s.path)
                };
                let code = load_code(&path)?;
                let mut spec = s.clone();
                if spec.id.is_empty() {
                    spec.id = path
                        .file_stem()
                        .map(|f| f.to_string_lossy().into_owned())
                        .unwrap_or_default();
                }
                Ok((spec, code))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(entries)
    }

    pub fn specs(&self) -> &[CodeSpec] {
        &self.specs
    }

    pub fn get(&self, index: usize) -> (&CodeSpec, &SparseParityCheck) {
        (&self.specs[index], &self.codes[index])
    }

    pub fn select(&self, snr_est: f64) -> Selection<'_> {
        let pick = |index, out_of_window| Selection {
            index,
            spec: &self.specs[index],
            code: &self.codes[index],
            out_of_window,
        };
        if let Some(i) = self
            .specs
            .iter()
            .position(|s| s.snr_low <= snr_est && snr_est < s.snr_high)
        {
            return pick(i, false);
        }
        let distance = |s: &CodeSpec| {
            if snr_est < s.snr_low {
                s.snr_low - snr_est
            } else {
                snr_est - s.snr_high
            }
        };
        let nearest = (0..self.specs.len())
            .min_by(|&a, &b| distance(&self.specs[a]).total_cmp(&distance(&self.specs[b])))
            .unwrap();
        pick(nearest, true)
    }
}

/// Chooses the code whose window contains `snr_est`.
pub fn select_code(snr_est: f64, registry: &CodeRegistry) -> Selection<'_> {
    registry.select(snr_est)
}
