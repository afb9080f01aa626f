use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::channel::{ChannelParams, Detector};
use crate::ecc::{CodeRegistry, CodeSpec, DEFAULT_MAX_ITERS};
use crate::error::{Error, Result};
use crate::estimation::{CoarseSource, DEFAULT_MUTATION_THRESHOLD};
use crate::keyrate::{DetectorModel, SecurityParams, DEFAULT_BETA};

/// Transmittance given directly or through fiber length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TOrDistance {
    Transmittance(f64),
    DistanceKm(f64),
}

fn default_loss() -> f64 {
    0.2
}

fn default_eta() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelConfig {
    pub v_a: f64,
    #[serde(default = "default_eta")]
    pub eta: f64,
    pub t_or_distance: TOrDistance,
    #[serde(default)]
    pub xi: f64,
    #[serde(default)]
    pub v_el: f64,
    #[serde(default = "default_loss")]
    pub loss_db_per_km: f64,
    #[serde(default = "default_detector")]
    pub detector: Detector,
    pub n_pulses: usize,
    #[serde(default)]
    pub n_pilots: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_detector() -> Detector {
    Detector::Homodyne
}

impl ChannelConfig {
    pub fn params(&self) -> Result<ChannelParams> {
        match self.t_or_distance {
            TOrDistance::Transmittance(t) => ChannelParams::new(self.v_a, self.eta, t, self.xi, self.v_el),
            TOrDistance::DistanceKm(d) => {
                ChannelParams::from_distance(d, self.loss_db_per_km, self.eta, self.xi, self.v_el, self.v_a)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Legacy,
    Proposed,
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "legacy" => Ok(Method::Legacy),
            "proposed" => Ok(Method::Proposed),
            other => Err(Error::Config(format!("unknown method `{other}`"))),
        }
    }
}

/// Scales the base transmittance from `block` (1-based) onward.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelEvent {
    pub block: u64,
    pub transmittance_scale: f64,
}

/// Distance grid, either explicit or `start..=end` in steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DistanceGrid {
    List(Vec<f64>),
    Range { start: f64, end: f64, step: f64 },
}

impl DistanceGrid {
    pub fn points(&self) -> Vec<f64> {
        match self {
            DistanceGrid::List(v) => v.clone(),
            DistanceGrid::Range { start, end, step } => {
                let n = ((end - start) / step + 1e-9).floor() as usize;
                (0..=n).map(|k| start + k as f64 * step).collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveConfig {
    pub distances_km: DistanceGrid,
    pub block_sizes: Vec<f64>,
    /// Pins the modulation variance; optimized per distance when absent.
    #[serde(default)]
    pub v_a: Option<f64>,
    /// Grid spacing used when locating zero-rate distances.
    #[serde(default = "default_cutoff_step")]
    pub cutoff_step_km: f64,
}

fn default_cutoff_step() -> f64 {
    0.1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampling {
    /// Draw every sample.
    Full,
    /// Draw the estimators' sufficient statistics from their exact law.
    #[default]
    SufficientStatistics,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnrReportConfig {
    pub n_blocks: usize,
    pub block_size: u64,
    #[serde(default)]
    pub n_pilots: u64,
    #[serde(default)]
    pub sampling: Sampling,
}

/// Complete description of a run; see `configs/` for annotated examples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub channel: ChannelConfig,
    #[serde(default = "default_blocks")]
    pub n_blocks: u64,
    #[serde(default = "default_method")]
    pub method: Method,
    #[serde(default)]
    pub codes: Vec<CodeSpec>,
    #[serde(default)]
    pub security: SecurityParams,
    #[serde(default = "default_coarse")]
    pub coarse_source: CoarseSource,
    #[serde(default = "default_threshold")]
    pub mutation_threshold_rel: f64,
    #[serde(default = "default_iters")]
    pub max_iters: usize,
    #[serde(default)]
    pub detector_model: DetectorModel,
    /// Efficiency assumed by analytic curves; runs use the realized `R/C`.
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default)]
    pub channel_events: Vec<ChannelEvent>,
    #[serde(default)]
    pub curve: Option<CurveConfig>,
    #[serde(default)]
    pub snr_report: Option<SnrReportConfig>,
    /// Directory that relative code paths resolve against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn default_blocks() -> u64 {
    1
}
fn default_method() -> Method {
    Method::Proposed
}
fn default_coarse() -> CoarseSource {
    CoarseSource::Pilots
}
fn default_threshold() -> f64 {
    DEFAULT_MUTATION_THRESHOLD
}
fn default_iters() -> usize {
    DEFAULT_MAX_ITERS
}
fn default_beta() -> f64 {
    DEFAULT_BETA
}

impl RunConfig {
    pub fn from_json(text: &str, base_dir: &Path) -> Result<Self> {
        let mut cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.base_dir = base_dir.to_path_buf();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::from_json(&text, base)
    }

    pub fn validate(&self) -> Result<()> {
        let cfg_err = |m: String| Err(Error::Config(m));
        self.channel.params()?;
        self.security.validate()?;
        if self.channel.n_pulses < 2 {
            return cfg_err("channel.n_pulses must be at least 2".into());
        }
        if self.n_blocks == 0 {
            return cfg_err("n_blocks must be at least 1".into());
        }
        if !(self.mutation_threshold_rel > 0.0) {
            return cfg_err("mutation_threshold_rel must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.beta) {
            return cfg_err(format!("beta must lie in [0, 1], got {}", self.beta));
        }
        for ev in &self.channel_events {
            if !(ev.transmittance_scale > 0.0) || ev.block == 0 {
                return cfg_err("channel events need block ≥ 1 and a positive scale".into());
            }
        }
        if let Some(c) = &self.curve {
            if c.block_sizes.iter().any(|&n| !(n >= 2.0)) || c.block_sizes.is_empty() {
                return cfg_err("curve.block_sizes must be non-empty and ≥ 2".into());
            }
            if c.distances_km.points().is_empty() {
                return cfg_err("curve.distances_km is empty".into());
            }
        }
        if let Some(r) = &self.snr_report {
            if r.n_blocks < 2 || r.block_size < 4 {
                return cfg_err("snr_report needs n_blocks ≥ 2 and block_size ≥ 4".into());
            }
        }
        Ok(())
    }

    /// Loads the code registry; every code length must be a multiple of the
    /// reconciliation dimension.
    pub fn registry(&self) -> Result<CodeRegistry> {
        let reg = CodeRegistry::load(&self.codes, &self.base_dir)?;
        for i in 0..reg.specs().len() {
            let (spec, code) = reg.get(i);
            if code.n_cols() % crate::reconciliation::DIM != 0 {
                return Err(Error::Config(format!(
                    "code `{}` has length {}, not a multiple of {}",
                    spec.id,
                    code.n_cols(),
                    crate::reconciliation::DIM
                )));
            }
        }
        Ok(reg)
    }

    /// Physical channel during `block` (1-based), after channel events.
    pub fn block_channel(&self, block: u64) -> Result<ChannelParams> {
        let base = self.channel.params()?;
        let scale = self
            .channel_events
            .iter()
            .filter(|e| e.block <= block)
            .max_by_key(|e| e.block)
            .map_or(1.0, |e| e.transmittance_scale);
        let p = base.with_transmittance(base.transmittance * scale);
        p.validate()?;
        Ok(p)
    }
}
