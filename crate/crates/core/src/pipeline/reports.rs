//! Analytic key-rate curves and the SNR-deviation study, both as CSV.

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::{RunConfig, Sampling};
use super::session::{derive_seed, STREAM_REPORT};
use crate::channel::{generate_linear_block, ChannelParams, Detector, LinearChannel};
use crate::error::{Error, Result};
use crate::estimation::{ml_estimate, sample_sufficient};
use crate::keyrate::{analytic_rate, cutoff_distance, optimize_v_a, RateBreakdown, RateMethod};

/// Largest distance searched for a zero-rate crossing.
pub const CUTOFF_SEARCH_END_KM: f64 = 400.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub distance_km: f64,
    /// `None` for the asymptotic methods.
    pub big_n: Option<f64>,
    pub method: RateMethod,
    pub v_a: f64,
    pub rate: RateBreakdown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cutoff {
    pub method: RateMethod,
    pub big_n: Option<f64>,
    /// `None` if the rate never turns non-positive in the search range.
    pub distance_km: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveReport {
    pub rows: Vec<CurveRow>,
    pub cutoffs: Vec<Cutoff>,
}

impl CurveReport {
    pub const CSV_HEADER: &'static str = "distance_km,N,method,V_A,beta,i_ab,s_be,delta_n,rate_raw,rate";

    pub fn to_csv(&self) -> String {
        let mut s = String::from(Self::CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            let n = r.big_n.map_or("inf".to_string(), |n| format!("{n:e}"));
            let b = &r.rate;
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{}",
                r.distance_km,
                n,
                r.method.name(),
                r.v_a,
                b.beta,
                b.i_ab,
                b.s_be,
                b.delta_n,
                b.rate_raw,
                b.rate
            );
        }
        s
    }

    /// Rows of one curve, ordered by distance.
    pub fn curve(&self, method: RateMethod, big_n: Option<f64>) -> Vec<&CurveRow> {
        self.rows
            .iter()
            .filter(|r| r.method == method && r.big_n == big_n)
            .collect()
    }

    pub fn cutoff(&self, method: RateMethod, big_n: Option<f64>) -> Option<f64> {
        self.cutoffs
            .iter()
            .find(|c| c.method == method && c.big_n == big_n)
            .and_then(|c| c.distance_km)
    }
}

struct CurveModel<'a> {
    cfg: &'a RunConfig,
    pinned_v_a: Option<f64>,
}

impl CurveModel<'_> {
    fn params(&self, d: f64) -> Result<ChannelParams> {
        let c = &self.cfg.channel;
        let p = ChannelParams::from_distance(d, c.loss_db_per_km, c.eta, c.xi, c.v_el, c.v_a)?;
        let v_a = match self.pinned_v_a {
            Some(v) => v,
            None => optimize_v_a(&p, self.cfg.beta, self.cfg.detector_model)?,
        };
        Ok(p.with_v_a(v_a))
    }

    fn rate(&self, method: RateMethod, p: &ChannelParams, big_n: Option<f64>) -> Result<RateBreakdown> {
        let n = big_n.map_or(2, |n| n.round() as u64);
        analytic_rate(method, p, n, self.cfg.beta, &self.cfg.security, self.cfg.detector_model)
    }
}

/// Analytic rates for every method on the configured distance grid, plus
/// the zero-rate distance of each curve.
pub fn curve(cfg: &RunConfig) -> Result<CurveReport> {
    let cc = cfg
        .curve
        .as_ref()
        .ok_or_else(|| Error::Config("config has no `curve` section".into()))?;
    let model = CurveModel { cfg, pinned_v_a: cc.v_a };
    let series: Vec<(RateMethod, Option<f64>)> = cc
        .block_sizes
        .iter()
        .flat_map(|&n| [(RateMethod::Legacy, Some(n)), (RateMethod::Proposed, Some(n))])
        .chain([(RateMethod::AsymptoticLegacy, None), (RateMethod::AsymptoticProposed, None)])
        .collect();

    let mut rows = Vec::new();
    for d in cc.distances_km.points() {
        let p = model.params(d)?;
        for &(method, big_n) in &series {
            rows.push(CurveRow {
                distance_km: d,
                big_n,
                method,
                v_a: p.v_a,
                rate: model.rate(method, &p, big_n)?,
            });
        }
    }

    let mut cutoffs = Vec::new();
    for &(method, big_n) in &series {
        let distance_km = cutoff_distance(
            |d| model.rate(method, &model.params(d)?, big_n).map(|r| r.rate_raw),
            0.0,
            CUTOFF_SEARCH_END_KM,
            cc.cutoff_step_km,
        )?;
        cutoffs.push(Cutoff { method, big_n, distance_km });
    }
    Ok(CurveReport { rows, cutoffs })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnrRow {
    pub block: u64,
    pub snr_true: f64,
    /// Estimate from all samples of this block.
    pub snr_block: f64,
    pub snr_pilot: Option<f64>,
    /// Previous block's full estimate, used as this block's prediction.
    pub snr_previous: Option<f64>,
}

impl SnrRow {
    pub fn pilot_deviation(&self) -> Option<f64> {
        self.snr_pilot.map(|s| (s - self.snr_true).abs())
    }

    pub fn previous_deviation(&self) -> Option<f64> {
        self.snr_previous.map(|s| (s - self.snr_true).abs())
    }

    /// Change of the full-block estimate between adjacent blocks.
    pub fn adjacent_deviation(&self) -> Option<f64> {
        self.snr_previous.map(|s| (self.snr_block - s).abs())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnrReport {
    pub block_size: u64,
    pub n_pilots: u64,
    pub rows: Vec<SnrRow>,
}

impl SnrReport {
    pub const CSV_HEADER: &'static str = "block,snr_true,snr_block,snr_pilot,snr_previous,\
pilot_abs_dev,pilot_rel_dev,previous_abs_dev,previous_rel_dev,adjacent_abs_dev,adjacent_rel_dev";

    /// Largest adjacent-block deviation over the run.
    pub fn max_adjacent_deviation(&self) -> f64 {
        self.rows.iter().filter_map(SnrRow::adjacent_deviation).fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map_or(String::new(), |v| v.to_string());
        let rel = |v: Option<f64>, base: f64| opt(v.map(|v| v / base));
        let mut s = String::from(Self::CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{},{}",
                r.block,
                r.snr_true,
                r.snr_block,
                opt(r.snr_pilot),
                opt(r.snr_previous),
                opt(r.pilot_deviation()),
                rel(r.pilot_deviation(), r.snr_true),
                opt(r.previous_deviation()),
                rel(r.previous_deviation(), r.snr_true),
                opt(r.adjacent_deviation()),
                rel(r.adjacent_deviation(), r.snr_true),
            );
        }
        s
    }
}

fn estimate_snr(ch: &LinearChannel, n: u64, sampling: Sampling, rng: &mut ChaCha8Rng, seed: u64) -> Result<f64> {
    let (t, s2) = match sampling {
        Sampling::SufficientStatistics => sample_sufficient(ch, n as usize, rng)?,
        Sampling::Full => {
            let b = generate_linear_block(ch, Detector::Homodyne, n as usize, 0, seed)?;
            ml_estimate(&b.x, &b.y)?
        }
    };
    Ok(t * t * ch.v_a / s2)
}

/// Per-block SNR estimates from pilots and from the previous block,
/// measured against the true SNR of each block.
pub fn snr_deviation_report(cfg: &RunConfig) -> Result<SnrReport> {
    let rc = cfg
        .snr_report
        .ok_or_else(|| Error::Config("config has no `snr_report` section".into()))?;
    let mut rows: Vec<SnrRow> = Vec::with_capacity(rc.n_blocks);
    for k in 1..=rc.n_blocks as u64 {
        let ch = cfg.block_channel(k)?.linear(Detector::Homodyne);
        let seed = derive_seed(cfg.channel.seed, k, STREAM_REPORT);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let snr_block = estimate_snr(&ch, rc.block_size, rc.sampling, &mut rng, seed)?;
        let snr_pilot = if rc.n_pilots >= 2 {
            Some(estimate_snr(&ch, rc.n_pilots, rc.sampling, &mut rng, seed ^ 1)?)
        } else {
            None
        };
        rows.push(SnrRow {
            block: k,
            snr_true: ch.snr(),
            snr_block,
            snr_pilot,
            snr_previous: rows.last().map(|r| r.snr_block),
        });
    }
    Ok(SnrReport {
        block_size: rc.block_size,
        n_pilots: rc.n_pilots,
        rows,
    })
}
