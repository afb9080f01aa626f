//! Secret key rates for reverse-reconciled homodyne CV-QKD.
//!
//! * asymptotic: `β·I − S`
//! * legacy finite-size, estimating on `m` of `N` samples:
//!   `(n/N)·[β·I − S_ε − Δ(n)]` with `n = N − m`
//! * proposed finite-size, estimating on all `N` samples after
//!   reconciliation: `β·I − S_ε − Δ(N)`
//!
//! `S_ε` is the Holevo bound evaluated at the worst-case channel allowed by
//! the estimator's confidence interval.

mod curve;
mod holevo;

pub use curve::{cutoff_distance, golden_section_max, optimize_v_a, V_A_RANGE};
pub use holevo::{covariance_matrix, entropy_g, holevo_bound, symplectic_eigenvalues};

use serde::{Deserialize, Serialize};

use crate::channel::ChannelParams;
use crate::error::{invalid, Result};
use crate::estimation::{ChannelEstimate, DEFAULT_EPS_PE};

pub const DEFAULT_BETA: f64 = 0.95;

/// `½·log₂(1+SNR)`.
pub fn mutual_information(snr: f64) -> f64 {
    0.5 * (1.0 + snr.max(0.0)).log2()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SecurityParams {
    pub eps_pe: f64,
    pub eps_pa: f64,
    pub eps_bar: f64,
    pub dim_hy: f64,
}

impl Default for SecurityParams {
    fn default() -> Self {
        SecurityParams {
            eps_pe: DEFAULT_EPS_PE,
            eps_pa: 1e-10,
            eps_bar: 1e-10,
            dim_hy: 2.0,
        }
    }
}

impl SecurityParams {
    pub fn validate(&self) -> Result<()> {
        for (name, e) in [
            ("eps_pe", self.eps_pe),
            ("eps_pa", self.eps_pa),
            ("eps_bar", self.eps_bar),
        ] {
            if !(e > 0.0 && e < 1.0) {
                return Err(invalid(name, format!("must lie in (0, 1), got {e}")));
            }
        }
        if !(self.dim_hy >= 2.0) {
            return Err(invalid("dim_hy", format!("must be ≥ 2, got {}", self.dim_hy)));
        }
        Ok(())
    }
}

/// `Δ(n) = (2·dim+3)·√(log₂(2/ε̄)/n) + (2/n)·log₂(1/ε_PA)`.
pub fn delta_n(n: f64, sec: &SecurityParams) -> f64 {
    (2.0 * sec.dim_hy + 3.0) * ((2.0 / sec.eps_bar).log2() / n).sqrt()
        + 2.0 / n * (1.0 / sec.eps_pa).log2()
}

/// Who is charged for the detector's inefficiency and electronic noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DetectorModel {
    /// Calibrated `η`, `v_el` are outside Eve's control.
    #[default]
    Trusted,
    /// All loss and noise is attributed to the channel.
    Untrusted,
}

/// Calibrated detector parameters held fixed while the channel is bounded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub eta: f64,
    pub v_el: f64,
    pub model: DetectorModel,
}

impl Detection {
    pub fn of(params: &ChannelParams, model: DetectorModel) -> Self {
        Detection {
            eta: params.eta,
            v_el: params.v_el,
            model,
        }
    }
}

/// Channel parameters fed to the Holevo bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveChannel {
    pub eta: f64,
    pub transmittance: f64,
    pub xi: f64,
    pub v_el: f64,
}

/// Maps a linear-model pair `(t, σ²)` to physical parameters. In trusted
/// mode `T = t²/η` and `ξ = (σ² − 1 − v_el)/t²`; untrusted mode takes
/// `η = 1`, `v_el = 0`. `T` is capped at 1 and `ξ` floored at 0.
pub fn effective_channel(t: f64, sigma2: f64, det: &Detection) -> Result<EffectiveChannel> {
    if !(t > 0.0) {
        return Err(invalid("t_min", format!("no positive transmission bound ({t})")));
    }
    let (eta, v_el) = match det.model {
        DetectorModel::Trusted => (det.eta, det.v_el),
        DetectorModel::Untrusted => (1.0, 0.0),
    };
    let t2 = t * t;
    Ok(EffectiveChannel {
        eta,
        transmittance: (t2 / eta).min(1.0),
        xi: ((sigma2 - 1.0 - v_el) / t2).max(0.0),
        v_el,
    })
}

fn holevo_at(v_a: f64, ch: &EffectiveChannel) -> Result<f64> {
    holevo_bound(v_a, ch.eta, ch.transmittance, ch.xi, ch.v_el)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateBreakdown {
    pub i_ab: f64,
    pub s_be: f64,
    pub delta_n: f64,
    pub beta: f64,
    /// Samples entering the key.
    pub n: u64,
    /// Block length.
    #[serde(rename = "N")]
    pub big_n: u64,
    pub rate_raw: f64,
    pub rate: f64,
}

impl RateBreakdown {
    fn assemble(i_ab: f64, s_be: f64, delta_n: f64, beta: f64, n: u64, big_n: u64) -> Self {
        let prefactor = n as f64 / big_n as f64;
        let rate_raw = prefactor * (beta * i_ab - s_be - delta_n);
        RateBreakdown {
            i_ab,
            s_be,
            delta_n,
            beta,
            n,
            big_n,
            rate_raw,
            rate: rate_raw.max(0.0),
        }
    }

    /// Prefactor `n/N`.
    pub fn key_fraction(&self) -> f64 {
        self.n as f64 / self.big_n as f64
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(invalid("beta", format!("must lie in [0, 1], got {beta}")));
    }
    Ok(())
}

/// `β·I − S` at the true channel parameters.
pub fn key_rate_asymptotic(params: &ChannelParams, beta: f64, model: DetectorModel) -> Result<RateBreakdown> {
    check_beta(beta)?;
    let lin = params.linear(crate::channel::Detector::Homodyne);
    let ch = effective_channel(lin.t, lin.sigma2, &Detection::of(params, model))?;
    let s = holevo_at(params.v_a, &ch)?;
    Ok(RateBreakdown::assemble(mutual_information(lin.snr()), s, 0.0, beta, 1, 1))
}

/// The legacy prefactor `n/N = ½` applied to [`key_rate_asymptotic`].
pub fn key_rate_asymptotic_legacy(
    params: &ChannelParams,
    beta: f64,
    model: DetectorModel,
) -> Result<RateBreakdown> {
    let full = key_rate_asymptotic(params, beta, model)?;
    Ok(RateBreakdown::assemble(full.i_ab, full.s_be, 0.0, beta, 1, 2))
}

fn finite_rate(
    n_key: u64,
    big_n: u64,
    est: &ChannelEstimate,
    det: &Detection,
    beta: f64,
    sec: &SecurityParams,
) -> Result<RateBreakdown> {
    check_beta(beta)?;
    sec.validate()?;
    let ch = effective_channel(est.t_min, est.sigma2_max, det)?;
    let s = holevo_at(est.v_a, &ch)?;
    Ok(RateBreakdown::assemble(
        mutual_information(est.snr_hat),
        s,
        delta_n(n_key as f64, sec),
        beta,
        n_key,
        big_n,
    ))
}

/// Legacy rate: `est` comes from the `m` disclosed samples, the remaining
/// `N − m` form the key.
pub fn key_rate_legacy(
    big_n: u64,
    m: u64,
    est: &ChannelEstimate,
    det: &Detection,
    beta: f64,
    sec: &SecurityParams,
) -> Result<RateBreakdown> {
    if !(m > 0 && m < big_n) {
        return Err(invalid("m", format!("need 0 < m < N, got m={m}, N={big_n}")));
    }
    finite_rate(big_n - m, big_n, est, det, beta, sec)
}

/// Proposed rate: `est` comes from all `N` samples, all of which form the key.
pub fn key_rate_proposed(
    big_n: u64,
    est: &ChannelEstimate,
    det: &Detection,
    beta: f64,
    sec: &SecurityParams,
) -> Result<RateBreakdown> {
    if big_n == 0 {
        return Err(invalid("N", "block is empty"));
    }
    finite_rate(big_n, big_n, est, det, beta, sec)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RateMethod {
    Legacy,
    Proposed,
    AsymptoticLegacy,
    AsymptoticProposed,
}

impl RateMethod {
    pub const ALL: [RateMethod; 4] = [
        RateMethod::Legacy,
        RateMethod::Proposed,
        RateMethod::AsymptoticLegacy,
        RateMethod::AsymptoticProposed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RateMethod::Legacy => "legacy",
            RateMethod::Proposed => "proposed",
            RateMethod::AsymptoticLegacy => "asymptotic-legacy",
            RateMethod::AsymptoticProposed => "asymptotic-proposed",
        }
    }
}

/// Analytic rate where the estimator returns the true `(t, σ²)` and only the
/// confidence widths depend on the sample count. Legacy estimates on `N/2`.
pub fn analytic_rate(
    method: RateMethod,
    params: &ChannelParams,
    big_n: u64,
    beta: f64,
    sec: &SecurityParams,
    model: DetectorModel,
) -> Result<RateBreakdown> {
    let det = Detection::of(params, model);
    let estimate = |n_used: u64| {
        ChannelEstimate::from_point(params.t(), params.sigma2(), n_used as usize, params.v_a, sec.eps_pe)
    };
    match method {
        RateMethod::AsymptoticProposed => key_rate_asymptotic(params, beta, model),
        RateMethod::AsymptoticLegacy => key_rate_asymptotic_legacy(params, beta, model),
        RateMethod::Proposed => key_rate_proposed(big_n, &estimate(big_n)?, &det, beta, sec),
        RateMethod::Legacy => {
            let m = big_n / 2;
            key_rate_legacy(big_n, m, &estimate(m)?, &det, beta, sec)
        }
    }
}
