//! Maximum-likelihood estimation of the linear channel `y = t·x + z`.
//!
//! For `N` sample pairs, `t̂ = Σxy/Σx²` is normal around `t` with variance
//! `σ²/Σx²`, and `N·σ̂²/σ²` is χ² with `N−1` degrees of freedom. The
//! worst-case parameters hold except with probability `ε_PE`:
//!
//! ```text
//! t_min     = t̂  − z·sqrt(σ̂²/(N·V_A))
//! σ²_max    = σ̂² + z·σ̂²·√2/√N
//! ```
//!
//! where `z` is the two-sided Gaussian quantile, `erf(z/√2) = 1 − ε_PE`.

mod sums;

pub use sums::{CompensatedSum, Moments};

use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::channel::LinearChannel;
use crate::error::{invalid, Error, Result};

pub const DEFAULT_EPS_PE: f64 = 1e-10;
pub const DEFAULT_MUTATION_THRESHOLD: f64 = 0.05;

/// `(t̂, σ̂²)` by the two-pass estimator.
pub fn ml_estimate(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            actual: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(invalid("x", "need at least two samples"));
    }
    let m = Moments::from_samples(x, y);
    let t_hat = m.t_hat().ok_or_else(|| invalid("x", "all samples are zero"))?;
    let mut resid = CompensatedSum::default();
    for (&xi, &yi) in x.iter().zip(y) {
        let r = yi - t_hat * xi;
        resid.add(r * r);
    }
    Ok((t_hat, resid.value() / x.len() as f64))
}

/// Two-sided quantile: `erf(z/√2) = 1 − ε`, solved on `erfc` to avoid
/// cancellation for small `ε`.
pub fn z_quantile(eps_pe: f64) -> Result<f64> {
    if !(eps_pe > 0.0 && eps_pe < 1.0) {
        return Err(invalid("eps_pe", format!("must lie in (0, 1), got {eps_pe}")));
    }
    let f = |z: f64| erfc(z / std::f64::consts::SQRT_2) - eps_pe;
    let (mut lo, mut hi) = (0.0f64, 40.0f64);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Confidence half-widths `(Δt, Δσ²)`.
pub fn bound_widths(sigma2_hat: f64, n_used: usize, v_a: f64, z: f64) -> (f64, f64) {
    let n = n_used as f64;
    (
        z * (sigma2_hat / (n * v_a)).sqrt(),
        z * sigma2_hat * std::f64::consts::SQRT_2 / n.sqrt(),
    )
}

/// `(t_min, σ²_max)`.
pub fn worst_case_bounds(
    t_hat: f64,
    sigma2_hat: f64,
    n_used: usize,
    v_a: f64,
    eps_pe: f64,
) -> Result<(f64, f64)> {
    if n_used < 2 {
        return Err(invalid("n_used", "need at least two samples"));
    }
    let z = z_quantile(eps_pe)?;
    let (dt, ds) = bound_widths(sigma2_hat, n_used, v_a, z);
    Ok((t_hat - dt, sigma2_hat + ds))
}

/// Standard deviation of the SNR estimate from `n` samples (delta method):
/// `sqrt((4·SNR + 2·SNR²)/n)`.
pub fn snr_estimator_std(snr: f64, n: usize) -> f64 {
    ((4.0 * snr + 2.0 * snr * snr) / n as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelEstimate {
    pub t_hat: f64,
    pub sigma2_hat: f64,
    pub n_used: usize,
    pub eps_pe: f64,
    pub t_min: f64,
    pub sigma2_max: f64,
    pub snr_hat: f64,
    pub v_a: f64,
}

impl ChannelEstimate {
    /// Wraps point estimates with their worst-case bounds.
    pub fn from_point(
        t_hat: f64,
        sigma2_hat: f64,
        n_used: usize,
        v_a: f64,
        eps_pe: f64,
    ) -> Result<Self> {
        if sigma2_hat < 0.0 || !sigma2_hat.is_finite() {
            return Err(invalid("sigma2_hat", "must be finite and non-negative"));
        }
        let (t_min, sigma2_max) = worst_case_bounds(t_hat, sigma2_hat, n_used, v_a, eps_pe)?;
        Ok(ChannelEstimate {
            t_hat,
            sigma2_hat,
            n_used,
            eps_pe,
            t_min,
            sigma2_max,
            snr_hat: t_hat * t_hat * v_a / sigma2_hat,
            v_a,
        })
    }

    pub fn from_samples(x: &[f64], y: &[f64], v_a: f64, eps_pe: f64) -> Result<Self> {
        let (t, s2) = ml_estimate(x, y)?;
        Self::from_point(t, s2, x.len(), v_a, eps_pe)
    }
}

/// Draws `(t̂, σ̂²)` for `n` samples of `channel` directly from the
/// estimators' exact joint law: `Σx² = V_A·χ²(n)`, `t̂ | Σx² ~ N(t, σ²/Σx²)`,
/// `n·σ̂²/σ² ~ χ²(n−1)` independent of `t̂`.
pub fn sample_sufficient<R: Rng + ?Sized>(
    channel: &LinearChannel,
    n: usize,
    rng: &mut R,
) -> Result<(f64, f64)> {
    if n < 2 {
        return Err(invalid("n", "need at least two samples"));
    }
    let chi_n = ChiSquared::new(n as f64).map_err(|e| invalid("n", e.to_string()))?;
    let chi_n1 = ChiSquared::new((n - 1) as f64).map_err(|e| invalid("n", e.to_string()))?;
    let sxx = channel.v_a * chi_n.sample(rng);
    let g: f64 = rng.sample(StandardNormal);
    let t_hat = channel.t + g * (channel.sigma2 / sxx).sqrt();
    let sigma2_hat = channel.sigma2 * chi_n1.sample(rng) / n as f64;
    Ok((t_hat, sigma2_hat))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoarseSource {
    Pilots,
    PreviousBlock,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoarseEstimate {
    pub snr_est: f64,
    pub sigma2_est: f64,
    pub t_est: f64,
    pub source: CoarseSource,
    pub n_source: usize,
}

/// Rough channel estimate ahead of reconciliation.
///
/// `prefer` picks the source when both are available; otherwise whichever
/// exists is used.
pub fn coarse_estimate(
    pilots: Option<(&[f64], &[f64])>,
    v_a: f64,
    previous: Option<&ChannelEstimate>,
    prefer: CoarseSource,
) -> Result<CoarseEstimate> {
    let pilots = pilots.filter(|(x, _)| x.len() >= 2);
    let use_pilots = match (pilots.is_some(), previous.is_some()) {
        (false, false) => return Err(Error::NoCoarseSource),
        (true, false) => true,
        (false, true) => false,
        (true, true) => prefer == CoarseSource::Pilots,
    };
    let est = if use_pilots {
        let (x, y) = pilots.unwrap();
        let (t, s2) = ml_estimate(x, y)?;
        CoarseEstimate {
            snr_est: t * t * v_a / s2,
            sigma2_est: s2,
            t_est: t,
            source: CoarseSource::Pilots,
            n_source: x.len(),
        }
    } else {
        let p = previous.unwrap();
        CoarseEstimate {
            snr_est: p.t_hat * p.t_hat * v_a / p.sigma2_hat,
            sigma2_est: p.sigma2_hat,
            t_est: p.t_hat,
            source: CoarseSource::PreviousBlock,
            n_source: p.n_used,
        }
    };
    if !(est.snr_est > 0.0 && est.snr_est.is_finite()) {
        return Err(invalid("snr_est", format!("coarse SNR {} is not positive", est.snr_est)));
    }
    Ok(est)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stability {
    Stable,
    Mutated,
}

/// Mutated iff the relative SNR change exceeds `threshold_rel`.
pub fn mutation_check(prev_snr: f64, new_snr: f64, threshold_rel: f64) -> Stability {
    if ((new_snr - prev_snr) / prev_snr).abs() > threshold_rel {
        Stability::Mutated
    } else {
        Stability::Stable
    }
}
