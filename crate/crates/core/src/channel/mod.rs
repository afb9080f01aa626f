//! Gaussian raw-key generation over the linear AWGN channel `y = t·x + z`.
//!
//! Every variance in this crate is in shot-noise units (SNU): the vacuum
//! quadrature noise is 1, so Bob's conditional noise is
//! `σ² = 1 + η·T·ξ + v_el` and never drops below 1 for a physical channel.
//! [`LinearChannel`] exposes the bare `(t, σ²)` model without that floor for
//! noiseless test channels.
//!
//! Samples are drawn from a ChaCha8 stream seeded with the block seed, and
//! Gaussian variates use the ziggurat sampler of `rand_distr`
//! (`StandardNormal`). Both are pinned through `Cargo.lock`, so a seed
//! reproduces the same block on every platform.

mod file;

pub use file::{read_blocks, write_blocks};

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Physical description of the link, in shot-noise units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    /// Alice's modulation variance.
    pub v_a: f64,
    /// Detector efficiency.
    pub eta: f64,
    /// Channel transmittance.
    pub transmittance: f64,
    /// Excess noise referred to the channel input.
    pub xi: f64,
    /// Electronic noise of Bob's detector.
    pub v_el: f64,
    pub loss_db_per_km: f64,
    pub distance_km: f64,
}

fn check_finite(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(invalid(name, format!("must be finite, got {v}")))
    }
}

impl ChannelParams {
    /// Builds parameters from a transmittance directly; the distance fields
    /// are left at zero.
    pub fn new(v_a: f64, eta: f64, transmittance: f64, xi: f64, v_el: f64) -> Result<Self> {
        let p = ChannelParams {
            v_a,
            eta,
            transmittance,
            xi,
            v_el,
            loss_db_per_km: 0.0,
            distance_km: 0.0,
        };
        p.validate()?;
        Ok(p)
    }

    /// Transmittance from fibre loss: `T = 10^(−loss·distance/10)`.
    pub fn from_distance(
        distance_km: f64,
        loss_db_per_km: f64,
        eta: f64,
        xi: f64,
        v_el: f64,
        v_a: f64,
    ) -> Result<Self> {
        check_finite("distance_km", distance_km)?;
        check_finite("loss_db_per_km", loss_db_per_km)?;
        if distance_km < 0.0 {
            return Err(invalid("distance_km", "must be non-negative"));
        }
        if loss_db_per_km < 0.0 {
            return Err(invalid("loss_db_per_km", "must be non-negative"));
        }
        let transmittance = 10f64.powf(-loss_db_per_km * distance_km / 10.0);
        let p = ChannelParams {
            v_a,
            eta,
            transmittance,
            xi,
            v_el,
            loss_db_per_km,
            distance_km,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("v_a", self.v_a),
            ("eta", self.eta),
            ("transmittance", self.transmittance),
            ("xi", self.xi),
            ("v_el", self.v_el),
        ] {
            check_finite(name, v)?;
        }
        if self.v_a <= 0.0 {
            return Err(invalid("v_a", "modulation variance must be positive"));
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(invalid("eta", "detector efficiency must lie in (0, 1]"));
        }
        if !(self.transmittance > 0.0 && self.transmittance <= 1.0) {
            return Err(invalid("transmittance", "must lie in (0, 1]"));
        }
        if self.xi < 0.0 {
            return Err(invalid("xi", "excess noise must be non-negative"));
        }
        if self.v_el < 0.0 {
            return Err(invalid("v_el", "electronic noise must be non-negative"));
        }
        Ok(())
    }

    /// `t = sqrt(η·T)`.
    pub fn t(&self) -> f64 {
        (self.eta * self.transmittance).sqrt()
    }

    /// `σ² = 1 + η·T·ξ + v_el`.
    pub fn sigma2(&self) -> f64 {
        1.0 + self.eta * self.transmittance * self.xi + self.v_el
    }

    pub fn snr(&self) -> f64 {
        let t = self.t();
        t * t * self.v_a / self.sigma2()
    }

    pub fn with_v_a(self, v_a: f64) -> Self {
        ChannelParams { v_a, ..self }
    }

    pub fn with_transmittance(self, transmittance: f64) -> Self {
        ChannelParams {
            transmittance,
            ..self
        }
    }

    /// Per-quadrature linear model seen by the sifted data.
    ///
    /// Heterodyne splits the signal on a balanced beam splitter, so each
    /// quadrature carries `t/√2` and half of the excess noise on top of a
    /// full unit of vacuum noise.
    pub fn linear(&self, detector: Detector) -> LinearChannel {
        match detector {
            Detector::Homodyne => LinearChannel {
                v_a: self.v_a,
                t: self.t(),
                sigma2: self.sigma2(),
            },
            Detector::Heterodyne => LinearChannel {
                v_a: self.v_a,
                t: self.t() / std::f64::consts::SQRT_2,
                sigma2: 1.0 + 0.5 * self.eta * self.transmittance * self.xi + self.v_el,
            },
        }
    }
}

/// The bare statistical model `y = t·x + z`, `x ~ N(0, V_A)`, `z ~ N(0, σ²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearChannel {
    pub v_a: f64,
    pub t: f64,
    pub sigma2: f64,
}

impl LinearChannel {
    pub fn new(v_a: f64, t: f64, sigma2: f64) -> Result<Self> {
        check_finite("v_a", v_a)?;
        check_finite("t", t)?;
        check_finite("sigma2", sigma2)?;
        if v_a <= 0.0 {
            return Err(invalid("v_a", "modulation variance must be positive"));
        }
        if t < 0.0 {
            return Err(invalid("t", "must be non-negative"));
        }
        if sigma2 < 0.0 {
            return Err(invalid("sigma2", "must be non-negative"));
        }
        Ok(LinearChannel { v_a, t, sigma2 })
    }

    /// `SNR = t²·V_A/σ²`; infinite for a noiseless channel.
    pub fn snr(&self) -> f64 {
        self.t * self.t * self.v_a / self.sigma2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Detector {
    Homodyne,
    Heterodyne,
}

impl Detector {
    /// Sifted samples produced per pulse.
    pub fn samples_per_pulse(self) -> usize {
        match self {
            Detector::Homodyne => 1,
            Detector::Heterodyne => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quadrature {
    Q,
    P,
}

/// Unsifted measurement record: Alice's two quadratures per pulse and Bob's
/// outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseBlock {
    pub detector: Detector,
    pub alice_q: Vec<f64>,
    pub alice_p: Vec<f64>,
    /// Homodyne: one outcome per pulse. Heterodyne: `q, p` interleaved.
    pub bob: Vec<f64>,
    /// Quadrature Bob measured on each pulse (homodyne only).
    pub labels: Vec<Quadrature>,
    /// Sorted pulse indices reserved as disclosed pilots.
    pub pilot_pulses: Vec<usize>,
    pub seed: u64,
}

impl PulseBlock {
    pub fn n_total(&self) -> usize {
        self.alice_q.len()
    }
}

/// Sifted raw keys of both parties plus the disclosed pilot samples.
#[derive(Debug, Clone, PartialEq)]
pub struct RawKeyBlock {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub pilots_x: Vec<f64>,
    pub pilots_y: Vec<f64>,
    /// Pulse indices the pilots came from; key samples use the complement.
    pub pilot_pulses: Vec<usize>,
    pub detector: Detector,
    pub seed: u64,
}

impl RawKeyBlock {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
}

const PILOT_STREAM: u64 = 1;

/// Draws `n_pulses + n_pilots` pulses through `channel`, marking `n_pilots`
/// uniformly chosen pulses as pilots.
pub fn generate_pulses(
    channel: &LinearChannel,
    detector: Detector,
    n_pulses: usize,
    n_pilots: usize,
    seed: u64,
) -> PulseBlock {
    let n_total = n_pulses + n_pilots;

    let mut pilot_rng = ChaCha8Rng::seed_from_u64(seed);
    pilot_rng.set_stream(PILOT_STREAM);
    let mut pilot_pulses = index::sample(&mut pilot_rng, n_total, n_pilots).into_vec();
    pilot_pulses.sort_unstable();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sa = channel.v_a.sqrt();
    let sz = channel.sigma2.sqrt();
    let gauss = move |rng: &mut ChaCha8Rng| -> f64 { rng.sample(StandardNormal) };

    let mut alice_q = Vec::with_capacity(n_total);
    let mut alice_p = Vec::with_capacity(n_total);
    let mut bob = Vec::with_capacity(n_total * detector.samples_per_pulse());
    let mut labels = Vec::new();
    for _ in 0..n_total {
        let q = sa * gauss(&mut rng);
        let p = sa * gauss(&mut rng);
        alice_q.push(q);
        alice_p.push(p);
        match detector {
            Detector::Homodyne => {
                let label = if rng.random::<bool>() {
                    Quadrature::P
                } else {
                    Quadrature::Q
                };
                let sent = if label == Quadrature::Q { q } else { p };
                bob.push(channel.t * sent + sz * gauss(&mut rng));
                labels.push(label);
            }
            Detector::Heterodyne => {
                bob.push(channel.t * q + sz * gauss(&mut rng));
                bob.push(channel.t * p + sz * gauss(&mut rng));
            }
        }
    }
    PulseBlock {
        detector,
        alice_q,
        alice_p,
        bob,
        labels,
        pilot_pulses,
        seed,
    }
}

/// Base sifting: Alice keeps the quadrature Bob announced (homodyne) or both
/// quadratures (heterodyne); pilot pulses are split off.
pub fn sift(block: &PulseBlock) -> Result<RawKeyBlock> {
    let n = block.n_total();
    if block.alice_p.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: block.alice_p.len(),
        });
    }
    let per = block.detector.samples_per_pulse();
    if block.bob.len() != n * per {
        return Err(Error::LengthMismatch {
            expected: n * per,
            actual: block.bob.len(),
        });
    }
    if block.detector == Detector::Homodyne && block.labels.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: block.labels.len(),
        });
    }

    let n_pilots = block.pilot_pulses.len();
    let mut out = RawKeyBlock {
        x: Vec::with_capacity((n - n_pilots) * per),
        y: Vec::with_capacity((n - n_pilots) * per),
        pilots_x: Vec::with_capacity(n_pilots * per),
        pilots_y: Vec::with_capacity(n_pilots * per),
        pilot_pulses: block.pilot_pulses.clone(),
        detector: block.detector,
        seed: block.seed,
    };
    let mut pilots = block.pilot_pulses.iter().peekable();
    for i in 0..n {
        let is_pilot = pilots.next_if_eq(&&i).is_some();
        let (xs, ys) = if is_pilot {
            (&mut out.pilots_x, &mut out.pilots_y)
        } else {
            (&mut out.x, &mut out.y)
        };
        match block.detector {
            Detector::Homodyne => {
                let x = match block.labels[i] {
                    Quadrature::Q => block.alice_q[i],
                    Quadrature::P => block.alice_p[i],
                };
                xs.push(x);
                ys.push(block.bob[i]);
            }
            Detector::Heterodyne => {
                xs.push(block.alice_q[i]);
                xs.push(block.alice_p[i]);
                ys.push(block.bob[2 * i]);
                ys.push(block.bob[2 * i + 1]);
            }
        }
    }
    Ok(out)
}

/// Generates and sifts one block for the physical channel `params`.
pub fn generate_block(
    params: &ChannelParams,
    detector: Detector,
    n_pulses: usize,
    n_pilots: usize,
    seed: u64,
) -> Result<RawKeyBlock> {
    params.validate()?;
    if n_pulses == 0 {
        return Err(invalid("n_pulses", "must be at least 1"));
    }
    sift(&generate_pulses(
        &params.linear(detector),
        detector,
        n_pulses,
        n_pilots,
        seed,
    ))
}

/// Same as [`generate_block`] for an arbitrary linear model.
pub fn generate_linear_block(
    channel: &LinearChannel,
    detector: Detector,
    n_pulses: usize,
    n_pilots: usize,
    seed: u64,
) -> Result<RawKeyBlock> {
    sift(&generate_pulses(channel, detector, n_pulses, n_pilots, seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_link() -> ChannelParams {
        ChannelParams::new(4.0, 0.612, 0.1, 0.04, 0.15).unwrap()
    }

    #[test]
    fn zero_distance_is_lossless() {
        let p = ChannelParams::from_distance(0.0, 0.2, 0.612, 0.04, 0.15, 4.0).unwrap();
        assert_eq!(p.transmittance, 1.0);
    }

    #[test]
    fn fifty_km_at_point_two_db() {
        let p = ChannelParams::from_distance(50.0, 0.2, 0.612, 0.04, 0.15, 4.0).unwrap();
        assert!((p.transmittance - 0.1).abs() < 1e-15);
        assert!((p.t() - 0.0612f64.sqrt()).abs() < 1e-15);
        assert!((p.sigma2() - (1.0 + 0.0612 * 0.04 + 0.15)).abs() < 1e-15);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(ChannelParams::from_distance(-1.0, 0.2, 0.6, 0.0, 0.0, 4.0).is_err());
        assert!(ChannelParams::from_distance(1.0, f64::NAN, 0.6, 0.0, 0.0, 4.0).is_err());
        assert!(ChannelParams::new(4.0, 1.5, 0.5, 0.0, 0.0).is_err());
        assert!(ChannelParams::new(0.0, 0.5, 0.5, 0.0, 0.0).is_err());
        assert!(ChannelParams::new(4.0, 0.5, 0.5, -0.1, 0.0).is_err());
        assert!(ChannelParams::new(4.0, 0.5, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn noiseless_identity_channel() {
        let ch = LinearChannel::new(2.0, 1.0, 0.0).unwrap();
        let b = generate_linear_block(&ch, Detector::Homodyne, 1000, 10, 3).unwrap();
        assert_eq!(b.x, b.y);
        assert_eq!(b.pilots_x, b.pilots_y);
    }

    #[test]
    fn deterministic_per_seed() {
        let a = generate_block(&reference_link(), Detector::Homodyne, 500, 50, 11).unwrap();
        let b = generate_block(&reference_link(), Detector::Homodyne, 500, 50, 11).unwrap();
        let c = generate_block(&reference_link(), Detector::Homodyne, 500, 50, 12).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.x, c.x);
    }

    #[test]
    fn sifted_lengths() {
        let p = reference_link();
        let hom = generate_block(&p, Detector::Homodyne, 100, 7, 1).unwrap();
        assert_eq!(hom.len(), 100);
        assert_eq!(hom.pilots_x.len(), 7);
        let het = generate_block(&p, Detector::Heterodyne, 100, 7, 1).unwrap();
        assert_eq!(het.len(), 200);
        assert_eq!(het.pilots_y.len(), 14);
    }

    #[test]
    fn empty_pulse_block_sifts_to_empty() {
        let ch = reference_link().linear(Detector::Homodyne);
        let b = generate_linear_block(&ch, Detector::Homodyne, 0, 0, 1).unwrap();
        assert!(b.is_empty());
        assert!(generate_block(&reference_link(), Detector::Homodyne, 0, 0, 1).is_err());
    }

    #[test]
    fn sift_rejects_label_mismatch() {
        let ch = reference_link().linear(Detector::Homodyne);
        let mut pulses = generate_pulses(&ch, Detector::Homodyne, 10, 0, 1);
        pulses.labels.pop();
        assert!(matches!(sift(&pulses), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn pilots_disjoint_from_key_pulses() {
        let ch = reference_link().linear(Detector::Homodyne);
        let pulses = generate_pulses(&ch, Detector::Homodyne, 300, 40, 9);
        let sifted = sift(&pulses).unwrap();
        let key_pulses: Vec<usize> = (0..pulses.n_total())
            .filter(|i| sifted.pilot_pulses.binary_search(i).is_err())
            .collect();
        assert_eq!(key_pulses.len(), 300);
        for (k, &i) in key_pulses.iter().enumerate() {
            assert_eq!(sifted.y[k], pulses.bob[i]);
        }
        for (k, &i) in sifted.pilot_pulses.iter().enumerate() {
            assert_eq!(sifted.pilots_y[k], pulses.bob[i]);
        }
    }

    #[test]
    fn sample_moments_match_model() {
        let p = reference_link();
        let n = 1_000_000;
        let b = generate_block(&p, Detector::Homodyne, n, 0, 2024).unwrap();
        let (t, s2) = (p.t(), p.sigma2());
        let nf = n as f64;
        let vy: f64 = b.y.iter().map(|y| y * y).sum::<f64>() / nf;
        let expected = t * t * p.v_a + s2;
        assert!((vy - expected).abs() / expected < 0.01, "{vy} vs {expected}");

        let sxx: f64 = b.x.iter().map(|x| x * x).sum();
        let sxy: f64 = b.x.iter().zip(&b.y).map(|(x, y)| x * y).sum();
        let t_emp = sxy / sxx;
        let se_t = (s2 / sxx).sqrt();
        assert!((t_emp - t).abs() < 5.0 * se_t);

        let resid: f64 = b.x.iter().zip(&b.y).map(|(x, y)| (y - t * x).powi(2)).sum::<f64>() / nf;
        let se_s2 = s2 * (2.0 / nf).sqrt();
        assert!((resid - s2).abs() < 5.0 * se_s2);
    }
}
