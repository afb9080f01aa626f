use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::{Method, RunConfig};
use super::parties::{Alice, Bob, Decoded};
use super::wire::{ClassicalChannel, Leakage};
use crate::channel::{generate_block, Detector, RawKeyBlock};
use crate::ecc::{realized_beta, CodeRegistry};
use crate::error::{Error, Result};
use crate::estimation::{coarse_estimate, mutation_check, ChannelEstimate, CoarseEstimate, CoarseSource, Stability};
use crate::keyrate::{key_rate_legacy, key_rate_proposed, Detection, RateBreakdown};
use crate::privacy::final_length;

pub(crate) const STREAM_CHANNEL: u64 = 0;
pub(crate) const STREAM_BOB: u64 = 1;
pub(crate) const STREAM_REPORT: u64 = 2;

/// Per-block, per-purpose seed derived from the master seed.
pub fn derive_seed(master: u64, block: u64, purpose: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream((block << 4) | purpose);
    rng.next_u64()
}

/// The sifted samples of `block` (1-based) exactly as a run sees them.
pub fn block_data(cfg: &RunConfig, block: u64) -> Result<RawKeyBlock> {
    let params = cfg.block_channel(block)?;
    generate_block(
        &params,
        cfg.channel.detector,
        cfg.channel.n_pulses,
        cfg.channel.n_pilots,
        derive_seed(cfg.channel.seed, block, STREAM_CHANNEL),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockReport {
    pub block_id: u64,
    pub method: Method,
    #[serde(rename = "N")]
    pub n_samples: u64,
    pub snr_true: f64,
    /// Codewords attempted and failed.
    pub frames_total: u64,
    pub frames_failed: u64,
    pub code_id: Option<String>,
    pub realized_beta: Option<f64>,
    pub coarse: Option<CoarseEstimate>,
    pub estimate: Option<ChannelEstimate>,
    pub rate: Option<RateBreakdown>,
    pub n_keyed: u64,
    pub final_key_len: u64,
    pub verified: bool,
    pub bootstrap: bool,
    pub mutated: bool,
    pub leakage: Leakage,
    pub error: Option<String>,
}

impl BlockReport {
    fn empty(block_id: u64, method: Method, n: usize, snr_true: f64) -> Self {
        BlockReport {
            block_id,
            method,
            n_samples: n as u64,
            snr_true,
            frames_total: 0,
            frames_failed: 0,
            code_id: None,
            realized_beta: None,
            coarse: None,
            estimate: None,
            rate: None,
            n_keyed: 0,
            final_key_len: 0,
            verified: false,
            bootstrap: false,
            mutated: false,
            leakage: Leakage::default(),
            error: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BlockOutcome {
    pub report: BlockReport,
    pub alice_key: Vec<u8>,
    pub bob_key: Vec<u8>,
    /// Alice's reconstruction of Bob's record when the block was reconciled
    /// under the proposed ordering.
    pub alice_view_of_y: Option<Vec<f64>>,
}

/// Runs blocks in order, carrying the channel estimate from one block to
/// the next.
pub struct Session {
    cfg: RunConfig,
    method: Method,
    registry: CodeRegistry,
    channel: ClassicalChannel,
    previous: Option<ChannelEstimate>,
}

impl Session {
    pub fn new(cfg: RunConfig, method: Method) -> Result<Self> {
        if cfg.channel.detector != Detector::Homodyne {
            return Err(Error::Config("key rates are implemented for homodyne detection only".into()));
        }
        let registry = cfg.registry()?;
        Ok(Session {
            cfg,
            method,
            registry,
            channel: ClassicalChannel::new(),
            previous: None,
        })
    }

    pub fn channel(&self) -> &ClassicalChannel {
        &self.channel
    }

    pub fn previous_estimate(&self) -> Option<&ChannelEstimate> {
        self.previous.as_ref()
    }

    /// Runs one block; failures are recorded in the report and the session
    /// stays usable.
    pub fn run_block(&mut self, block: u64) -> BlockOutcome {
        let params = self.cfg.block_channel(block);
        let snr_true = params.map_or(f64::NAN, |p| p.snr());
        let result = self.cfg.block_channel(block).and_then(|_| block_data(&self.cfg, block)).and_then(|raw| {
            let mut report = BlockReport::empty(block, self.method, raw.len(), snr_true);
            let alice = Alice::new(raw.x, raw.pilots_x);
            let bob = Bob::new(raw.y, raw.pilots_y, derive_seed(self.cfg.channel.seed, block, STREAM_BOB));
            let out = match self.method {
                Method::Proposed => self.proposed_block(&mut report, alice, bob),
                Method::Legacy => self.legacy_block(&mut report, alice, bob),
            };
            out.map(|(alice_key, bob_key, view)| BlockOutcome {
                report,
                alice_key,
                bob_key,
                alice_view_of_y: view,
            })
        });
        let leakage = self.channel.take_leakage();
        match result {
            Ok(mut o) => {
                o.report.leakage = leakage;
                o
            }
            Err(e) => {
                self.channel.resync();
                let mut report = BlockReport::empty(block, self.method, self.cfg.channel.n_pulses, snr_true);
                report.leakage = leakage;
                report.error = Some(e.to_string());
                BlockOutcome {
                    report,
                    alice_key: Vec::new(),
                    bob_key: Vec::new(),
                    alice_view_of_y: None,
                }
            }
        }
    }

    #[allow(clippy::type_complexity)]
    fn proposed_block(
        &mut self,
        report: &mut BlockReport,
        alice: Alice,
        mut bob: Bob,
    ) -> Result<(Vec<u8>, Vec<u8>, Option<Vec<f64>>)> {
        let Session { cfg, registry, channel: ch, previous, .. } = self;
        let v_a = cfg.channel.v_a;
        let n = alice.x().len();
        let share_pilots = cfg.coarse_source == CoarseSource::Pilots;

        bob.announce(ch, report.block_id, share_pilots);
        alice.expect_start(ch)?;
        let pilots_y = if share_pilots && !alice.pilots_x().is_empty() {
            Some(alice.receive_pilots(ch)?)
        } else {
            None
        };
        let pilots = pilots_y.as_deref().map(|y| (alice.pilots_x(), y));

        let bootstrap = previous.is_none();
        let coarse = if bootstrap {
            None
        } else {
            Some(coarse_estimate(pilots, v_a, previous.as_ref(), cfg.coarse_source)?)
        };
        report.coarse = coarse;
        let mutated_early = match (&coarse, &*previous) {
            (Some(c), Some(p)) if c.source == CoarseSource::Pilots => {
                mutation_check(p.snr_hat, c.snr_est, cfg.mutation_threshold_rel) == Stability::Mutated
            }
            _ => false,
        };

        if bootstrap || mutated_early {
            report.bootstrap = bootstrap;
            report.mutated = mutated_early;
            alice.request_disclosure(ch);
            bob.reconcile(ch, registry, 0)?;
            let y = alice.receive_disclosure(ch, 0..n)?;
            let est = ChannelEstimate::from_samples(alice.x(), &y, v_a, cfg.security.eps_pe)?;
            report.estimate = Some(est);
            *previous = Some(est);
            return Ok((Vec::new(), Vec::new(), None));
        }

        let snr_est = coarse.unwrap().snr_est;
        let index = select(registry, snr_est, report);
        alice.choose_code(ch, index);
        bob.reconcile(ch, registry, 0)?;
        let dec = alice.decode(ch, registry, index, 0, snr_est, cfg.max_iters)?;
        bob.receive_verdict(ch, true)?;
        let y_hat = alice.reconstruct(ch, &dec, Vec::new())?;

        let est = ChannelEstimate::from_samples(alice.x(), &y_hat, v_a, cfg.security.eps_pe)?;
        let prev = previous.replace(est).unwrap();
        report.estimate = Some(est);
        report.frames_total = dec.layout.n_codewords as u64;
        report.frames_failed = dec.failed.len() as u64;
        report.n_keyed = dec.n_keyed() as u64;
        let rate_code = registry.get(index).1.rate();
        let beta = realized_beta(rate_code, est.snr_hat).min(1.0);
        report.realized_beta = Some(beta);
        report.mutated = mutation_check(prev.snr_hat, est.snr_hat, cfg.mutation_threshold_rel) == Stability::Mutated;

        let mut key_len = 0;
        if report.n_keyed > 0 && !report.mutated {
            let rate = key_rate_proposed(report.n_keyed, &est, &detection(cfg)?, beta, &cfg.security)?;
            key_len = final_length(rate.rate_raw, report.n_keyed);
            report.rate = Some(rate);
            report.verified = true;
        }
        report.final_key_len = key_len;
        let (a, b) = finish_key(ch, &alice, &mut bob, &dec, key_len)?;
        Ok((a, b, Some(y_hat)))
    }

    #[allow(clippy::type_complexity)]
    fn legacy_block(
        &mut self,
        report: &mut BlockReport,
        alice: Alice,
        mut bob: Bob,
    ) -> Result<(Vec<u8>, Vec<u8>, Option<Vec<f64>>)> {
        let Session { cfg, registry, channel: ch, previous, .. } = self;
        let n = alice.x().len();
        let m = n / 2;

        bob.announce(ch, report.block_id, false);
        alice.expect_start(ch)?;
        bob.disclose(ch, 0..m);
        let disclosed = alice.receive_disclosure(ch, 0..m)?;
        let est = ChannelEstimate::from_samples(&alice.x()[..m], &disclosed, cfg.channel.v_a, cfg.security.eps_pe)?;
        report.estimate = Some(est);
        *previous = Some(est);

        let index = select(registry, est.snr_hat, report);
        alice.choose_code(ch, index);
        bob.reconcile(ch, registry, m)?;
        let dec = alice.decode(ch, registry, index, m, est.snr_hat, cfg.max_iters)?;
        bob.receive_verdict(ch, false)?;
        report.frames_total = dec.layout.n_codewords as u64;
        report.frames_failed = dec.failed.len() as u64;
        report.n_keyed = dec.n_keyed() as u64;
        let beta = realized_beta(registry.get(index).1.rate(), est.snr_hat).min(1.0);
        report.realized_beta = Some(beta);

        let mut key_len = 0;
        if report.n_keyed > 0 {
            let rate = key_rate_legacy(n as u64, m as u64, &est, &detection(cfg)?, beta, &cfg.security)?;
            key_len = final_length(rate.rate_raw / rate.key_fraction(), report.n_keyed);
            report.rate = Some(rate);
            report.verified = true;
        }
        report.final_key_len = key_len;
        let (a, b) = finish_key(ch, &alice, &mut bob, &dec, key_len)?;
        Ok((a, b, None))
    }
}

fn detection(cfg: &RunConfig) -> Result<Detection> {
    Ok(Detection::of(&cfg.channel.params()?, cfg.detector_model))
}

fn select(registry: &CodeRegistry, snr: f64, report: &mut BlockReport) -> usize {
    let sel = registry.select(snr);
    report.code_id = Some(sel.spec.id.clone());
    sel.index
}

fn finish_key(
    ch: &mut ClassicalChannel,
    alice: &Alice,
    bob: &mut Bob,
    dec: &Decoded,
    key_len: u64,
) -> Result<(Vec<u8>, Vec<u8>)> {
    alice.announce_key_length(ch, key_len);
    let bob_key = bob.finish(ch)?;
    let alice_key = alice.finish(ch, Some(dec), key_len)?;
    Ok((alice_key, bob_key))
}

/// Full run: every block's outcome and the public transcript.
pub struct Run {
    pub outcomes: Vec<BlockOutcome>,
    pub channel: ClassicalChannel,
}

pub fn run(cfg: &RunConfig, method: Method) -> Result<Run> {
    let mut session = Session::new(cfg.clone(), method)?;
    let outcomes = (1..=cfg.n_blocks).map(|b| session.run_block(b)).collect();
    Ok(Run {
        outcomes,
        channel: session.channel,
    })
}

pub fn run_legacy(cfg: &RunConfig) -> Result<Vec<BlockReport>> {
    Ok(run(cfg, Method::Legacy)?.outcomes.into_iter().map(|o| o.report).collect())
}

pub fn run_proposed(cfg: &RunConfig) -> Result<Vec<BlockReport>> {
    Ok(run(cfg, Method::Proposed)?.outcomes.into_iter().map(|o| o.report).collect())
}
