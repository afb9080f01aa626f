//! The simulated public channel.
//!
//! Every message is serialized to a record `[u32 len][u8 tag][payload]`
//! (little-endian, `len` counts tag and payload) and appended to an
//! append-only log, so each disclosure can be audited after the run.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reconciliation::MappedFrame;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Party {
    Alice,
    Bob,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Message {
    BlockStart { block: u64 },
    PilotSamples { y: Vec<f64> },
    /// Alice asks for the whole block (bootstrap or channel change).
    RequestDisclosure,
    CodeChoice { index: u32 },
    Mappings { frames: Vec<MappedFrame> },
    Syndrome { codeword: u32, bits: Vec<u8> },
    VerifyTag { codeword: u32, key: u64, value: u64 },
    VerifyResult { failed: Vec<u32> },
    /// Bob's samples `y[start .. start + values.len()]`.
    DisclosedSamples { start: u64, values: Vec<f64> },
    KeyLength { bits: u64 },
    PaSeed { seed: u64 },
}

impl Message {
    pub fn tag(&self) -> u8 {
        match self {
            Message::BlockStart { .. } => 1,
            Message::PilotSamples { .. } => 2,
            Message::RequestDisclosure => 3,
            Message::CodeChoice { .. } => 4,
            Message::Mappings { .. } => 5,
            Message::Syndrome { .. } => 6,
            Message::VerifyTag { .. } => 7,
            Message::VerifyResult { .. } => 8,
            Message::DisclosedSamples { .. } => 9,
            Message::KeyLength { .. } => 10,
            Message::PaSeed { .. } => 11,
        }
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut p = Vec::new();
        let f64s = |p: &mut Vec<u8>, vs: &[f64]| {
            p.extend((vs.len() as u32).to_le_bytes());
            for v in vs {
                p.extend(v.to_le_bytes());
            }
        };
        match self {
            Message::BlockStart { block } => p.extend(block.to_le_bytes()),
            Message::PilotSamples { y } => f64s(&mut p, y),
            Message::RequestDisclosure => {}
            Message::CodeChoice { index } => p.extend(index.to_le_bytes()),
            Message::Mappings { frames } => {
                p.extend((frames.len() as u32).to_le_bytes());
                for f in frames {
                    for a in f.alpha {
                        p.extend(a.to_le_bytes());
                    }
                    p.extend(f.norm_y.to_le_bytes());
                }
            }
            Message::Syndrome { codeword, bits } => {
                p.extend(codeword.to_le_bytes());
                p.extend((bits.len() as u32).to_le_bytes());
                let mut packed = vec![0u8; bits.len().div_ceil(8)];
                for (k, &b) in bits.iter().enumerate() {
                    packed[k / 8] |= (b & 1) << (k % 8);
                }
                p.extend(packed);
            }
            Message::VerifyTag { codeword, key, value } => {
                p.extend(codeword.to_le_bytes());
                p.extend(key.to_le_bytes());
                p.extend(value.to_le_bytes());
            }
            Message::VerifyResult { failed } => {
                p.extend((failed.len() as u32).to_le_bytes());
                for f in failed {
                    p.extend(f.to_le_bytes());
                }
            }
            Message::DisclosedSamples { start, values } => {
                p.extend(start.to_le_bytes());
                f64s(&mut p, values);
            }
            Message::KeyLength { bits } => p.extend(bits.to_le_bytes()),
            Message::PaSeed { seed } => p.extend(seed.to_le_bytes()),
        }
        let mut rec = Vec::with_capacity(p.len() + 5);
        rec.extend(((p.len() + 1) as u32).to_le_bytes());
        rec.push(self.tag());
        rec.extend(p);
        rec
    }

    pub fn decode(record: &[u8]) -> Result<Message> {
        let mut r = Reader { buf: record, pos: 0 };
        let len = r.u32()? as usize;
        if len + 4 != record.len() {
            return Err(Error::Wire(format!(
                "record declares {len} bytes but carries {}",
                record.len().saturating_sub(4)
            )));
        }
        let tag = r.take(1)?[0];
        let msg = match tag {
            1 => Message::BlockStart { block: r.u64()? },
            2 => Message::PilotSamples { y: r.f64s()? },
            3 => Message::RequestDisclosure,
            4 => Message::CodeChoice { index: r.u32()? },
            5 => {
                let n = r.u32()? as usize;
                let mut frames = Vec::with_capacity(n.min(1 << 20));
                for _ in 0..n {
                    let mut alpha = [0.0; 8];
                    for a in &mut alpha {
                        *a = r.f64()?;
                    }
                    frames.push(MappedFrame { alpha, norm_y: r.f64()? });
                }
                Message::Mappings { frames }
            }
            6 => {
                let codeword = r.u32()?;
                let n = r.u32()? as usize;
                let packed = r.take(n.div_ceil(8))?;
                let bits = (0..n).map(|k| (packed[k / 8] >> (k % 8)) & 1).collect();
                Message::Syndrome { codeword, bits }
            }
            7 => Message::VerifyTag {
                codeword: r.u32()?,
                key: r.u64()?,
                value: r.u64()?,
            },
            8 => {
                let n = r.u32()? as usize;
                let failed = (0..n).map(|_| r.u32()).collect::<Result<_>>()?;
                Message::VerifyResult { failed }
            }
            9 => Message::DisclosedSamples {
                start: r.u64()?,
                values: r.f64s()?,
            },
            10 => Message::KeyLength { bits: r.u64()? },
            11 => Message::PaSeed { seed: r.u64()? },
            t => return Err(Error::Wire(format!("unknown tag {t}"))),
        };
        if r.pos != record.len() {
            return Err(Error::Wire(format!("{} trailing bytes", record.len() - r.pos)));
        }
        Ok(msg)
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or_else(|| Error::Wire("record truncated".into()))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn f64s(&mut self) -> Result<Vec<f64>> {
        let n = self.u32()? as usize;
        if n.saturating_mul(8) > self.buf.len() - self.pos {
            return Err(Error::Wire("record truncated".into()));
        }
        (0..n).map(|_| self.f64()).collect()
    }
}

/// What the public channel revealed, by category.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Leakage {
    pub syndrome_bits: u64,
    pub tag_bits: u64,
    /// Real numbers in the mapping metadata (eight coefficients and a norm
    /// per frame).
    pub mapping_values: u64,
    pub pilot_samples: u64,
    pub disclosed_samples: u64,
    pub records: u64,
    pub bytes: u64,
}

impl Leakage {
    fn count(&mut self, msg: &Message, bytes: usize) {
        self.records += 1;
        self.bytes += bytes as u64;
        match msg {
            Message::Syndrome { bits, .. } => self.syndrome_bits += bits.len() as u64,
            Message::VerifyTag { .. } => self.tag_bits += crate::ecc::TAG_BITS as u64,
            Message::Mappings { frames } => self.mapping_values += 9 * frames.len() as u64,
            Message::PilotSamples { y } => self.pilot_samples += y.len() as u64,
            Message::DisclosedSamples { values, .. } => self.disclosed_samples += values.len() as u64,
            _ => {}
        }
    }
}

/// In-process authenticated public channel between the two parties.
#[derive(Debug, Default, Clone)]
pub struct ClassicalChannel {
    log: Vec<(Party, Vec<u8>)>,
    cursor_alice: usize,
    cursor_bob: usize,
    leakage: Leakage,
}

impl ClassicalChannel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn send(&mut self, from: Party, msg: &Message) {
        let rec = msg.encode();
        self.leakage.count(msg, rec.len());
        self.log.push((from, rec));
    }

    /// Next message addressed to `to`, i.e. sent by the other party.
    pub fn recv(&mut self, to: Party) -> Result<Message> {
        let cursor = match to {
            Party::Alice => &mut self.cursor_alice,
            Party::Bob => &mut self.cursor_bob,
        };
        while *cursor < self.log.len() {
            let (from, rec) = &self.log[*cursor];
            *cursor += 1;
            if *from != to {
                return Message::decode(rec);
            }
        }
        Err(Error::Wire(format!("{to:?} expected a message, channel is empty")))
    }

    /// Drops every undelivered message, e.g. after a protocol error.
    pub fn resync(&mut self) {
        self.cursor_alice = self.log.len();
        self.cursor_bob = self.log.len();
    }

    /// Leakage since the last call.
    pub fn take_leakage(&mut self) -> Leakage {
        std::mem::take(&mut self.leakage)
    }

    pub fn raw_records(&self) -> impl Iterator<Item = (Party, &[u8])> {
        self.log.iter().map(|(p, r)| (*p, r.as_slice()))
    }

    /// Decodes the whole log.
    pub fn transcript(&self) -> Result<Vec<(Party, Message)>> {
        self.log
            .iter()
            .map(|(p, r)| Message::decode(r).map(|m| (*p, m)))
            .collect()
    }
}
