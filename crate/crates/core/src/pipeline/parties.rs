//! Alice and Bob hold only their own measurement records; everything one
//! learns about the other's data arrives as a [`Message`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::wire::{ClassicalChannel, Message, Party};
use crate::ecc::{tag, BpDecoder, CodeRegistry, VerificationTag};
use crate::error::{Error, Result};
use crate::privacy::ToeplitzMatrix;
use crate::reconciliation::{alice_recover, alice_rotate, bob_map, llr_init, MappedFrame, DIM};

fn unexpected(who: &str, m: &Message) -> Error {
    Error::Wire(format!("{who} received unexpected message with tag {}", m.tag()))
}

/// Layout of the reconciled region of a block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout {
    pub offset: usize,
    pub code_len: usize,
    pub n_codewords: usize,
}

impl Layout {
    pub fn new(offset: usize, available: usize, code_len: usize) -> Self {
        Layout {
            offset,
            code_len,
            n_codewords: available / code_len,
        }
    }

    pub fn end(&self) -> usize {
        self.offset + self.n_codewords * self.code_len
    }

    /// Sample range of codeword `c`.
    pub fn range(&self, c: usize) -> std::ops::Range<usize> {
        let s = self.offset + c * self.code_len;
        s..s + self.code_len
    }
}

fn privacy_amplify(bits: &[u8], out_len: u64, seed: u64) -> Result<Vec<u8>> {
    ToeplitzMatrix::from_seed(seed, bits.len(), out_len as usize)?.hash(bits)
}

pub struct Bob {
    y: Vec<f64>,
    pilots_y: Vec<f64>,
    rng: ChaCha8Rng,
    reconciled: Option<(Layout, Vec<u8>)>,
    failed: Vec<u32>,
}

impl Bob {
    pub fn new(y: Vec<f64>, pilots_y: Vec<f64>, seed: u64) -> Self {
        Bob {
            y,
            pilots_y,
            rng: ChaCha8Rng::seed_from_u64(seed),
            reconciled: None,
            failed: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn announce(&self, ch: &mut ClassicalChannel, block: u64, share_pilots: bool) {
        ch.send(Party::Bob, &Message::BlockStart { block });
        if share_pilots && !self.pilots_y.is_empty() {
            ch.send(Party::Bob, &Message::PilotSamples { y: self.pilots_y.clone() });
        }
    }

    pub fn disclose(&self, ch: &mut ClassicalChannel, range: std::ops::Range<usize>) {
        if !range.is_empty() {
            ch.send(
                Party::Bob,
                &Message::DisclosedSamples {
                    start: range.start as u64,
                    values: self.y[range].to_vec(),
                },
            );
        }
    }

    /// Answers Alice's request: either the whole block, or mapping,
    /// syndromes and tags for the region starting at `offset`. Returns
    /// whether reconciliation took place.
    pub fn reconcile(&mut self, ch: &mut ClassicalChannel, registry: &CodeRegistry, offset: usize) -> Result<bool> {
        let index = match ch.recv(Party::Bob)? {
            Message::RequestDisclosure => {
                self.disclose(ch, 0..self.y.len());
                return Ok(false);
            }
            Message::CodeChoice { index } => index as usize,
            m => return Err(unexpected("Bob", &m)),
        };
        if index >= registry.specs().len() {
            return Err(Error::Wire(format!("code index {index} out of range")));
        }
        let (_, code) = registry.get(index);
        let layout = Layout::new(offset, self.y.len() - offset, code.n_cols());
        let mapping = bob_map(&self.y[layout.offset..layout.end()], &mut self.rng)?;
        ch.send(Party::Bob, &Message::Mappings { frames: mapping.frames });
        for c in 0..layout.n_codewords {
            let bits = &mapping.bits[c * layout.code_len..(c + 1) * layout.code_len];
            ch.send(Party::Bob, &Message::Syndrome { codeword: c as u32, bits: code.syndrome(bits)? });
            let t = tag(bits, self.rng.random());
            ch.send(Party::Bob, &Message::VerifyTag { codeword: c as u32, key: t.key, value: t.value });
        }
        self.reconciled = Some((layout, mapping.bits));
        Ok(true)
    }

    /// Learns which codewords failed; with `disclose_unkeyed` Bob reveals
    /// their samples and the ones no codeword covered.
    pub fn receive_verdict(&mut self, ch: &mut ClassicalChannel, disclose_unkeyed: bool) -> Result<()> {
        self.failed = match ch.recv(Party::Bob)? {
            Message::VerifyResult { failed } => failed,
            m => return Err(unexpected("Bob", &m)),
        };
        let layout = self.reconciled.as_ref().map(|r| r.0).ok_or_else(|| Error::Wire("verdict before reconciliation".into()))?;
        if disclose_unkeyed {
            for &c in &self.failed {
                self.disclose(ch, layout.range(c as usize));
            }
            self.disclose(ch, layout.end()..self.y.len());
        }
        Ok(())
    }

    /// Final key from the verified codewords, once Alice announces its
    /// length. Bob picks the hash.
    pub fn finish(&mut self, ch: &mut ClassicalChannel) -> Result<Vec<u8>> {
        let out_len = match ch.recv(Party::Bob)? {
            Message::KeyLength { bits } => bits,
            m => return Err(unexpected("Bob", &m)),
        };
        if out_len == 0 {
            return Ok(Vec::new());
        }
        let seed = self.rng.random();
        ch.send(Party::Bob, &Message::PaSeed { seed });
        let (layout, bits) = self.reconciled.as_ref().unwrap();
        let keyed = keyed_bits(bits, layout, &self.failed);
        privacy_amplify(&keyed, out_len, seed)
    }
}

/// Concatenated bits of the codewords not in `failed`.
fn keyed_bits(bits: &[u8], layout: &Layout, failed: &[u32]) -> Vec<u8> {
    let n = layout.code_len;
    (0..layout.n_codewords)
        .filter(|c| !failed.contains(&(*c as u32)))
        .flat_map(|c| bits[c * n..(c + 1) * n].iter().copied())
        .collect()
}

/// Alice's result of decoding one block.
#[derive(Debug, Clone)]
pub struct Decoded {
    pub layout: Layout,
    pub code_index: usize,
    pub bits: Vec<u8>,
    pub frames: Vec<MappedFrame>,
    pub failed: Vec<u32>,
}

impl Decoded {
    pub fn n_keyed(&self) -> usize {
        (self.layout.n_codewords - self.failed.len()) * self.layout.code_len
    }
}

pub struct Alice {
    x: Vec<f64>,
    pilots_x: Vec<f64>,
}

impl Alice {
    pub fn new(x: Vec<f64>, pilots_x: Vec<f64>) -> Self {
        Alice { x, pilots_x }
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn pilots_x(&self) -> &[f64] {
        &self.pilots_x
    }

    pub fn expect_start(&self, ch: &mut ClassicalChannel) -> Result<u64> {
        match ch.recv(Party::Alice)? {
            Message::BlockStart { block } => Ok(block),
            m => Err(unexpected("Alice", &m)),
        }
    }

    pub fn receive_pilots(&self, ch: &mut ClassicalChannel) -> Result<Vec<f64>> {
        match ch.recv(Party::Alice)? {
            Message::PilotSamples { y } if y.len() == self.pilots_x.len() => Ok(y),
            m => Err(unexpected("Alice", &m)),
        }
    }

    /// Receives Bob's samples `y[range]`.
    pub fn receive_disclosure(&self, ch: &mut ClassicalChannel, range: std::ops::Range<usize>) -> Result<Vec<f64>> {
        match ch.recv(Party::Alice)? {
            Message::DisclosedSamples { start, values }
                if start as usize == range.start && values.len() == range.len() =>
            {
                Ok(values)
            }
            m => Err(unexpected("Alice", &m)),
        }
    }

    pub fn request_disclosure(&self, ch: &mut ClassicalChannel) {
        ch.send(Party::Alice, &Message::RequestDisclosure);
    }

    pub fn choose_code(&self, ch: &mut ClassicalChannel, code_index: usize) {
        ch.send(Party::Alice, &Message::CodeChoice { index: code_index as u32 });
    }

    /// Decodes every codeword against Bob's syndromes and announces which
    /// ones failed verification.
    pub fn decode(
        &self,
        ch: &mut ClassicalChannel,
        registry: &CodeRegistry,
        code_index: usize,
        offset: usize,
        snr_est: f64,
        max_iters: usize,
    ) -> Result<Decoded> {
        let (_, code) = registry.get(code_index);
        let layout = Layout::new(offset, self.x.len() - offset, code.n_cols());
        let frames = match ch.recv(Party::Alice)? {
            Message::Mappings { frames } if frames.len() * DIM == layout.end() - layout.offset => frames,
            m => return Err(unexpected("Alice", &m)),
        };
        let v = alice_rotate(&self.x[layout.offset..layout.end()], &frames)?;
        let llr = llr_init(&v, snr_est)?;
        let mut decoder = BpDecoder::new(code);
        let mut bits = Vec::with_capacity(llr.len());
        let mut failed = Vec::new();
        for c in 0..layout.n_codewords {
            let syndrome = match ch.recv(Party::Alice)? {
                Message::Syndrome { codeword, bits } if codeword as usize == c => bits,
                m => return Err(unexpected("Alice", &m)),
            };
            let bob_tag = match ch.recv(Party::Alice)? {
                Message::VerifyTag { codeword, key, value } if codeword as usize == c => {
                    VerificationTag { key, value }
                }
                m => return Err(unexpected("Alice", &m)),
            };
            let r = decoder.decode(&llr[c * layout.code_len..(c + 1) * layout.code_len], &syndrome, max_iters)?;
            if !(r.converged && crate::ecc::verify(&r.bits, &bob_tag)) {
                failed.push(c as u32);
            }
            bits.extend(r.bits);
        }
        ch.send(Party::Alice, &Message::VerifyResult { failed: failed.clone() });
        Ok(Decoded {
            layout,
            code_index,
            bits,
            frames,
            failed,
        })
    }

    /// Alice's copy of Bob's full record: recovered from corrected bits where
    /// verification passed, Bob's disclosures elsewhere.
    pub fn reconstruct(&self, ch: &mut ClassicalChannel, dec: &Decoded, mut prefix: Vec<f64>) -> Result<Vec<f64>> {
        let n = self.x.len();
        let layout = dec.layout;
        prefix.resize(n, 0.0);
        let mut y = prefix;
        let recovered = alice_recover(&dec.bits, &dec.frames)?;
        for c in 0..layout.n_codewords {
            let r = layout.range(c);
            if !dec.failed.contains(&(c as u32)) {
                y[r.clone()].copy_from_slice(&recovered[r.start - layout.offset..r.end - layout.offset]);
            }
        }
        for &c in &dec.failed {
            let r = layout.range(c as usize);
            let got = self.receive_disclosure(ch, r.clone())?;
            y[r].copy_from_slice(&got);
        }
        if layout.end() < n {
            let got = self.receive_disclosure(ch, layout.end()..n)?;
            y[layout.end()..].copy_from_slice(&got);
        }
        Ok(y)
    }

    pub fn announce_key_length(&self, ch: &mut ClassicalChannel, out_len: u64) {
        ch.send(Party::Alice, &Message::KeyLength { bits: out_len });
    }

    pub fn finish(&self, ch: &mut ClassicalChannel, dec: Option<&Decoded>, out_len: u64) -> Result<Vec<u8>> {
        if out_len == 0 {
            return Ok(Vec::new());
        }
        let dec = dec.ok_or_else(|| Error::Wire("key length without reconciliation".into()))?;
        let seed = match ch.recv(Party::Alice)? {
            Message::PaSeed { seed } => seed,
            m => return Err(unexpected("Alice", &m)),
        };
        let keyed = keyed_bits(&dec.bits, &dec.layout, &dec.failed);
        privacy_amplify(&keyed, out_len, seed)
    }
}
