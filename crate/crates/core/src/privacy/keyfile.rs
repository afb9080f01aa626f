use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"CVQKDKY1";

/// Final key of one block; on disk the header is `magic, out_len, block_id,
/// seed` as little-endian u64 followed by the bits packed LSB-first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinalKey {
    pub block_id: u64,
    pub seed: u64,
    pub bits: Vec<u8>,
}

pub fn write_key_file(path: &Path, key: &FinalKey) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    for v in [key.bits.len() as u64, key.block_id, key.seed] {
        w.write_all(&v.to_le_bytes())?;
    }
    let mut bytes = vec![0u8; key.bits.len().div_ceil(8)];
    for (k, &b) in key.bits.iter().enumerate() {
        bytes[k / 8] |= (b & 1) << (k % 8);
    }
    w.write_all(&bytes)?;
    w.flush()?;
    Ok(())
}

pub fn read_key_file(path: &Path) -> Result<FinalKey> {
    let fail = |reason: &str| Error::Format {
        path: path.to_path_buf(),
        reason: reason.to_string(),
    };
    let mut data = Vec::new();
    BufReader::new(File::open(path)?).read_to_end(&mut data)?;
    if data.len() < 32 || &data[..8] != MAGIC {
        return Err(fail("not a key file"));
    }
    let word = |k: usize| u64::from_le_bytes(data[8 + 8 * k..16 + 8 * k].try_into().unwrap());
    let (out_len, block_id, seed) = (word(0) as usize, word(1), word(2));
    let body = &data[32..];
    if body.len() != out_len.div_ceil(8) {
        return Err(fail("payload length does not match header"));
    }
    let bits = (0..out_len).map(|k| (body[k / 8] >> (k % 8)) & 1).collect();
    Ok(FinalKey { block_id, seed, bits })
}
