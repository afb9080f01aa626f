//! Raw block files written by `cvqkd simulate`.
//!
//! Layout (little endian), repeated once per block:
//!
//! ```text
//! magic    8 bytes  "CVQKDRB1"
//! detector u8       0 = homodyne, 1 = heterodyne
//! seed     u64
//! n_key    u64      length of x and y
//! n_pilot  u64      length of pilots_x and pilots_y
//! n_ppulse u64      number of pilot pulse indices
//! x, y, pilots_x, pilots_y   f64 arrays
//! pilot pulse indices        u64 array
//! ```

use std::io::{Read, Write};
use std::path::Path;

use super::{Detector, RawKeyBlock};
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"CVQKDRB1";

fn put_u64(w: &mut impl Write, v: u64) -> std::io::Result<()> {
    w.write_all(&v.to_le_bytes())
}

fn put_f64s(w: &mut impl Write, vs: &[f64]) -> std::io::Result<()> {
    for v in vs {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn write_blocks(path: &Path, blocks: &[RawKeyBlock]) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    for b in blocks {
        w.write_all(MAGIC)?;
        w.write_all(&[match b.detector {
            Detector::Homodyne => 0,
            Detector::Heterodyne => 1,
        }])?;
        put_u64(&mut w, b.seed)?;
        put_u64(&mut w, b.x.len() as u64)?;
        put_u64(&mut w, b.pilots_x.len() as u64)?;
        put_u64(&mut w, b.pilot_pulses.len() as u64)?;
        put_f64s(&mut w, &b.x)?;
        put_f64s(&mut w, &b.y)?;
        put_f64s(&mut w, &b.pilots_x)?;
        put_f64s(&mut w, &b.pilots_y)?;
        for &i in &b.pilot_pulses {
            put_u64(&mut w, i as u64)?;
        }
    }
    w.flush()?;
    Ok(())
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
    path: &'a Path,
}

impl Cursor<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8]> {
        if self.buf.len() - self.pos < n {
            return Err(Error::Format {
                path: self.path.to_path_buf(),
                reason: format!("truncated at byte {}", self.pos),
            });
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64s(&mut self, n: usize) -> Result<Vec<f64>> {
        let raw = self.take(n.checked_mul(8).ok_or_else(|| self.bad("length overflow"))?)?;
        Ok(raw
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }

    fn bad(&self, reason: &str) -> Error {
        Error::Format {
            path: self.path.to_path_buf(),
            reason: format!("{reason} at byte {}", self.pos),
        }
    }
}

pub fn read_blocks(path: &Path) -> Result<Vec<RawKeyBlock>> {
    let mut buf = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut buf)?;
    let mut c = Cursor { buf: &buf, pos: 0, path };
    let mut out = Vec::new();
    while c.pos < buf.len() {
        if c.take(8)? != MAGIC {
            return Err(c.bad("bad magic"));
        }
        let detector = match c.take(1)?[0] {
            0 => Detector::Homodyne,
            1 => Detector::Heterodyne,
            _ => return Err(c.bad("unknown detector")),
        };
        let seed = c.u64()?;
        let n_key = c.u64()? as usize;
        let n_pilot = c.u64()? as usize;
        let n_pp = c.u64()? as usize;
        let x = c.f64s(n_key)?;
        let y = c.f64s(n_key)?;
        let pilots_x = c.f64s(n_pilot)?;
        let pilots_y = c.f64s(n_pilot)?;
        let mut pilot_pulses = Vec::with_capacity(n_pp);
        for _ in 0..n_pp {
            pilot_pulses.push(c.u64()? as usize);
        }
        out.push(RawKeyBlock {
            x,
            y,
            pilots_x,
            pilots_y,
            pilot_pulses,
            detector,
            seed,
        });
    }
    Ok(out)
}
