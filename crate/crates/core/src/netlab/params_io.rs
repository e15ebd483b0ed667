//! Parameter files.
//!
//! ```text
//! magic  b"SSNP"
//! u32    format version (1)
//! u8     byte order of what follows: 1 = little-endian
//! u32    number of widths L+1, then L+1 u32 widths
//! f64    per layer: weights ([out][in] row-major), then biases
//! ```

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

use super::mlp::{DenseNetSpec, Params};

pub const MAGIC: &[u8; 4] = b"SSNP";
pub const VERSION: u32 = 1;
const LITTLE_ENDIAN: u8 = 1;

pub fn encode_params(p: &Params) -> Vec<u8> {
    let spec = p.spec();
    let mut out = Vec::with_capacity(16 + 4 * spec.layer_widths.len() + 8 * p.n_params());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.push(LITTLE_ENDIAN);
    out.extend_from_slice(&(spec.layer_widths.len() as u32).to_le_bytes());
    for &w in &spec.layer_widths {
        out.extend_from_slice(&(w as u32).to_le_bytes());
    }
    for l in &p.layers {
        for v in l.weights.iter().chain(&l.biases) {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8]> {
        let s = self
            .bytes
            .get(self.pos..self.pos + n)
            .ok_or_else(|| Error::parse(format!("offset {}", self.pos), "truncated parameter file"))?;
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        let b = self.take(4)?;
        Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    }
}

pub fn decode_params(bytes: &[u8]) -> Result<Params> {
    let mut c = Cursor { bytes, pos: 0 };
    if c.take(4)? != MAGIC {
        return Err(Error::parse("offset 0", "not a parameter file"));
    }
    let version = c.u32()?;
    if version != VERSION {
        return Err(Error::parse("offset 4", format!("unsupported version {version}")));
    }
    if c.take(1)?[0] != LITTLE_ENDIAN {
        return Err(Error::parse("offset 8", "unsupported byte order"));
    }
    let n = c.u32()? as usize;
    if n > 64 {
        return Err(Error::parse("offset 9", format!("implausible layer count {n}")));
    }
    let widths = (0..n).map(|_| c.u32().map(|w| w as usize)).collect::<Result<Vec<_>>>()?;
    let spec = DenseNetSpec::new(widths).map_err(|e| Error::parse("offset 13", e.to_string()))?;
    let mut p = Params::zeros_like(&spec);
    for l in &mut p.layers {
        for v in l.weights.iter_mut().chain(l.biases.iter_mut()) {
            let b = c.take(8)?;
            *v = f64::from_le_bytes(b.try_into().expect("8 bytes"));
        }
    }
    if c.pos != bytes.len() {
        return Err(Error::parse(format!("offset {}", c.pos), "trailing bytes"));
    }
    Ok(p)
}

pub fn save_params(path: &Path, p: &Params) -> Result<()> {
    fs::write(path, encode_params(p))?;
    Ok(())
}

pub fn load_params(path: &Path) -> Result<Params> {
    decode_params(&fs::read(path)?)
}
