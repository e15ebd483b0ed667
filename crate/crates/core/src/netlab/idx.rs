//! IDX files (the MNIST distribution format): big-endian magic and
//! dimensions, then unsigned bytes.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

use super::data::{Dataset, N_CLASSES};

pub const IMAGES_MAGIC: u32 = 0x0000_0803;
pub const LABELS_MAGIC: u32 = 0x0000_0801;

fn be_u32(bytes: &[u8], offset: usize, what: &str) -> Result<u32> {
    bytes
        .get(offset..offset + 4)
        .map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
        .ok_or_else(|| Error::parse(format!("offset {offset}"), format!("truncated {what}")))
}

/// `(dims, payload)` after checking the magic number and payload length.
fn parse(bytes: &[u8], magic: u32) -> Result<(Vec<usize>, &[u8])> {
    let found = be_u32(bytes, 0, "magic number")?;
    if found != magic {
        return Err(Error::parse("offset 0", format!("bad magic 0x{found:08x}, expected 0x{magic:08x}")));
    }
    let ndim = (magic & 0xff) as usize;
    let dims =
        (0..ndim).map(|i| be_u32(bytes, 4 + 4 * i, "dimension").map(|d| d as usize)).collect::<Result<Vec<_>>>()?;
    let start = 4 + 4 * ndim;
    let len: usize = dims.iter().product();
    let payload = bytes.get(start..start + len).ok_or_else(|| {
        Error::parse(
            format!("offset {}", bytes.len()),
            format!("truncated payload: expected {len} bytes from offset {start}"),
        )
    })?;
    Ok((dims, payload))
}

pub fn parse_idx(images: &[u8], labels: &[u8]) -> Result<Dataset> {
    let (idims, pixels) = parse(images, IMAGES_MAGIC)?;
    let (ldims, label_bytes) = parse(labels, LABELS_MAGIC)?;
    if idims[0] != ldims[0] {
        return Err(Error::Shape(format!("{} images but {} labels", idims[0], ldims[0])));
    }
    let dim = idims[1] * idims[2];
    if let Some((i, &l)) = label_bytes.iter().enumerate().find(|(_, &l)| l as usize >= N_CLASSES) {
        return Err(Error::parse(format!("offset {}", 8 + i), format!("label {l} outside 0..{N_CLASSES}")));
    }
    let inputs = pixels.iter().map(|&p| p as f64 / 255.0).collect();
    Dataset::new(inputs, label_bytes.iter().map(|&l| l as usize).collect(), dim, "idx", "train")
}

pub fn load_idx(images_path: &Path, labels_path: &Path) -> Result<Dataset> {
    parse_idx(&fs::read(images_path)?, &fs::read(labels_path)?)
}

/// Inverse of [`parse_idx`] for `rows x cols` images; inputs are rounded
/// back to bytes.
pub fn encode_idx(d: &Dataset, rows: usize, cols: usize) -> Result<(Vec<u8>, Vec<u8>)> {
    if rows * cols != d.dim() {
        return Err(Error::Shape(format!("{rows}x{cols} images do not hold {} inputs", d.dim())));
    }
    let n = d.len() as u32;
    let mut images = Vec::with_capacity(16 + d.inputs().len());
    images.extend_from_slice(&IMAGES_MAGIC.to_be_bytes());
    for v in [n, rows as u32, cols as u32] {
        images.extend_from_slice(&v.to_be_bytes());
    }
    images.extend(d.inputs().iter().map(|v| (v * 255.0).round() as u8));
    let mut labels = Vec::with_capacity(8 + d.len());
    labels.extend_from_slice(&LABELS_MAGIC.to_be_bytes());
    labels.extend_from_slice(&n.to_be_bytes());
    labels.extend(d.labels().iter().map(|&l| l as u8));
    Ok((images, labels))
}

pub fn write_idx(d: &Dataset, rows: usize, cols: usize, images_path: &Path, labels_path: &Path) -> Result<()> {
    let (images, labels) = encode_idx(d, rows, cols)?;
    fs::write(images_path, images)?;
    fs::write(labels_path, labels)?;
    Ok(())
}
