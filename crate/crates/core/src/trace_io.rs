//! Trace and spike-matrix CSV files.
//!
//! ```text
//! # spikescope-trace v1; dataset=<s>; split=<s>; condition=<s>; layer=<s>; threshold=<r>
//! 0.25,0,1.5
//! ...
//! ```
//!
//! One row per sample, one column per node. Spike files use the same layout
//! with `0`/`1` entries. Metadata lives only in the header line.

use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::spikes::{ActivationTrace, SpikeMatrix, TraceMeta};

pub const HEADER_TAG: &str = "# spikescope-trace v1";

pub fn format_header(meta: &TraceMeta) -> String {
    format!(
        "{HEADER_TAG}; dataset={}; split={}; condition={}; layer={}; threshold={}",
        meta.dataset, meta.split, meta.condition, meta.layer, meta.threshold
    )
}

pub fn parse_header(line: &str) -> Result<TraceMeta> {
    let mut parts = line.trim_end().split(';').map(str::trim);
    if parts.next() != Some(HEADER_TAG) {
        return Err(Error::parse("line 1", format!("expected header starting with `{HEADER_TAG}`")));
    }
    let mut fields = [None, None, None, None, None];
    const KEYS: [&str; 5] = ["dataset", "split", "condition", "layer", "threshold"];
    for part in parts.filter(|p| !p.is_empty()) {
        let (key, value) =
            part.split_once('=').ok_or_else(|| Error::parse("line 1", format!("malformed header field `{part}`")))?;
        let slot = KEYS
            .iter()
            .position(|k| *k == key.trim())
            .ok_or_else(|| Error::parse("line 1", format!("unknown header key `{key}`")))?;
        fields[slot] = Some(value.trim().to_string());
    }
    let mut take =
        |i: usize| fields[i].take().ok_or_else(|| Error::parse("line 1", format!("header is missing `{}`", KEYS[i])));
    let dataset = take(0)?;
    let split = take(1)?;
    let condition = take(2)?;
    let layer = take(3)?;
    let threshold_raw = take(4)?;
    let threshold =
        threshold_raw.parse::<f64>().map_err(|_| Error::parse("line 1", format!("bad threshold `{threshold_raw}`")))?;
    Ok(TraceMeta { dataset, split, condition, layer, threshold })
}

fn read_rows<R: Read>(reader: R) -> Result<(TraceMeta, Vec<Vec<String>>)> {
    let mut lines = BufReader::new(reader).lines();
    let header = lines.next().ok_or_else(|| Error::parse("line 1", "empty file"))??;
    let meta = parse_header(&header)?;
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        rows.push((i + 2, line.split(',').map(|s| s.trim().to_string()).collect::<Vec<_>>()));
    }
    if rows.is_empty() {
        return Err(Error::parse("line 2", "no sample rows"));
    }
    let width = rows[0].1.len();
    for (lineno, row) in &rows {
        if row.len() != width {
            return Err(Error::parse(
                format!("line {lineno}"),
                format!("expected {width} columns, found {}", row.len()),
            ));
        }
    }
    // keep line numbers for value errors
    let numbered: Vec<Vec<String>> = rows
        .into_iter()
        .map(|(lineno, mut row)| {
            row.push(lineno.to_string());
            row
        })
        .collect();
    Ok((meta, numbered))
}

pub fn read_trace<R: Read>(reader: R) -> Result<ActivationTrace> {
    let (meta, rows) = read_rows(reader)?;
    let n_nodes = rows[0].len() - 1;
    let mut values = Vec::with_capacity(rows.len() * n_nodes);
    for row in &rows {
        let lineno = &row[n_nodes];
        for cell in &row[..n_nodes] {
            let v = cell
                .parse::<f64>()
                .map_err(|_| Error::parse(format!("line {lineno}"), format!("not a number: `{cell}`")))?;
            if !v.is_finite() {
                return Err(Error::parse(format!("line {lineno}"), format!("non-finite value `{cell}`")));
            }
            values.push(v);
        }
    }
    ActivationTrace::new(values, rows.len(), n_nodes, meta)
}

pub fn read_spikes<R: Read>(reader: R) -> Result<SpikeMatrix> {
    let (meta, rows) = read_rows(reader)?;
    let n_nodes = rows[0].len() - 1;
    let mut spikes = Vec::with_capacity(rows.len() * n_nodes);
    for row in &rows {
        let lineno = &row[n_nodes];
        for cell in &row[..n_nodes] {
            let b = match cell.as_str() {
                "0" => 0,
                "1" => 1,
                other => {
                    return Err(Error::parse(format!("line {lineno}"), format!("expected 0 or 1, found `{other}`")));
                }
            };
            spikes.push(b);
        }
    }
    SpikeMatrix::new(spikes, rows.len(), n_nodes, meta)
}

pub fn write_trace<W: Write>(mut w: W, trace: &ActivationTrace) -> Result<()> {
    writeln!(w, "{}", format_header(&trace.meta))?;
    let mut line = String::new();
    for t in 0..trace.n_samples() {
        line.clear();
        for (j, v) in trace.row(t).iter().enumerate() {
            if j > 0 {
                line.push(',');
            }
            line.push_str(&v.to_string());
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

pub fn write_spikes<W: Write>(mut w: W, sm: &SpikeMatrix) -> Result<()> {
    writeln!(w, "{}", format_header(&sm.meta))?;
    let mut line = String::with_capacity(sm.n_nodes() * 2);
    for row in sm.spikes().chunks_exact(sm.n_nodes()) {
        line.clear();
        for (j, &b) in row.iter().enumerate() {
            if j > 0 {
                line.push(',');
            }
            line.push(if b == 1 { '1' } else { '0' });
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

pub fn load_trace(path: &Path) -> Result<ActivationTrace> {
    read_trace(fs::File::open(path)?)
}

pub fn load_spikes(path: &Path) -> Result<SpikeMatrix> {
    read_spikes(fs::File::open(path)?)
}

/// Loads any trace file as spikes: activation files are binarized at the
/// threshold recorded in their header, 0/1 files are taken as-is.
pub fn load_as_spikes(path: &Path) -> Result<SpikeMatrix> {
    let text = fs::read_to_string(path)?;
    match read_spikes(text.as_bytes()) {
        Ok(sm) => Ok(sm),
        Err(Error::Parse { .. }) => {
            let trace = read_trace(text.as_bytes())?;
            let threshold = trace.meta.threshold;
            crate::spikes::binarize(&trace, threshold)
        }
        Err(e) => Err(e),
    }
}

pub fn save_trace(path: &Path, trace: &ActivationTrace) -> Result<()> {
    let mut w = std::io::BufWriter::new(fs::File::create(path)?);
    write_trace(&mut w, trace)?;
    w.flush()?;
    Ok(())
}

pub fn save_spikes(path: &Path, sm: &SpikeMatrix) -> Result<()> {
    let mut w = std::io::BufWriter::new(fs::File::create(path)?);
    write_spikes(&mut w, sm)?;
    w.flush()?;
    Ok(())
}
