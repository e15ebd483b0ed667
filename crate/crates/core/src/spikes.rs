//! Activation traces, their binarization into spike trains, and the derived
//! counting-process views (cumulative counts, inter-spike intervals).

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// Provenance tags carried by every trace and spike file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceMeta {
    pub dataset: String,
    pub split: String,
    pub condition: String,
    pub layer: String,
    /// Threshold that was (spike matrices) or will be (activation traces)
    /// applied when binarizing.
    pub threshold: f64,
}

impl Default for TraceMeta {
    fn default() -> Self {
        Self {
            dataset: "unknown".into(),
            split: "test".into(),
            condition: "unknown".into(),
            layer: "hidden".into(),
            threshold: 0.0,
        }
    }
}

/// Real-valued activations of one observed layer: rows are samples (time
/// steps), columns are nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct ActivationTrace {
    values: Vec<f64>,
    n_samples: usize,
    n_nodes: usize,
    pub meta: TraceMeta,
}

impl ActivationTrace {
    /// Builds a trace from row-major values, rejecting empty shapes and
    /// non-finite entries.
    pub fn new(values: Vec<f64>, n_samples: usize, n_nodes: usize, meta: TraceMeta) -> Result<Self> {
        if n_samples == 0 || n_nodes == 0 {
            return Err(Error::Shape(format!("trace must be non-empty, got {n_samples}x{n_nodes}")));
        }
        if values.len() != n_samples * n_nodes {
            return Err(Error::Shape(format!(
                "expected {} values for {n_samples}x{n_nodes}, got {}",
                n_samples * n_nodes,
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { sample: i / n_nodes, node: i % n_nodes });
        }
        Ok(Self { values, n_samples, n_nodes, meta })
    }

    pub fn from_rows(rows: &[Vec<f64>], meta: TraceMeta) -> Result<Self> {
        let n_nodes = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|r| r.len() != n_nodes) {
            return Err(Error::Shape(format!("row {bad} has {} columns, expected {n_nodes}", rows[bad].len())));
        }
        Self::new(rows.concat(), rows.len(), n_nodes, meta)
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, sample: usize) -> &[f64] {
        &self.values[sample * self.n_nodes..(sample + 1) * self.n_nodes]
    }

    pub fn get(&self, sample: usize, node: usize) -> f64 {
        self.values[sample * self.n_nodes + node]
    }

    pub fn column(&self, node: usize) -> Vec<f64> {
        (0..self.n_samples).map(|t| self.get(t, node)).collect()
    }

    /// Keeps only the first `n` samples.
    pub fn truncate(&self, n: usize) -> ActivationTrace {
        let n = n.clamp(1, self.n_samples);
        Self {
            values: self.values[..n * self.n_nodes].to_vec(),
            n_samples: n,
            n_nodes: self.n_nodes,
            meta: self.meta.clone(),
        }
    }
}

/// Binary spike matrix, same layout as the trace it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct SpikeMatrix {
    spikes: Vec<u8>,
    n_samples: usize,
    n_nodes: usize,
    pub meta: TraceMeta,
}

impl SpikeMatrix {
    pub fn new(spikes: Vec<u8>, n_samples: usize, n_nodes: usize, meta: TraceMeta) -> Result<Self> {
        if n_samples == 0 || n_nodes == 0 {
            return Err(Error::Shape(format!("spike matrix must be non-empty, got {n_samples}x{n_nodes}")));
        }
        if spikes.len() != n_samples * n_nodes {
            return Err(Error::Shape(format!(
                "expected {} entries for {n_samples}x{n_nodes}, got {}",
                n_samples * n_nodes,
                spikes.len()
            )));
        }
        if let Some(i) = spikes.iter().position(|&b| b > 1) {
            return Err(Error::invalid(format!(
                "spike entry at sample {}, node {} is {}, expected 0 or 1",
                i / n_nodes,
                i % n_nodes,
                spikes[i]
            )));
        }
        Ok(Self { spikes, n_samples, n_nodes, meta })
    }

    /// Lays independent trains side by side as node columns.
    pub fn from_trains(trains: &[SpikeTrain], meta: TraceMeta) -> Result<Self> {
        let n_samples = trains.first().map_or(0, SpikeTrain::len);
        if trains.iter().any(|t| t.len() != n_samples) {
            return Err(Error::Shape("spike trains differ in length".into()));
        }
        let n_nodes = trains.len();
        let mut spikes = vec![0u8; n_samples * n_nodes];
        for (j, train) in trains.iter().enumerate() {
            for (t, &b) in train.bits().iter().enumerate() {
                spikes[t * n_nodes + j] = b;
            }
        }
        Self::new(spikes, n_samples, n_nodes, meta)
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn spikes(&self) -> &[u8] {
        &self.spikes
    }

    pub fn get(&self, sample: usize, node: usize) -> u8 {
        self.spikes[sample * self.n_nodes + node]
    }

    pub fn train(&self, node: usize) -> SpikeTrain {
        let bits = (0..self.n_samples).map(|t| self.get(t, node)).collect();
        SpikeTrain { bits, node_id: node }
    }

    pub fn trains(&self) -> Vec<SpikeTrain> {
        (0..self.n_nodes).map(|j| self.train(j)).collect()
    }

    /// Per-node spike totals.
    pub fn spike_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.n_nodes];
        for row in self.spikes.chunks_exact(self.n_nodes) {
            for (c, &b) in counts.iter_mut().zip(row) {
                *c += u64::from(b);
            }
        }
        counts
    }

    /// Per-node maximum-likelihood firing rates.
    pub fn firing_rates(&self) -> Vec<f64> {
        let n = self.n_samples as f64;
        self.spike_counts().into_iter().map(|c| c as f64 / n).collect()
    }

    /// The matrix as a 0/1-valued activation trace.
    pub fn to_trace(&self) -> ActivationTrace {
        ActivationTrace {
            values: self.spikes.iter().map(|&b| f64::from(b)).collect(),
            n_samples: self.n_samples,
            n_nodes: self.n_nodes,
            meta: self.meta.clone(),
        }
    }
}

/// One node's binary arrival sequence over discrete time `t = 1..=n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpikeTrain {
    bits: Vec<u8>,
    pub node_id: usize,
}

impl SpikeTrain {
    pub fn new(bits: Vec<u8>, node_id: usize) -> Result<Self> {
        if let Some(t) = bits.iter().position(|&b| b > 1) {
            return Err(Error::invalid(format!("spike train entry {t} is {}, expected 0 or 1", bits[t])));
        }
        Ok(Self { bits, node_id })
    }

    pub fn from_bools(bits: impl IntoIterator<Item = bool>) -> Self {
        Self { bits: bits.into_iter().map(u8::from).collect(), node_id: 0 }
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn spike_count(&self) -> u64 {
        self.bits.iter().map(|&b| u64::from(b)).sum()
    }

    /// 1-based times of every spike.
    pub fn spike_times(&self) -> Vec<usize> {
        self.bits.iter().enumerate().filter(|(_, &b)| b == 1).map(|(i, _)| i + 1).collect()
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.bits.iter().map(|&b| f64::from(b)).collect()
    }
}

/// Cumulative spike count: `counts[i]` is the number of spikes at times
/// `1..=i+1`. The process value at time 0 is 0 and is not stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountPath {
    pub counts: Vec<u64>,
}

impl CountPath {
    /// Process value at time `t`, with `at(0) == 0`.
    pub fn at(&self, t: usize) -> u64 {
        if t == 0 {
            0
        } else {
            self.counts[t - 1]
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.last().copied().unwrap_or(0)
    }

    /// Starts at 0, non-decreasing, unit increments.
    pub fn satisfies_arrival_axioms(&self) -> bool {
        let mut prev = 0u64;
        self.counts.iter().all(|&c| {
            let ok = c >= prev && c - prev <= 1;
            prev = c;
            ok
        })
    }
}

/// Gaps between consecutive spikes, in samples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsiSequence {
    pub intervals: Vec<u64>,
    /// Number of spikes in the source train; below 2 there are no intervals.
    pub spike_count: u64,
}

impl IsiSequence {
    pub fn new(intervals: Vec<u64>) -> Result<Self> {
        if intervals.contains(&0) {
            return Err(Error::invalid("inter-spike intervals must be >= 1"));
        }
        let spike_count = if intervals.is_empty() { 0 } else { intervals.len() as u64 + 1 };
        Ok(Self { intervals, spike_count })
    }

    pub fn is_insufficient(&self) -> bool {
        self.spike_count < 2
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn mean(&self) -> Option<f64> {
        (!self.intervals.is_empty()).then(|| self.intervals.iter().sum::<u64>() as f64 / self.intervals.len() as f64)
    }
}

/// Spikes wherever the activation is strictly above `threshold`.
pub fn binarize(trace: &ActivationTrace, threshold: f64) -> Result<SpikeMatrix> {
    if !threshold.is_finite() {
        return Err(Error::invalid(format!("threshold must be finite, got {threshold}")));
    }
    if let Some(i) = trace.values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { sample: i / trace.n_nodes, node: i % trace.n_nodes });
    }
    let spikes = trace.values.iter().map(|&v| u8::from(v > threshold)).collect();
    let mut meta = trace.meta.clone();
    meta.threshold = threshold;
    SpikeMatrix::new(spikes, trace.n_samples, trace.n_nodes, meta)
}

pub fn cumulative_counts(train: &SpikeTrain) -> CountPath {
    let counts = train
        .bits
        .iter()
        .scan(0u64, |acc, &b| {
            *acc += u64::from(b);
            Some(*acc)
        })
        .collect();
    CountPath { counts }
}

/// Inter-spike intervals. Trains with fewer than two spikes give an empty
/// sequence flagged by [`IsiSequence::is_insufficient`].
pub fn isi(train: &SpikeTrain) -> IsiSequence {
    let times = train.spike_times();
    let intervals = times.windows(2).map(|w| (w[1] - w[0]) as u64).collect();
    IsiSequence { intervals, spike_count: times.len() as u64 }
}

/// Seeded uniform permutation of `0..n`.
pub fn sample_permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut rng::seeded(seed));
    idx
}

/// Reorders samples (rows) with one seeded permutation shared by all nodes.
pub fn permute_samples(trace: &ActivationTrace, seed: u64) -> ActivationTrace {
    let perm = sample_permutation(trace.n_samples, seed);
    let mut values = Vec::with_capacity(trace.values.len());
    for &src in &perm {
        values.extend_from_slice(trace.row(src));
    }
    ActivationTrace { values, n_samples: trace.n_samples, n_nodes: trace.n_nodes, meta: trace.meta.clone() }
}
