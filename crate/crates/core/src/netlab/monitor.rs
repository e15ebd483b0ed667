//! Mean firing rate of the observed layer after every training batch, through
//! a generalizing phase and then a switch to shuffled labels.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::derive_seed;
use crate::spikes::{binarize, sample_permutation, TraceMeta};

use super::condition::Splits;
use super::data::Dataset;
use super::mlp::{forward_capture, init_network, DenseNetSpec, Params};
use super::train::{train_with_hook, FreezeMask, TrainConfig};

pub const DEFAULT_PROBE_SIZE: usize = 100;
pub const MONITOR_CSV_HEADER: &str = "batch,phase,split,mfr";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonitorConfig {
    pub train: TrainConfig,
    pub memorize_epochs: usize,
    pub probe_size: usize,
}

impl Default for MonitorConfig {
    fn default() -> Self {
        Self { train: TrainConfig::default(), memorize_epochs: 10, probe_size: DEFAULT_PROBE_SIZE }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    /// Before the first update.
    Init,
    Generalize,
    Memorize,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Init => "init",
            Phase::Generalize => "generalize",
            Phase::Memorize => "memorize",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonitorRow {
    /// 0 for the untrained probe, then the running batch count.
    pub batch: usize,
    /// Epoch within the phase (0 for the initial probe).
    pub epoch: usize,
    pub phase: Phase,
    pub split: String,
    pub mfr: f64,
}

/// Mean over nodes of the fraction of inputs with activation above 0.
pub fn probe_mfr(params: &Params, probe: &Dataset, layer: usize) -> Result<f64> {
    let (_, trace) = forward_capture(params, probe.inputs(), layer, TraceMeta::default())?;
    let rates = binarize(&trace, 0.0)?.firing_rates();
    Ok(rates.iter().sum::<f64>() / rates.len() as f64)
}

fn probe_of(d: &Dataset, size: usize, seed: u64) -> Dataset {
    let perm = sample_permutation(d.len(), seed);
    d.select(&perm[..size.min(d.len())])
}

/// Trains from a fresh initialisation on `data.train` for `cfg.train.epochs`,
/// then on `shuffled` for `cfg.memorize_epochs` (all layers trainable),
/// probing train and test MFR after every batch.
pub fn monitor_training(
    spec: &DenseNetSpec,
    cfg: &MonitorConfig,
    data: &Splits,
    shuffled: &Dataset,
    seed: u64,
) -> Result<Vec<MonitorRow>> {
    if cfg.probe_size == 0 {
        return Err(Error::invalid("probe_size must be >= 1"));
    }
    let layer = spec.n_hidden() - 1;
    let probes = [
        ("train", probe_of(&data.train, cfg.probe_size, derive_seed(seed, 400))),
        ("test", probe_of(&data.test, cfg.probe_size, derive_seed(seed, 401))),
    ];
    let mut rows = Vec::new();
    let mut record = |params: &Params, batch: usize, epoch: usize, phase: Phase| -> Result<()> {
        for (split, probe) in &probes {
            rows.push(MonitorRow {
                batch,
                epoch,
                phase,
                split: (*split).into(),
                mfr: probe_mfr(params, probe, layer)?,
            });
        }
        Ok(())
    };

    let mut params = init_network(spec, derive_seed(seed, 0));
    record(&params, 0, 0, Phase::Init)?;
    let mask = FreezeMask::all_trainable(spec.n_layers());
    let mut batch = 0;
    for (phase, d, epochs, stream) in
        [(Phase::Generalize, &data.train, cfg.train.epochs, 500), (Phase::Memorize, shuffled, cfg.memorize_epochs, 501)]
    {
        if epochs == 0 {
            continue;
        }
        let tcfg = TrainConfig { epochs, seed: derive_seed(seed, stream), ..cfg.train };
        let (p, _) = train_with_hook(params, d, &tcfg, &mask, |p, pos| {
            batch += 1;
            record(p, batch, pos.epoch, phase)
        })?;
        params = p;
    }
    Ok(rows)
}

pub fn monitor_rows_to_csv(rows: &[MonitorRow]) -> String {
    let mut s = String::from(MONITOR_CSV_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&format!("{},{},{},{}\n", r.batch, r.phase.as_str(), r.split, r.mfr));
    }
    s
}

/// Reads [`monitor_rows_to_csv`] output back (the epoch column is not
/// stored and comes back as 0).
pub fn monitor_rows_from_csv(text: &str) -> Result<Vec<MonitorRow>> {
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some(MONITOR_CSV_HEADER) {
        return Err(Error::parse("line 1", format!("expected header `{MONITOR_CSV_HEADER}`")));
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let loc = format!("line {}", i + 2);
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 4 {
            return Err(Error::parse(loc, format!("expected 4 fields, found {}", f.len())));
        }
        let phase = match f[1] {
            "init" => Phase::Init,
            "generalize" => Phase::Generalize,
            "memorize" => Phase::Memorize,
            other => return Err(Error::parse(loc, format!("unknown phase `{other}`"))),
        };
        rows.push(MonitorRow {
            batch: f[0].parse().map_err(|_| Error::parse(loc.clone(), "bad batch index"))?,
            epoch: 0,
            phase,
            split: f[2].to_string(),
            mfr: f[3].parse().map_err(|_| Error::parse(loc.clone(), "bad mfr"))?,
        });
    }
    Ok(rows)
}

/// Summary of the curve around the generalize -> memorize switch for one split.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveShape {
    /// Mean MFR over the last `k` generalizing batches.
    pub before: f64,
    /// Mean MFR over the first `k` memorizing batches.
    pub after: f64,
    /// Std (population) of MFR across the batches of the first memorizing epoch.
    pub first_epoch_std: f64,
    /// Same for the final epoch.
    pub final_epoch_std: f64,
}

impl CurveShape {
    /// Drop right after the switch, and calmer at the end than at the start.
    pub fn drop_then_stabilize(&self) -> bool {
        self.after < self.before && self.final_epoch_std < self.first_epoch_std
    }
}

fn population_std(xs: &[f64]) -> f64 {
    let m = xs.iter().sum::<f64>() / xs.len() as f64;
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64).sqrt()
}

/// Needs at least `k` batches on each side of the switch and at least two
/// memorizing epochs of `batches_per_epoch` batches.
pub fn curve_shape(rows: &[MonitorRow], split: &str, k: usize, batches_per_epoch: usize) -> Result<CurveShape> {
    let series = |phase: Phase| -> Vec<f64> {
        let mut v: Vec<&MonitorRow> = rows.iter().filter(|r| r.split == split && r.phase == phase).collect();
        v.sort_by_key(|r| r.batch);
        v.iter().map(|r| r.mfr).collect()
    };
    let gen = series(Phase::Generalize);
    let mem = series(Phase::Memorize);
    if k == 0 || batches_per_epoch < 2 || gen.len() < k || mem.len() < k.max(2 * batches_per_epoch) {
        return Err(Error::InsufficientData(format!(
            "{} generalizing / {} memorizing batches for split `{split}`",
            gen.len(),
            mem.len()
        )));
    }
    let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
    Ok(CurveShape {
        before: mean(&gen[gen.len() - k..]),
        after: mean(&mem[..k]),
        first_epoch_std: population_std(&mem[..batches_per_epoch]),
        final_epoch_std: population_std(&mem[mem.len() - batches_per_epoch..]),
    })
}
