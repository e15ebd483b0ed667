pub mod analyze;
pub mod experiment;
pub mod monitor;
pub mod report;
pub mod simulate;

use std::path::PathBuf;

use serde::Serialize;
use spikescope::netlab::{idx::load_idx, make_synthetic_splits, Dataset, Splits, TrainConfig};

use crate::error::CliError;
use crate::manifest::Settings;

/// Where the network data comes from: IDX files when `train_images` is set,
/// otherwise the synthetic cluster generator.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DataOptions {
    pub data_seed: u64,
    pub dim: usize,
    pub n_train_per_class: usize,
    pub n_test_per_class: usize,
    pub spread: f64,
    pub idx: Option<IdxPaths>,
    /// Keep only the first rows of IDX splits.
    pub max_train: Option<usize>,
    pub max_test: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdxPaths {
    pub train_images: PathBuf,
    pub train_labels: PathBuf,
    pub test_images: PathBuf,
    pub test_labels: PathBuf,
}

impl DataOptions {
    pub fn from_settings(s: &Settings, seed: u64) -> Result<Self, CliError> {
        let idx = match s.get::<PathBuf>("train_images")? {
            None => None,
            Some(train_images) => Some(IdxPaths {
                train_images,
                train_labels: s.require("train_labels")?,
                test_images: s.require("test_images")?,
                test_labels: s.require("test_labels")?,
            }),
        };
        Ok(Self {
            data_seed: s.or("data_seed", seed)?,
            dim: s.or("dim", 256)?,
            n_train_per_class: s.or("n_train_per_class", 300)?,
            n_test_per_class: s.or("n_test_per_class", 100)?,
            spread: s.or("spread", 0.3)?,
            idx,
            max_train: s.get("max_train")?,
            max_test: s.get("max_test")?,
        })
    }

    pub fn load(&self) -> Result<Splits, CliError> {
        match &self.idx {
            None => {
                let (train, test) = make_synthetic_splits(
                    self.n_train_per_class,
                    self.n_test_per_class,
                    self.dim,
                    self.spread,
                    self.data_seed,
                )?;
                Ok(Splits { train, test })
            }
            Some(p) => {
                let cap = |d: Dataset, max: Option<usize>, split: &str| {
                    let n = max.unwrap_or(d.len()).min(d.len());
                    let mut d = d.select(&(0..n).collect::<Vec<_>>());
                    d.name = "idx".into();
                    d.split = split.into();
                    d
                };
                let train = cap(load_idx(&p.train_images, &p.train_labels)?, self.max_train, "train");
                let test = cap(load_idx(&p.test_images, &p.test_labels)?, self.max_test, "test");
                if train.dim() != test.dim() {
                    return Err(CliError::Data(format!("train width {} != test width {}", train.dim(), test.dim())));
                }
                Ok(Splits { train, test })
            }
        }
    }
}

pub fn train_config(s: &Settings, epochs_default: usize) -> Result<TrainConfig, CliError> {
    let cfg = TrainConfig {
        learning_rate: s.or("learning_rate", 0.1)?,
        batch_size: s.or("batch_size", 256)?,
        epochs: s.or("epochs", epochs_default)?,
        validation_fraction: s.or("validation_fraction", 0.1)?,
        seed: 0,
    };
    cfg.validate()?;
    Ok(cfg)
}

pub fn require_seed(s: &Settings) -> Result<u64, CliError> {
    s.get("seed")?.ok_or_else(|| CliError::Usage("an explicit seed is required (--seed or `seed = ...`)".into()))
}
