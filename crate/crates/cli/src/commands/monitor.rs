use std::path::Path;

use serde::Serialize;
use spikescope::netlab::monitor::{monitor_rows_to_csv, MonitorRow};
use spikescope::netlab::{monitor_training, shuffle_labels, DenseNetSpec, MonitorConfig};
use spikescope::rng::derive_seed;

use super::DataOptions;
use crate::error::CliError;
use crate::manifest::Settings;
use crate::output::{guard_file, write_text};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonitorOptions {
    pub seed: u64,
    pub width: usize,
    pub data: DataOptions,
    pub config: MonitorConfig,
}

impl MonitorOptions {
    pub fn from_settings(s: &Settings) -> Result<Self, CliError> {
        let seed = super::require_seed(s)?;
        let config = MonitorConfig {
            train: super::train_config(s, 10)?,
            memorize_epochs: s.or("memorize_epochs", 100)?,
            probe_size: s.or("probe_size", 100)?,
        };
        if config.probe_size == 0 {
            return Err(CliError::Usage("probe_size must be >= 1".into()));
        }
        Ok(Self { seed, width: s.or("width", 64)?, data: DataOptions::from_settings(s, seed)?, config })
    }
}

pub fn monitor(o: &MonitorOptions) -> Result<Vec<MonitorRow>, CliError> {
    let data = o.data.load().map_err(|e| e.at_stage("loading data"))?;
    let shuffled = shuffle_labels(&data.train, derive_seed(o.seed, 200));
    let spec = DenseNetSpec::mlp(data.train.dim(), o.width)?;
    monitor_training(&spec, &o.config, &data, &shuffled, o.seed).map_err(|e| CliError::from(e).at_stage("training"))
}

pub fn cmd_monitor(o: &MonitorOptions, out: &Path, force: bool) -> Result<(), CliError> {
    guard_file(out, force)?;
    let rows = monitor(o)?;
    write_text(out, &monitor_rows_to_csv(&rows))
}
