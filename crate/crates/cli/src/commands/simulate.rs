use std::path::Path;

use spikescope::process::simulate;
use spikescope::rng::derive_seed;
use spikescope::spikes::{SpikeMatrix, SpikeTrain, TraceMeta};
use spikescope::trace_io::save_spikes;

use crate::error::CliError;
use crate::manifest::Settings;
use crate::output::guard_file;

#[derive(Debug, Clone, PartialEq)]
pub struct SimulateOptions {
    pub lambda: f64,
    pub n: usize,
    pub nodes: usize,
    pub seed: u64,
}

impl SimulateOptions {
    pub fn from_settings(s: &Settings) -> Result<Self, CliError> {
        Ok(Self {
            lambda: s.require("lambda")?,
            n: s.require("n")?,
            nodes: s.or("nodes", 1)?,
            seed: super::require_seed(s)?,
        })
    }
}

/// Independent Bernoulli(`lambda`) nodes; node `j` uses sub-seed `j` of `seed`.
pub fn simulate_layer(o: &SimulateOptions) -> Result<SpikeMatrix, CliError> {
    if o.nodes == 0 {
        return Err(CliError::Usage("nodes must be >= 1".into()));
    }
    let trains = (0..o.nodes)
        .map(|j| simulate(o.lambda, o.n, derive_seed(o.seed, j as u64)))
        .collect::<Result<Vec<SpikeTrain>, _>>()?;
    let meta = TraceMeta {
        dataset: "simulated".into(),
        split: "none".into(),
        condition: format!("poisson(lambda={})", o.lambda),
        layer: "simulated".into(),
        threshold: 0.0,
    };
    Ok(SpikeMatrix::from_trains(&trains, meta)?)
}

pub fn cmd_simulate(o: &SimulateOptions, out: &Path, force: bool) -> Result<(), CliError> {
    let sm = simulate_layer(o)?;
    guard_file(out, force)?;
    save_spikes(out, &sm)?;
    Ok(())
}
