//! The five training conditions and what a run leaves behind.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::derive_seed;
use crate::spikes::{sample_permutation, ActivationTrace, TraceMeta};

use super::data::{shuffle_labels, Dataset};
use super::mlp::{accuracy, forward_capture, init_network, DenseNetSpec, Params};
use super::train::{train, FreezeMask, History, TrainConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Condition {
    Random,
    Generalize,
    MemRetrainLast,
    MemRandomLast,
    MemRetrainAll,
}

impl Condition {
    pub const ALL: [Condition; 5] = [
        Condition::Random,
        Condition::Generalize,
        Condition::MemRetrainLast,
        Condition::MemRandomLast,
        Condition::MemRetrainAll,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Condition::Random => "Random",
            Condition::Generalize => "Generalize",
            Condition::MemRetrainLast => "MemRetrainLast",
            Condition::MemRandomLast => "MemRandomLast",
            Condition::MemRetrainAll => "MemRetrainAll",
        }
    }

    /// The family used when conditions are compared pairwise.
    pub fn family(self) -> &'static str {
        match self {
            Condition::Random => "random",
            Condition::Generalize => "generalization",
            _ => "memorization",
        }
    }

    pub fn needs_generalized_weights(self) -> bool {
        matches!(self, Condition::MemRetrainLast | Condition::MemRetrainAll)
    }

    pub fn uses_shuffled_labels(self) -> bool {
        matches!(self, Condition::MemRetrainLast | Condition::MemRandomLast | Condition::MemRetrainAll)
    }

    fn stream(self) -> u64 {
        self as u64 + 1
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Condition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Condition::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::invalid(format!("unknown condition `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Splits {
    pub train: Dataset,
    pub test: Dataset,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecipeConfig {
    /// Used for the generalizing phase; its seed is replaced per run.
    pub train: TrainConfig,
    /// Epochs on shuffled labels for the memorizing conditions.
    pub memorize_epochs: usize,
}

impl Default for RecipeConfig {
    fn default() -> Self {
        Self { train: TrainConfig::default(), memorize_epochs: 10 }
    }
}

/// Train / validation / test accuracy. `train`/`validation` are measured on the
/// labels the network was fitted to (shuffled ones for memorizing runs);
/// `test` always uses the true labels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Accuracies {
    pub train: f64,
    pub validation: f64,
    pub test: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunArtifacts {
    pub condition: Condition,
    pub spec: DenseNetSpec,
    pub seed: u64,
    pub params: Params,
    /// `None` for [`Condition::Random`]; memorizing runs hold the shuffled-label phase.
    pub history: Option<History>,
    pub accuracy: Accuracies,
    pub train_trace: ActivationTrace,
    pub test_trace: ActivationTrace,
}

/// Rows of `d` in a seeded order, so captured spike trains do not inherit the
/// class grouping of the data file.
fn capture(params: &Params, d: &Dataset, layer: usize, meta: TraceMeta, seed: u64) -> Result<ActivationTrace> {
    let shuffled = d.select(&sample_permutation(d.len(), seed));
    Ok(forward_capture(params, shuffled.inputs(), layer, meta)?.1)
}

fn trace_meta(d: &Dataset, split: &str, cond: Condition, layer: usize) -> TraceMeta {
    TraceMeta {
        dataset: d.name.clone(),
        split: split.into(),
        condition: cond.name().into(),
        layer: format!("hidden{}", layer + 1),
        threshold: 0.0,
    }
}

/// Runs one condition's recipe. `seed` drives initialisation, label shuffling,
/// the validation split and batch order. Retraining conditions need the
/// Generalize artifact of the same spec in `prior`.
pub fn run_condition(
    cond: Condition,
    spec: &DenseNetSpec,
    cfg: &RecipeConfig,
    data: &Splits,
    seed: u64,
    prior: Option<&RunArtifacts>,
) -> Result<RunArtifacts> {
    cfg.train.validate()?;
    let n_layers = spec.n_layers();
    let fresh = || init_network(spec, derive_seed(seed, 0));
    let mut tcfg = cfg.train;
    tcfg.seed = derive_seed(seed, 100 + cond.stream());

    let labelled = if cond.uses_shuffled_labels() {
        shuffle_labels(&data.train, derive_seed(seed, 200))
    } else {
        data.train.clone()
    };

    let (params, history) = match cond {
        Condition::Random => (fresh(), None),
        Condition::Generalize => {
            let (p, h) = train(fresh(), &labelled, &tcfg, &FreezeMask::all_trainable(n_layers))?;
            (p, Some(h))
        }
        Condition::MemRandomLast => {
            tcfg.epochs = cfg.memorize_epochs;
            let (p, h) = train(fresh(), &labelled, &tcfg, &FreezeMask::last(n_layers, 2))?;
            (p, Some(h))
        }
        Condition::MemRetrainLast | Condition::MemRetrainAll => {
            let base = prior.filter(|a| a.condition == Condition::Generalize && &a.spec == spec).ok_or_else(|| {
                Error::MissingPrerequisite(format!("{cond} needs a Generalize run of the same network"))
            })?;
            tcfg.epochs = cfg.memorize_epochs;
            let mask = if cond == Condition::MemRetrainLast {
                FreezeMask::last(n_layers, 2)
            } else {
                FreezeMask::all_trainable(n_layers)
            };
            let (p, h) = train(base.params.clone(), &labelled, &tcfg, &mask)?;
            (p, Some(h))
        }
    };

    let (fit, val) = labelled.split_validation(tcfg.validation_fraction, super::train::split_seed(tcfg.seed))?;
    let accuracy = Accuracies {
        train: accuracy(&params, fit.inputs(), fit.labels())?,
        validation: accuracy(&params, val.inputs(), val.labels())?,
        test: accuracy(&params, data.test.inputs(), data.test.labels())?,
    };

    let layer = spec.n_hidden() - 1;
    let train_trace =
        capture(&params, &data.train, layer, trace_meta(&data.train, "train", cond, layer), derive_seed(seed, 300))?;
    let test_trace =
        capture(&params, &data.test, layer, trace_meta(&data.test, "test", cond, layer), derive_seed(seed, 301))?;

    Ok(RunArtifacts { condition: cond, spec: spec.clone(), seed, params, history, accuracy, train_trace, test_trace })
}
