use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;
use crate::spikes::sample_permutation;

use super::data::Dataset;
use super::mlp::{accuracy, loss_and_gradient, Params};

/// Plain SGD (no momentum) on mean softmax cross-entropy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    /// Clipped to the number of fitting rows.
    pub batch_size: usize,
    pub epochs: usize,
    pub validation_fraction: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self { learning_rate: 0.1, batch_size: 256, epochs: 10, validation_fraction: 0.1, seed: 0 }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.validation_fraction > 0.0 && self.validation_fraction < 1.0) {
            return Err(Error::invalid(format!(
                "validation_fraction must lie in (0, 1), got {}",
                self.validation_fraction
            )));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate >= 0.0) {
            return Err(Error::invalid(format!("learning_rate must be finite and >= 0, got {}", self.learning_rate)));
        }
        if self.batch_size == 0 {
            return Err(Error::invalid("batch_size must be >= 1"));
        }
        Ok(())
    }
}

/// Per-layer trainability; `true` means the layer is updated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreezeMask(pub Vec<bool>);

impl FreezeMask {
    pub fn all_trainable(n_layers: usize) -> Self {
        Self(vec![true; n_layers])
    }

    /// Only the last `k` weight layers train.
    pub fn last(n_layers: usize, k: usize) -> Self {
        Self((0..n_layers).map(|i| i + k >= n_layers).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub mean_loss: f64,
    pub train_accuracy: f64,
    pub val_accuracy: f64,
    /// Seed of this epoch's batch order.
    pub order_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct History {
    pub epochs: Vec<EpochRecord>,
    pub n_fit: usize,
    pub n_validation: usize,
}

/// Where a batch sits in the run; handed to the per-batch hook.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BatchPosition {
    pub epoch: usize,
    pub batch: usize,
}

pub fn train(params: Params, d: &Dataset, cfg: &TrainConfig, freeze: &FreezeMask) -> Result<(Params, History)> {
    train_with_hook(params, d, cfg, freeze, |_, _| Ok(()))
}

/// Like [`train`], calling `hook` with the updated parameters after every batch.
pub fn train_with_hook<F>(
    mut params: Params,
    d: &Dataset,
    cfg: &TrainConfig,
    freeze: &FreezeMask,
    mut hook: F,
) -> Result<(Params, History)>
where
    F: FnMut(&Params, BatchPosition) -> Result<()>,
{
    cfg.validate()?;
    if freeze.0.len() != params.layers.len() {
        return Err(Error::Shape(format!(
            "freeze mask has {} entries for {} layers",
            freeze.0.len(),
            params.layers.len()
        )));
    }
    if d.dim() != params.layers[0].n_in {
        return Err(Error::Shape(format!("data width {} but network input {}", d.dim(), params.layers[0].n_in)));
    }
    let (fit, val) = d.split_validation(cfg.validation_fraction, split_seed(cfg.seed))?;
    let batch = cfg.batch_size.min(fit.len());
    let mut history = History { epochs: Vec::with_capacity(cfg.epochs), n_fit: fit.len(), n_validation: val.len() };

    let mut xb = Vec::with_capacity(batch * d.dim());
    let mut yb = Vec::with_capacity(batch);
    for epoch in 0..cfg.epochs {
        let order_seed = rng::derive_seed(cfg.seed, 1000 + epoch as u64);
        let order = sample_permutation(fit.len(), order_seed);
        let mut loss_sum = 0.0;
        for (bi, idx) in order.chunks(batch).enumerate() {
            xb.clear();
            yb.clear();
            for &i in idx {
                xb.extend_from_slice(fit.input(i));
                yb.push(fit.labels()[i]);
            }
            let (loss, grad) = loss_and_gradient(&params, &xb, &yb)?;
            if !loss.is_finite() {
                return Err(Error::Diverged { epoch, batch: bi });
            }
            loss_sum += loss;
            let step = cfg.learning_rate / idx.len() as f64;
            for ((layer, g), &trainable) in params.layers.iter_mut().zip(&grad.layers).zip(&freeze.0) {
                if !trainable {
                    continue;
                }
                for (w, gw) in layer.weights.iter_mut().zip(&g.weights) {
                    *w -= step * gw;
                }
                for (b, gb) in layer.biases.iter_mut().zip(&g.biases) {
                    *b -= step * gb;
                }
            }
            if !params.is_finite() {
                return Err(Error::Diverged { epoch, batch: bi });
            }
            hook(&params, BatchPosition { epoch, batch: bi })?;
        }
        history.epochs.push(EpochRecord {
            epoch,
            mean_loss: loss_sum / fit.len() as f64,
            train_accuracy: accuracy(&params, fit.inputs(), fit.labels())?,
            val_accuracy: accuracy(&params, val.inputs(), val.labels())?,
            order_seed,
        });
    }
    Ok((params, history))
}

/// Seed of the fit/validation shuffle; fixed per run, independent of epochs.
pub fn split_seed(seed: u64) -> u64 {
    rng::derive_seed(seed, 0x5e11)
}
