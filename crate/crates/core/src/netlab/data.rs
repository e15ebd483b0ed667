use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::rng;
use crate::spikes::sample_permutation;

pub const N_CLASSES: usize = 10;

/// Inputs in `[0, 1]` with integer class labels (exposed one-hot through
/// [`Dataset::one_hot`]).
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    inputs: Vec<f64>,
    labels: Vec<usize>,
    dim: usize,
    pub name: String,
    pub split: String,
}

impl Dataset {
    pub fn new(inputs: Vec<f64>, labels: Vec<usize>, dim: usize, name: &str, split: &str) -> Result<Self> {
        if dim == 0 || inputs.len() != labels.len() * dim {
            return Err(Error::Shape(format!(
                "{} inputs do not form {} rows of width {dim}",
                inputs.len(),
                labels.len()
            )));
        }
        if let Some(i) = inputs.iter().position(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::invalid(format!("input {} = {} outside [0, 1]", i, inputs[i])));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= N_CLASSES) {
            return Err(Error::invalid(format!("label {bad} outside 0..{N_CLASSES}")));
        }
        Ok(Self { inputs, labels, dim, name: name.into(), split: split.into() })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn inputs(&self) -> &[f64] {
        &self.inputs
    }

    pub fn input(&self, i: usize) -> &[f64] {
        &self.inputs[i * self.dim..(i + 1) * self.dim]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn one_hot(&self, i: usize) -> [f64; N_CLASSES] {
        let mut v = [0.0; N_CLASSES];
        v[self.labels[i]] = 1.0;
        v
    }

    /// Rows at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> Dataset {
        let mut inputs = Vec::with_capacity(indices.len() * self.dim);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            inputs.extend_from_slice(self.input(i));
            labels.push(self.labels[i]);
        }
        Dataset { inputs, labels, dim: self.dim, name: self.name.clone(), split: self.split.clone() }
    }

    /// Seeded shuffle, then the final `fraction` of rows becomes the
    /// validation part: `(fit, validation)`.
    pub fn split_validation(&self, fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
        if !(fraction > 0.0 && fraction < 1.0) {
            return Err(Error::invalid(format!("validation fraction must lie in (0, 1), got {fraction}")));
        }
        let n_val = ((self.len() as f64) * fraction).round() as usize;
        if n_val == 0 || n_val >= self.len() {
            return Err(Error::InsufficientData(format!(
                "{} rows cannot hold a {fraction} validation split",
                self.len()
            )));
        }
        let perm = sample_permutation(self.len(), seed);
        let (fit, val) = perm.split_at(self.len() - n_val);
        Ok((self.select(fit), self.select(val)))
    }

    pub fn with_labels(&self, labels: Vec<usize>) -> Dataset {
        Dataset { labels, ..self.clone() }
    }
}

/// Ten Gaussian clusters around seeded centres in `[0, 1]^dim`; samples are
/// clipped back into the cube. Rows are grouped by class.
pub fn make_synthetic(n_per_class: usize, dim: usize, spread: f64, seed: u64) -> Result<Dataset> {
    let centers = synthetic_centers(dim, seed)?;
    sample_clusters(&centers, n_per_class, spread, rng::derive_seed(seed, 1), "train")
}

/// Train and test sets drawn from the same clusters with independent noise.
pub fn make_synthetic_splits(
    n_train_per_class: usize,
    n_test_per_class: usize,
    dim: usize,
    spread: f64,
    seed: u64,
) -> Result<(Dataset, Dataset)> {
    let centers = synthetic_centers(dim, seed)?;
    let train = sample_clusters(&centers, n_train_per_class, spread, rng::derive_seed(seed, 1), "train")?;
    let test = sample_clusters(&centers, n_test_per_class, spread, rng::derive_seed(seed, 2), "test")?;
    Ok((train, test))
}

fn synthetic_centers(dim: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    if dim < 2 {
        return Err(Error::invalid(format!("dim must be >= 2, got {dim}")));
    }
    let mut r = rng::seeded(seed);
    Ok((0..N_CLASSES).map(|_| (0..dim).map(|_| r.random::<f64>()).collect()).collect())
}

fn sample_clusters(centers: &[Vec<f64>], n_per_class: usize, spread: f64, seed: u64, split: &str) -> Result<Dataset> {
    if n_per_class == 0 {
        return Err(Error::invalid("n_per_class must be >= 1"));
    }
    if !(spread.is_finite() && spread >= 0.0) {
        return Err(Error::invalid(format!("spread must be finite and >= 0, got {spread}")));
    }
    let dim = centers[0].len();
    let mut r = rng::seeded(seed);
    let mut inputs = Vec::with_capacity(N_CLASSES * n_per_class * dim);
    let mut labels = Vec::with_capacity(N_CLASSES * n_per_class);
    for (class, center) in centers.iter().enumerate() {
        for _ in 0..n_per_class {
            for &c in center {
                let z: f64 = r.sample(StandardNormal);
                inputs.push((c + spread * z).clamp(0.0, 1.0));
            }
            labels.push(class);
        }
    }
    Dataset::new(inputs, labels, dim, "synthetic", split)
}

/// Permutes the label column with a seeded permutation; inputs stay put.
pub fn shuffle_labels(d: &Dataset, seed: u64) -> Dataset {
    let perm = sample_permutation(d.len(), seed);
    d.with_labels(perm.iter().map(|&i| d.labels[i]).collect())
}
