//! Dense ReLU network with a softmax head, forward/backward by hand.

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng;
use crate::spikes::{ActivationTrace, TraceMeta};

use super::data::N_CLASSES;

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct DenseNetSpec {
    /// input, hidden..., output
    pub layer_widths: Vec<usize>,
}

impl DenseNetSpec {
    pub fn new(layer_widths: Vec<usize>) -> Result<Self> {
        if layer_widths.len() < 3 {
            return Err(Error::invalid("need input, at least one hidden layer and an output layer"));
        }
        if layer_widths.last() != Some(&N_CLASSES) {
            return Err(Error::invalid(format!("output width must be {N_CLASSES}")));
        }
        if layer_widths.contains(&0) {
            return Err(Error::invalid("layer widths must be >= 1"));
        }
        Ok(Self { layer_widths })
    }

    /// The usual desk network: one hidden layer.
    pub fn mlp(input: usize, hidden: usize) -> Result<Self> {
        Self::new(vec![input, hidden, N_CLASSES])
    }

    pub fn input_width(&self) -> usize {
        self.layer_widths[0]
    }

    pub fn n_hidden(&self) -> usize {
        self.layer_widths.len() - 2
    }

    /// Number of weight layers.
    pub fn n_layers(&self) -> usize {
        self.layer_widths.len() - 1
    }
}

/// Weights are `[out][in]` row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub n_in: usize,
    pub n_out: usize,
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

impl Layer {
    fn zeros(n_in: usize, n_out: usize) -> Self {
        Self { n_in, n_out, weights: vec![0.0; n_in * n_out], biases: vec![0.0; n_out] }
    }

    pub fn n_params(&self) -> usize {
        self.weights.len() + self.biases.len()
    }

    fn param_mut(&mut self, k: usize) -> &mut f64 {
        if k < self.weights.len() {
            &mut self.weights[k]
        } else {
            &mut self.biases[k - self.weights.len()]
        }
    }

    fn param(&self, k: usize) -> f64 {
        if k < self.weights.len() {
            self.weights[k]
        } else {
            self.biases[k - self.weights.len()]
        }
    }

    /// FNV-1a over the raw bit patterns.
    pub fn hash(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for v in self.weights.iter().chain(&self.biases) {
            for b in v.to_bits().to_le_bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(0x0100_0000_01b3);
            }
        }
        h
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Params {
    pub layers: Vec<Layer>,
}

impl Params {
    pub fn zeros_like(spec: &DenseNetSpec) -> Self {
        let layers = spec.layer_widths.windows(2).map(|w| Layer::zeros(w[0], w[1])).collect();
        Self { layers }
    }

    pub fn spec(&self) -> DenseNetSpec {
        let mut widths = vec![self.layers[0].n_in];
        widths.extend(self.layers.iter().map(|l| l.n_out));
        DenseNetSpec { layer_widths: widths }
    }

    pub fn n_params(&self) -> usize {
        self.layers.iter().map(Layer::n_params).sum()
    }

    pub fn layer_hashes(&self) -> Vec<u64> {
        self.layers.iter().map(Layer::hash).collect()
    }

    fn locate(&self, mut k: usize) -> (usize, usize) {
        for (li, l) in self.layers.iter().enumerate() {
            if k < l.n_params() {
                return (li, k);
            }
            k -= l.n_params();
        }
        panic!("parameter index out of range");
    }

    pub fn get(&self, k: usize) -> f64 {
        let (li, j) = self.locate(k);
        self.layers[li].param(j)
    }

    pub fn get_mut(&mut self, k: usize) -> &mut f64 {
        let (li, j) = self.locate(k);
        self.layers[li].param_mut(j)
    }

    pub fn is_finite(&self) -> bool {
        self.layers.iter().all(|l| l.weights.iter().chain(&l.biases).all(|v| v.is_finite()))
    }
}

/// Glorot/Xavier uniform weights, `U(-a, a)` with `a = sqrt(6 / (fan_in + fan_out))`;
/// biases start at zero.
pub fn init_network(spec: &DenseNetSpec, seed: u64) -> Params {
    let mut r = rng::seeded(seed);
    let mut p = Params::zeros_like(spec);
    for layer in &mut p.layers {
        let a = (6.0 / (layer.n_in + layer.n_out) as f64).sqrt();
        for w in &mut layer.weights {
            *w = r.random_range(-a..a);
        }
    }
    p
}

/// `out[b][o] = bias[o] + sum_i w[o][i] * x[b][i]`
fn affine(layer: &Layer, x: &[f64], n: usize, out: &mut Vec<f64>) {
    out.clear();
    out.resize(n * layer.n_out, 0.0);
    for b in 0..n {
        let xb = &x[b * layer.n_in..(b + 1) * layer.n_in];
        let ob = &mut out[b * layer.n_out..(b + 1) * layer.n_out];
        for (o, z) in ob.iter_mut().enumerate() {
            let w = &layer.weights[o * layer.n_in..(o + 1) * layer.n_in];
            *z = layer.biases[o] + w.iter().zip(xb).map(|(a, b)| a * b).sum::<f64>();
        }
    }
}

fn softmax_rows(z: &mut [f64]) {
    for row in z.chunks_exact_mut(N_CLASSES) {
        let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut s = 0.0;
        for v in row.iter_mut() {
            *v = (*v - max).exp();
            s += *v;
        }
        for v in row.iter_mut() {
            *v /= s;
        }
    }
}

/// Post-activation values of every layer; the last entry holds the softmax.
struct Activations {
    layers: Vec<Vec<f64>>,
}

fn check_inputs(params: &Params, inputs: &[f64]) -> Result<usize> {
    let d = params.layers[0].n_in;
    if !inputs.len().is_multiple_of(d) {
        return Err(Error::Shape(format!("{} input values are not rows of width {d}", inputs.len())));
    }
    Ok(inputs.len() / d)
}

fn forward_all(params: &Params, inputs: &[f64], n: usize) -> Activations {
    let mut layers: Vec<Vec<f64>> = Vec::with_capacity(params.layers.len());
    let last = params.layers.len() - 1;
    for (li, layer) in params.layers.iter().enumerate() {
        let x: &[f64] = if li == 0 { inputs } else { &layers[li - 1] };
        let mut z = Vec::new();
        affine(layer, x, n, &mut z);
        if li == last {
            softmax_rows(&mut z);
        } else {
            for v in &mut z {
                *v = v.max(0.0);
            }
        }
        layers.push(z);
    }
    Activations { layers }
}

/// Softmax outputs, `n x 10` row-major.
pub fn predict(params: &Params, inputs: &[f64]) -> Result<Vec<f64>> {
    let n = check_inputs(params, inputs)?;
    Ok(forward_all(params, inputs, n).layers.pop().expect("non-empty network"))
}

/// Softmax outputs plus the post-ReLU activations of hidden layer
/// `observe_layer` (0-based among hidden layers).
pub fn forward_capture(
    params: &Params,
    inputs: &[f64],
    observe_layer: usize,
    meta: TraceMeta,
) -> Result<(Vec<f64>, ActivationTrace)> {
    let n = check_inputs(params, inputs)?;
    if observe_layer + 1 >= params.layers.len() {
        return Err(Error::invalid(format!(
            "hidden layer {observe_layer} does not exist ({} hidden layers)",
            params.layers.len() - 1
        )));
    }
    let mut acts = forward_all(params, inputs, n);
    let width = params.layers[observe_layer].n_out;
    let hidden = std::mem::take(&mut acts.layers[observe_layer]);
    let preds = acts.layers.pop().expect("non-empty network");
    let trace = ActivationTrace::new(hidden, n, width, meta)?;
    Ok((preds, trace))
}

pub fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in row.iter().enumerate() {
        if v > row[best] {
            best = i;
        }
    }
    best
}

pub fn accuracy(params: &Params, inputs: &[f64], labels: &[usize]) -> Result<f64> {
    if labels.is_empty() {
        return Err(Error::InsufficientData("accuracy of an empty set".into()));
    }
    let preds = predict(params, inputs)?;
    let hits = preds.chunks_exact(N_CLASSES).zip(labels).filter(|(row, &y)| argmax(row) == y).count();
    Ok(hits as f64 / labels.len() as f64)
}

/// Summed cross-entropy over the batch and its gradient.
pub fn loss_and_gradient(params: &Params, inputs: &[f64], labels: &[usize]) -> Result<(f64, Params)> {
    let n = check_inputs(params, inputs)?;
    if n != labels.len() {
        return Err(Error::Shape(format!("{n} input rows but {} labels", labels.len())));
    }
    let acts = forward_all(params, inputs, n);
    let probs = acts.layers.last().expect("non-empty network");
    let mut loss = 0.0;
    // delta = dL/dz of the current layer
    let mut delta = probs.clone();
    for (b, &y) in labels.iter().enumerate() {
        loss -= probs[b * N_CLASSES + y].max(f64::MIN_POSITIVE).ln();
        delta[b * N_CLASSES + y] -= 1.0;
    }

    let mut grad = Params::zeros_like(&params.spec());
    for li in (0..params.layers.len()).rev() {
        let layer = &params.layers[li];
        let x: &[f64] = if li == 0 { inputs } else { &acts.layers[li - 1] };
        let g = &mut grad.layers[li];
        for b in 0..n {
            let xb = &x[b * layer.n_in..(b + 1) * layer.n_in];
            for o in 0..layer.n_out {
                let d = delta[b * layer.n_out + o];
                if d == 0.0 {
                    continue;
                }
                g.biases[o] += d;
                let row = &mut g.weights[o * layer.n_in..(o + 1) * layer.n_in];
                for (gw, xi) in row.iter_mut().zip(xb) {
                    *gw += d * xi;
                }
            }
        }
        if li > 0 {
            let mut prev = vec![0.0; n * layer.n_in];
            for b in 0..n {
                let pb = &mut prev[b * layer.n_in..(b + 1) * layer.n_in];
                for o in 0..layer.n_out {
                    let d = delta[b * layer.n_out + o];
                    if d == 0.0 {
                        continue;
                    }
                    let w = &layer.weights[o * layer.n_in..(o + 1) * layer.n_in];
                    for (p, wi) in pb.iter_mut().zip(w) {
                        *p += d * wi;
                    }
                }
            }
            // ReLU'(0) = 0
            for (p, a) in prev.iter_mut().zip(&acts.layers[li - 1]) {
                if *a <= 0.0 {
                    *p = 0.0;
                }
            }
            delta = prev;
        }
    }
    Ok((loss, grad))
}

pub const GRADIENT_CHECK_MAX_BATCH: usize = 8;
const GRADIENT_CHECK_PROBES: usize = 256;
/// Keeps the relative error meaningful for near-zero gradient entries.
const GRADIENT_CHECK_FLOOR: f64 = 1e-3;

/// Largest relative disagreement between the analytic gradient and central
/// differences, over a seeded subset of at most 256 parameters (all of them
/// for small nets). The relative error is `|a - n| / max(|a|, |n|, 1e-3)`.
/// Pre-activations sitting exactly at 0 (the ReLU kink) make the finite
/// difference meaningless there, so check at generic parameter values.
pub fn gradient_check(params: &Params, inputs: &[f64], labels: &[usize], epsilon: f64, seed: u64) -> Result<f64> {
    if labels.is_empty() || labels.len() > GRADIENT_CHECK_MAX_BATCH {
        return Err(Error::invalid(format!(
            "gradient check wants 1..={GRADIENT_CHECK_MAX_BATCH} samples, got {}",
            labels.len()
        )));
    }
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::invalid("epsilon must be positive"));
    }
    let (_, grad) = loss_and_gradient(params, inputs, labels)?;
    let total = params.n_params();
    let probes: Vec<usize> = if total <= GRADIENT_CHECK_PROBES {
        (0..total).collect()
    } else {
        let mut r = rng::seeded(seed);
        (0..GRADIENT_CHECK_PROBES).map(|_| r.random_range(0..total)).collect()
    };
    let mut p = params.clone();
    let mut worst: f64 = 0.0;
    for k in probes {
        let orig = p.get(k);
        *p.get_mut(k) = orig + epsilon;
        let (up, _) = loss_and_gradient(&p, inputs, labels)?;
        *p.get_mut(k) = orig - epsilon;
        let (down, _) = loss_and_gradient(&p, inputs, labels)?;
        *p.get_mut(k) = orig;
        let numeric = (up - down) / (2.0 * epsilon);
        let analytic = grad.get(k);
        let rel = (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(GRADIENT_CHECK_FLOOR);
        worst = worst.max(rel);
    }
    Ok(worst)
}
