//! Discrete-time Poisson arrival model.
//!
//! A node's rate `lambda` is its per-sample spike probability, so a homogeneous
//! process is a sequence of independent Bernoulli(`lambda`) trials. Waiting
//! times are geometric, the k-th arrival time is negative binomial, and
//! superposition / thinning act on integer count sequences so that rates add
//! exactly.

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_factorial;

use crate::error::{Error, Result};
use crate::rng;
use crate::spikes::{cumulative_counts, IsiSequence, SpikeTrain};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoissonModel {
    /// Expected spikes per sample, in `[0, 1]`.
    pub lambda: f64,
    /// Length of the train the rate was fitted on.
    pub n_fit: usize,
}

/// Arrivals per time step. Unlike a spike train, entries may exceed 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountSequence {
    pub counts: Vec<u64>,
}

impl CountSequence {
    pub fn zeros(n: usize) -> Self {
        Self { counts: vec![0; n] }
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Mean arrivals per step.
    pub fn rate(&self) -> Result<f64> {
        if self.counts.is_empty() {
            return Err(Error::InsufficientData("empty count sequence".into()));
        }
        Ok(self.total() as f64 / self.counts.len() as f64)
    }
}

impl From<&SpikeTrain> for CountSequence {
    fn from(train: &SpikeTrain) -> Self {
        Self { counts: train.bits().iter().map(|&b| u64::from(b)).collect() }
    }
}

/// Maximum-likelihood rate: spikes / samples.
pub fn fit_rate(train: &SpikeTrain) -> Result<PoissonModel> {
    if train.is_empty() {
        return Err(Error::InsufficientData("cannot fit a rate to an empty spike train".into()));
    }
    Ok(PoissonModel { lambda: train.spike_count() as f64 / train.len() as f64, n_fit: train.len() })
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must lie in [0, 1], got {p}")))
    }
}

/// Independent Bernoulli(`lambda`) spikes at `n` steps.
pub fn simulate(lambda: f64, n: usize, seed: u64) -> Result<SpikeTrain> {
    check_probability("lambda", lambda)?;
    if n == 0 {
        return Err(Error::invalid("simulated train length must be >= 1"));
    }
    let mut r = rng::seeded(seed);
    Ok(SpikeTrain::from_bools((0..n).map(|_| r.random::<f64>() < lambda)))
}

/// Counts of a continuous-time Poisson process with `rate` arrivals per unit
/// step, observed on the integer grid. Entries follow Poisson(`rate`), so
/// windowed counts have variance equal to their mean.
pub fn simulate_counts(rate: f64, n: usize, seed: u64) -> Result<CountSequence> {
    if !(rate.is_finite() && rate >= 0.0) {
        return Err(Error::invalid(format!("rate must be finite and >= 0, got {rate}")));
    }
    if rate == 0.0 {
        return Ok(CountSequence::zeros(n));
    }
    let dist = Poisson::new(rate).map_err(|e| Error::invalid(e.to_string()))?;
    let mut r = rng::seeded(seed);
    Ok(CountSequence { counts: (0..n).map(|_| dist.sample(&mut r) as u64).collect() })
}

pub fn superpose(a: &CountSequence, b: &CountSequence) -> Result<CountSequence> {
    if a.len() != b.len() {
        return Err(Error::Shape(format!("cannot superpose sequences of length {} and {}", a.len(), b.len())));
    }
    Ok(CountSequence { counts: a.counts.iter().zip(&b.counts).map(|(x, y)| x + y).collect() })
}

/// Thinning: each arrival independently goes to the first output with
/// probability `p`, otherwise to the second.
pub fn decompose(c: &CountSequence, p: f64, seed: u64) -> Result<(CountSequence, CountSequence)> {
    check_probability("p", p)?;
    let mut r = rng::seeded(seed);
    let mut first = Vec::with_capacity(c.len());
    let mut second = Vec::with_capacity(c.len());
    for &k in &c.counts {
        let kept = (0..k).filter(|_| r.random::<f64>() < p).count() as u64;
        first.push(kept);
        second.push(k - kept);
    }
    Ok((CountSequence { counts: first }, CountSequence { counts: second }))
}

/// Collapses counts to spike / no spike. Loses arrivals wherever a step holds
/// more than one, so rates are no longer additive afterwards.
pub fn clip_to_binary(c: &CountSequence) -> SpikeTrain {
    SpikeTrain::from_bools(c.counts.iter().map(|&k| k > 0))
}

/// `P(X_t = k) = (lambda t)^k e^{-lambda t} / k!`, evaluated in log space.
pub fn poisson_pmf(lambda: f64, t: f64, k: u64) -> Result<f64> {
    if !(lambda.is_finite() && lambda >= 0.0 && t.is_finite() && t >= 0.0) {
        return Err(Error::invalid(format!("lambda and t must be finite and >= 0, got {lambda}, {t}")));
    }
    let mu = lambda * t;
    if mu == 0.0 {
        return Ok(if k == 0 { 1.0 } else { 0.0 });
    }
    Ok((k as f64 * mu.ln() - mu - ln_factorial(k)).exp())
}

/// Geometric MLE of the per-step spike probability from inter-spike
/// intervals: `1 / mean(interval)`.
pub fn fit_isi_geometric(isi: &IsiSequence) -> Result<f64> {
    if isi.len() < 2 {
        return Err(Error::InsufficientData(format!("need >= 2 intervals, got {}", isi.len())));
    }
    Ok(1.0 / isi.mean().expect("non-empty"))
}

/// Empirical tails used to probe memorylessness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MemorylessCheck {
    /// `P(T > s + t | T > s)`
    pub conditional: f64,
    /// `P(T > t)`
    pub marginal: f64,
    /// `(1 - q)^t` under the geometric fit `q = 1 / mean(T)`.
    pub geometric_tail: f64,
}

impl MemorylessCheck {
    pub fn pair(&self) -> (f64, f64) {
        (self.conditional, self.marginal)
    }
}

pub const MIN_MEMORYLESS_SET: usize = 30;

pub fn memoryless_check(isi: &IsiSequence, s: u64, t: u64) -> Result<MemorylessCheck> {
    let survivors: Vec<u64> = isi.intervals.iter().copied().filter(|&x| x > s).collect();
    if isi.len() < MIN_MEMORYLESS_SET || survivors.len() < MIN_MEMORYLESS_SET {
        return Err(Error::InsufficientData(format!(
            "memorylessness needs >= {MIN_MEMORYLESS_SET} intervals overall and beyond s={s}; got {} and {}",
            isi.len(),
            survivors.len()
        )));
    }
    let conditional = survivors.iter().filter(|&&x| x > s + t).count() as f64 / survivors.len() as f64;
    let marginal = isi.intervals.iter().filter(|&&x| x > t).count() as f64 / isi.len() as f64;
    let q = 1.0 / isi.mean().expect("non-empty");
    Ok(MemorylessCheck { conditional, marginal, geometric_tail: (1.0 - q).powi(t as i32) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arrival {
    /// 1-based time of the k-th spike.
    At(usize),
    /// The train ends before the k-th spike.
    NotReached { total: u64 },
}

/// Smallest `t` with cumulative count `>= k`.
pub fn kth_arrival_time(train: &SpikeTrain, k: u64) -> Result<Arrival> {
    if k == 0 {
        return Err(Error::invalid("k must be >= 1"));
    }
    let path = cumulative_counts(train);
    Ok(match path.counts.iter().position(|&c| c >= k) {
        Some(i) => Arrival::At(i + 1),
        None => Arrival::NotReached { total: path.total() },
    })
}
