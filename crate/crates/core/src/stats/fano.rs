use statrs::distribution::{ContinuousCDF, Gamma};

use super::{mean, sample_variance, TestResult};
use crate::error::{Error, Result};
use crate::spikes::SpikeTrain;

pub const DEFAULT_WINDOW: usize = 100;

/// Spike counts over consecutive non-overlapping windows of `window` samples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowedCounts {
    pub window: usize,
    pub counts: Vec<u64>,
}

impl WindowedCounts {
    /// Windows an arbitrary per-step count sequence. The trailing partial
    /// window is dropped.
    pub fn from_counts(per_step: &[u64], window: usize) -> Result<Self> {
        if window < 2 {
            return Err(Error::invalid(format!("window must be >= 2, got {window}")));
        }
        if per_step.len() < 2 * window {
            return Err(Error::InsufficientData(format!(
                "need >= {} samples for two windows of {window}, got {}",
                2 * window,
                per_step.len()
            )));
        }
        let counts = per_step.chunks_exact(window).map(|c| c.iter().sum()).collect();
        Ok(Self { window, counts })
    }

    pub fn n_windows(&self) -> usize {
        self.counts.len()
    }
}

pub fn window_counts(train: &SpikeTrain, window: usize) -> Result<WindowedCounts> {
    let per_step: Vec<u64> = train.bits().iter().map(|&b| u64::from(b)).collect();
    WindowedCounts::from_counts(&per_step, window)
}

/// Variance-to-mean ratio of window counts (variance denominator `M - 1`).
pub fn fano_factor(wc: &WindowedCounts) -> Result<f64> {
    if wc.counts.len() < 2 {
        return Err(Error::InsufficientData("Fano factor needs >= 2 windows".into()));
    }
    let xs: Vec<f64> = wc.counts.iter().map(|&c| c as f64).collect();
    let m = mean(&xs);
    if m == 0.0 {
        return Err(Error::Undefined("Fano factor of all-zero window counts".into()));
    }
    Ok(sample_variance(&xs) / m)
}

/// Two-sided test of `F` against its sampling distribution under a Poisson
/// process, `Gamma(shape = (M-1)/2, scale = 2/(M-1))` for `M` windows.
pub fn fano_gamma_test(fano: f64, n_windows: usize) -> Result<TestResult> {
    if n_windows < 2 {
        return Err(Error::invalid(format!("need >= 2 windows, got {n_windows}")));
    }
    if !(fano.is_finite() && fano >= 0.0) {
        return Err(Error::invalid(format!("Fano factor must be finite and >= 0, got {fano}")));
    }
    let half_dof = (n_windows - 1) as f64 / 2.0;
    let null = Gamma::new(half_dof, half_dof).map_err(|e| Error::invalid(e.to_string()))?;
    let lower = null.cdf(fano);
    let upper = null.sf(fano);
    let p = (2.0 * lower.min(upper)).min(1.0);
    Ok(TestResult::new("fano_gamma", vec![("windows".into(), n_windows as f64)], fano, p))
}
