//! Assumption-testing battery: windowed Fano factors and their gamma test,
//! Ljung-Box independence test with Pearson p-value combination, the
//! (augmented) Dickey-Fuller unit-root test, the two-sample
//! Kolmogorov-Smirnov test and Bonferroni thresholds.

mod adf;
mod fano;
mod ks;
mod ljung_box;
mod ols;
mod pearson;

pub use adf::{adf_test, AdfResult, PBand, ADF_CRITICAL_CONSTANT};
pub use fano::{fano_factor, fano_gamma_test, window_counts, WindowedCounts, DEFAULT_WINDOW};
pub use ks::{kolmogorov_q, ks_statistic, ks_two_sample};
pub use ljung_box::{autocorrelations, ljung_box, DEFAULT_LAGS};
pub use ols::{ols, OlsFit};
pub use pearson::{combine_pvalues_pearson, PEARSON_P_CLAMP};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Significance levels every [`TestResult`] is decided at.
pub const DECISION_LEVELS: [f64; 2] = [0.05, 0.01];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub alpha: f64,
    pub reject: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub test: String,
    /// Test parameters, e.g. lags or window counts.
    pub params: Vec<(String, f64)>,
    pub statistic: f64,
    pub p_value: f64,
    pub decisions: Vec<Decision>,
}

impl TestResult {
    pub(crate) fn new(test: &str, params: Vec<(String, f64)>, statistic: f64, p_value: f64) -> Self {
        let p_value = p_value.clamp(0.0, 1.0);
        let decisions = DECISION_LEVELS.iter().map(|&alpha| Decision { alpha, reject: p_value < alpha }).collect();
        Self { test: test.to_string(), params, statistic, p_value, decisions }
    }

    pub fn rejects_at(&self, alpha: f64) -> bool {
        self.decisions.iter().find(|d| d.alpha == alpha).map_or(self.p_value < alpha, |d| d.reject)
    }
}

/// Per-comparison level after Bonferroni correction: `alpha / m`.
pub fn bonferroni_threshold(alpha: f64, m: usize) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    if m == 0 {
        return Err(Error::invalid("number of comparisons must be >= 1"));
    }
    Ok(alpha / m as f64)
}

pub(crate) fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample variance with denominator `n - 1`.
pub(crate) fn sample_variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bonferroni_examples() {
        assert_eq!(bonferroni_threshold(0.05, 1).unwrap(), 0.05);
        assert_eq!(bonferroni_threshold(0.05, 128).unwrap(), 0.000390625);
        assert!((bonferroni_threshold(0.01, 10).unwrap() - 0.001).abs() < 1e-18);
        assert!(bonferroni_threshold(0.0, 3).is_err());
        assert!(bonferroni_threshold(0.05, 0).is_err());
    }

    #[test]
    fn decisions_follow_p_value() {
        let r = TestResult::new("x", vec![], 0.0, 0.03);
        assert!(r.rejects_at(0.05));
        assert!(!r.rejects_at(0.01));
        assert_eq!(TestResult::new("x", vec![], 0.0, 1.2).p_value, 1.0);
    }
}
