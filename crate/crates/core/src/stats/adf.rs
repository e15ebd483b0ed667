use serde::{Deserialize, Serialize};

use super::{ols, TestResult};
use crate::error::{Error, Result};

/// Asymptotic Dickey-Fuller critical values for the constant-only (no trend)
/// regression, as `(level, tau)`.
pub const ADF_CRITICAL_CONSTANT: [(f64, f64); 3] = [(0.01, -3.43), (0.05, -2.86), (0.10, -2.57)];

/// Where the statistic falls relative to the tabulated levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PBand {
    Below1,
    Between1And5,
    Between5And10,
    Above10,
}

impl PBand {
    /// Interval containing the p-value.
    pub fn interval(self) -> (f64, f64) {
        match self {
            PBand::Below1 => (0.0, 0.01),
            PBand::Between1And5 => (0.01, 0.05),
            PBand::Between5And10 => (0.05, 0.10),
            PBand::Above10 => (0.10, 1.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdfResult {
    /// `p_value` holds the upper end of `band`'s interval; decisions come
    /// straight from the critical values.
    pub result: TestResult,
    pub band: PBand,
    pub lags: usize,
    pub nobs: usize,
}

impl AdfResult {
    pub fn rejects_unit_root(&self, alpha: f64) -> bool {
        self.result.rejects_at(alpha)
    }
}

/// Regresses `dy_t` on a constant, `y_{t-1}` and `lags` lagged differences;
/// the statistic is the t-ratio of the `y_{t-1}` coefficient.
pub fn adf_test(series: &[f64], lags: usize) -> Result<AdfResult> {
    let n = series.len();
    if n < 20 + lags {
        return Err(Error::InsufficientData(format!("need >= {} observations, got {n}", 20 + lags)));
    }
    if series.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("series contains non-finite values"));
    }
    if series.iter().all(|&v| v == series[0]) {
        return Err(Error::Undefined("Dickey-Fuller regression on a constant series".into()));
    }
    let diff: Vec<f64> = series.windows(2).map(|w| w[1] - w[0]).collect();
    let k = 2 + lags;
    let nobs = diff.len() - lags;
    let mut design = Vec::with_capacity(nobs * k);
    let mut y = Vec::with_capacity(nobs);
    for i in lags..diff.len() {
        // diff[i] = series[i + 1] - series[i]
        design.push(1.0);
        design.push(series[i]);
        for j in 1..=lags {
            design.push(diff[i - j]);
        }
        y.push(diff[i]);
    }
    let fit = ols(&design, k, &y)?;
    let tau = fit.t_ratio(1);
    if !tau.is_finite() {
        return Err(Error::Singular("zero residual variance in Dickey-Fuller regression".into()));
    }
    let band = if tau < ADF_CRITICAL_CONSTANT[0].1 {
        PBand::Below1
    } else if tau < ADF_CRITICAL_CONSTANT[1].1 {
        PBand::Between1And5
    } else if tau < ADF_CRITICAL_CONSTANT[2].1 {
        PBand::Between5And10
    } else {
        PBand::Above10
    };
    let mut result = TestResult::new("adf", vec![("lags".into(), lags as f64)], tau, band.interval().1);
    result.decisions =
        ADF_CRITICAL_CONSTANT.iter().map(|&(alpha, crit)| super::Decision { alpha, reject: tau < crit }).collect();
    Ok(AdfResult { result, band, lags, nobs })
}
