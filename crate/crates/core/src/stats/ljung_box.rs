use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::{mean, TestResult};
use crate::error::{Error, Result};

pub const DEFAULT_LAGS: usize = 10;

/// Biased sample autocorrelations `rho_1..=rho_h` (denominator: total sum of
/// squares about the mean).
pub fn autocorrelations(series: &[f64], h: usize) -> Result<Vec<f64>> {
    let n = series.len();
    if h == 0 || n <= h {
        return Err(Error::InsufficientData(format!("need n > h >= 1, got n={n}, h={h}")));
    }
    let m = mean(series);
    let centered: Vec<f64> = series.iter().map(|x| x - m).collect();
    let ss: f64 = centered.iter().map(|x| x * x).sum();
    if ss == 0.0 {
        return Err(Error::Undefined("autocorrelation of a constant series".into()));
    }
    Ok((1..=h).map(|k| centered[k..].iter().zip(&centered[..n - k]).map(|(a, b)| a * b).sum::<f64>() / ss).collect())
}

/// `Q = n (n + 2) sum_k rho_k^2 / (n - k)`, referred to chi-square with `h`
/// degrees of freedom.
pub fn ljung_box(series: &[f64], h: usize) -> Result<TestResult> {
    let rho = autocorrelations(series, h)?;
    let n = series.len() as f64;
    let q = n * (n + 2.0) * rho.iter().enumerate().map(|(i, r)| r * r / (n - (i + 1) as f64)).sum::<f64>();
    let p = ChiSquared::new(h as f64).map_err(|e| Error::invalid(e.to_string()))?.sf(q);
    Ok(TestResult::new("ljung_box", vec![("lags".into(), h as f64)], q, p))
}
