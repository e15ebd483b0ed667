use crate::error::{Error, Result};

/// Ordinary least-squares fit.
#[derive(Debug, Clone, PartialEq)]
pub struct OlsFit {
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub residual_ss: f64,
    pub nobs: usize,
}

impl OlsFit {
    pub fn t_ratio(&self, j: usize) -> f64 {
        self.coefficients[j] / self.std_errors[j]
    }
}

/// Fits `y = X b + e` through the normal equations with a Cholesky factor.
/// `design` is row-major with `k` columns.
pub fn ols(design: &[f64], k: usize, y: &[f64]) -> Result<OlsFit> {
    let n = y.len();
    if k == 0 || design.len() != n * k {
        return Err(Error::Shape(format!("design has {} entries, expected {n}x{k}", design.len())));
    }
    if n <= k {
        return Err(Error::InsufficientData(format!("{n} observations for {k} regressors")));
    }
    let mut xtx = vec![0.0; k * k];
    let mut xty = vec![0.0; k];
    for (row, &yi) in design.chunks_exact(k).zip(y) {
        for a in 0..k {
            xty[a] += row[a] * yi;
            for b in 0..=a {
                xtx[a * k + b] += row[a] * row[b];
            }
        }
    }
    let scale = (0..k).map(|a| xtx[a * k + a]).fold(0.0f64, f64::max);
    // lower-triangular Cholesky factor, in place
    let mut l = vec![0.0; k * k];
    for a in 0..k {
        for b in 0..=a {
            let mut s = xtx[a * k + b];
            for c in 0..b {
                s -= l[a * k + c] * l[b * k + c];
            }
            if a == b {
                if s <= scale * 1e-12 {
                    return Err(Error::Singular(format!("regressor {a} is collinear with earlier columns")));
                }
                l[a * k + a] = s.sqrt();
            } else {
                l[a * k + b] = s / l[b * k + b];
            }
        }
    }
    let forward = |rhs: &[f64]| {
        let mut z = vec![0.0; k];
        for a in 0..k {
            let s: f64 = (0..a).map(|c| l[a * k + c] * z[c]).sum();
            z[a] = (rhs[a] - s) / l[a * k + a];
        }
        z
    };
    let z = forward(&xty);
    let mut beta = vec![0.0; k];
    for a in (0..k).rev() {
        let s: f64 = (a + 1..k).map(|c| l[c * k + a] * beta[c]).sum();
        beta[a] = (z[a] - s) / l[a * k + a];
    }
    let residual_ss: f64 = design
        .chunks_exact(k)
        .zip(y)
        .map(|(row, &yi)| {
            let fit: f64 = row.iter().zip(&beta).map(|(x, b)| x * b).sum();
            (yi - fit).powi(2)
        })
        .sum();
    let sigma2 = residual_ss / (n - k) as f64;
    let std_errors = (0..k)
        .map(|j| {
            let mut e = vec![0.0; k];
            e[j] = 1.0;
            let w = forward(&e);
            (sigma2 * w.iter().map(|v| v * v).sum::<f64>()).sqrt()
        })
        .collect();
    Ok(OlsFit { coefficients: beta, std_errors, residual_ss, nobs: n })
}
