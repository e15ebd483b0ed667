use super::TestResult;
use crate::error::{Error, Result};

/// Below this argument the Kolmogorov tail differs from 1 by less than 1e-12.
const Q_KS_FLOOR: f64 = 0.2;

/// Kolmogorov distribution tail `Q(x) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 x^2)`,
/// summed until the terms fall below 1e-12.
pub fn kolmogorov_q(x: f64) -> f64 {
    if x < Q_KS_FLOOR {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for j in 1.. {
        let term = (-2.0 * (j * j) as f64 * x * x).exp();
        sum += sign * term;
        if term < 1e-12 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Largest gap between the two empirical CDFs.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InsufficientData("Kolmogorov-Smirnov needs two non-empty samples".into()));
    }
    if a.iter().chain(b).any(|v| v.is_nan()) {
        return Err(Error::invalid("samples contain NaN"));
    }
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let (na, nb) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < xs.len() && j < ys.len() {
        // step past every copy of the smaller value in both samples
        let v = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] == v {
            i += 1;
        }
        while j < ys.len() && ys[j] == v {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

/// Two-sample test with the asymptotic p-value `Q(sqrt(n_e) D)`,
/// `n_e = n_a n_b / (n_a + n_b)`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<TestResult> {
    let d = ks_statistic(a, b)?;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let en = na * nb / (na + nb);
    let p = kolmogorov_q(en.sqrt() * d);
    Ok(TestResult::new("ks_two_sample", vec![("n_a".into(), na), ("n_b".into(), nb)], d, p))
}
