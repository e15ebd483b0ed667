use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::TestResult;
use crate::error::{Error, Result};

/// Distance below 1 that `p = 1` is clamped to before taking `ln(1 - p)`.
pub const PEARSON_P_CLAMP: f64 = 1e-15;

/// Pearson combination `k = -2 sum ln(1 - p_i)`. Under the joint null `k` is
/// chi-square with `2m` degrees of freedom; small `k` is evidence against it,
/// so the combined p-value is the lower tail.
pub fn combine_pvalues_pearson(ps: &[f64]) -> Result<TestResult> {
    if ps.is_empty() {
        return Err(Error::invalid("cannot combine an empty p-value list"));
    }
    if let Some(bad) = ps.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::invalid(format!("p-values must lie in [0, 1], got {bad}")));
    }
    let k: f64 = -2.0 * ps.iter().map(|&p| (-p.min(1.0 - PEARSON_P_CLAMP)).ln_1p()).sum::<f64>();
    let dof = 2.0 * ps.len() as f64;
    let p = ChiSquared::new(dof).map_err(|e| Error::invalid(e.to_string()))?.cdf(k);
    Ok(TestResult::new("pearson_combination", vec![("m".into(), ps.len() as f64)], k, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_half() {
        let r = combine_pvalues_pearson(&[0.5]).unwrap();
        assert!((r.statistic - 2.0 * std::f64::consts::LN_2).abs() < 1e-12);
        // chi-square(2) CDF is 1 - exp(-x / 2)
        assert!((r.p_value - (1.0 - (-r.statistic / 2.0).exp())).abs() < 1e-12);
        assert!((r.p_value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn direction() {
        let ones = combine_pvalues_pearson(&[1.0; 5]).unwrap();
        assert!(ones.statistic > 300.0 && ones.p_value > 1.0 - 1e-12);
        let zeros = combine_pvalues_pearson(&[0.0; 5]).unwrap();
        assert_eq!(zeros.statistic, 0.0);
        assert_eq!(zeros.p_value, 0.0);
        assert!(combine_pvalues_pearson(&[]).is_err());
        assert!(combine_pvalues_pearson(&[0.5, 1.5]).is_err());
    }

    proptest! {
        #[test]
        fn permutation_invariant(mut ps in prop::collection::vec(0.0f64..=1.0, 1..40), seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            let a = combine_pvalues_pearson(&ps).unwrap();
            ps.shuffle(&mut crate::rng::seeded(seed));
            let b = combine_pvalues_pearson(&ps).unwrap();
            prop_assert!((a.statistic - b.statistic).abs() <= 1e-9 * a.statistic.max(1.0));
            prop_assert!((a.p_value - b.p_value).abs() <= 1e-12);
            prop_assert!((0.0..=1.0).contains(&a.p_value));
        }
    }
}
