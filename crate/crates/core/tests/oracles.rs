//! Cross-checks against reference values produced by scipy / statsmodels
//! (see scripts/gen_oracles.py) and against closed forms written here.

use serde_json::Value;
use spikescope::stats::{
    adf_test, combine_pvalues_pearson, kolmogorov_q, ks_statistic, ks_two_sample, ljung_box, ADF_CRITICAL_CONSTANT,
};

fn fixture(name: &str) -> Value {
    let path = format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

/// Q_KS through the Jacobi theta transform, which converges fast for small
/// lambda where the alternating series does not.
fn q_theta(lambda: f64) -> f64 {
    let pi2 = std::f64::consts::PI.powi(2);
    let s: f64 = (1..200)
        .map(|k| {
            let m = (2 * k - 1) as f64;
            (-m * m * pi2 / (8.0 * lambda * lambda)).exp()
        })
        .sum();
    1.0 - (2.0 * std::f64::consts::PI).sqrt() / lambda * s
}

#[test]
fn pearson_matches_reference_on_120_vectors() {
    let cases = fixture("pearson.json");
    let cases = cases.as_array().unwrap();
    assert!(cases.len() >= 100);
    for c in cases {
        let r = combine_pvalues_pearson(&floats(&c["p"])).unwrap();
        assert!((r.statistic - f(&c["statistic"])).abs() <= 1e-8 * f(&c["statistic"]).abs().max(1.0));
        assert!((r.p_value - f(&c["p_value"])).abs() <= 1e-8, "{} vs {}", r.p_value, c["p_value"]);
    }
}

#[test]
fn kolmogorov_q_matches_reference_and_theta_form() {
    for c in fixture("ks.json")["kolmogorov_q"].as_array().unwrap() {
        let (x, q) = (f(&c["lambda"]), f(&c["q"]));
        assert!((kolmogorov_q(x) - q).abs() <= 1e-6, "lambda {x}");
        assert!((kolmogorov_q(x) - q_theta(x)).abs() <= 1e-6, "lambda {x}");
    }
}

#[test]
fn two_sample_ks_matches_reference() {
    for c in fixture("ks.json")["two_sample"].as_array().unwrap() {
        let (a, b) = (floats(&c["a"]), floats(&c["b"]));
        assert!((ks_statistic(&a, &b).unwrap() - f(&c["d"])).abs() <= 1e-12);
        let r = ks_two_sample(&a, &b).unwrap();
        assert!((r.p_value - f(&c["p_value"])).abs() <= 1e-6);
    }
}

#[test]
fn ljung_box_matches_reference() {
    for c in fixture("ljung_box.json").as_array().unwrap() {
        let h = c["lags"].as_u64().unwrap() as usize;
        let r = ljung_box(&floats(&c["series"]), h).unwrap();
        assert!(rel(r.statistic, f(&c["q"])) <= 1e-9, "{} vs {}", r.statistic, c["q"]);
        let p = f(&c["p_value"]);
        assert!((r.p_value - p).abs() <= 1e-9 || rel(r.p_value, p) <= 1e-6, "{} vs {p}", r.p_value);
    }
}

#[test]
fn adf_statistic_matches_reference() {
    for c in fixture("adf.json")["cases"].as_array().unwrap() {
        let lags = c["lags"].as_u64().unwrap() as usize;
        let r = adf_test(&floats(&c["series"]), lags).unwrap();
        assert_eq!(r.nobs as u64, c["nobs"].as_u64().unwrap());
        assert!(rel(r.result.statistic, f(&c["statistic"])) <= 1e-8, "{} vs {}", r.result.statistic, c["statistic"]);
    }
}

#[test]
fn adf_critical_values_match_published_table() {
    let crit = &fixture("adf.json")["asymptotic_constant_only"];
    for ((level, tau), key) in ADF_CRITICAL_CONSTANT.iter().zip(["1%", "5%", "10%"]) {
        let published = (f(&crit[key]) * 100.0).round() / 100.0;
        assert_eq!(*tau, published, "level {level}");
    }
    assert_eq!(ADF_CRITICAL_CONSTANT.map(|c| c.1), [-3.43, -2.86, -2.57]);
}
