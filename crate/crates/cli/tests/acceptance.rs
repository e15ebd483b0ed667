//! Acceptance run: one PASS/FAIL line per criterion, at the stated tolerance.
//!
//! A criterion that is unattainable by construction is still run as stated
//! and reported as FAIL; the run then checks the value the analysis predicts
//! instead, so the process only exits non-zero on unexpected results.
//!
//! `ACCEPTANCE_ONLY=2,5` runs a subset.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::Rng;
use serde_json::Value;
use spikescope::indicators::PairKind;
use spikescope::netlab::monitor::{curve_shape, monitor_rows_from_csv, Phase};
use spikescope::netlab::{
    forward_capture, gradient_check, init_network, make_synthetic_splits, run_condition, train, Condition, Dataset,
    DenseNetSpec, FreezeMask, Params, RecipeConfig, Splits, TrainConfig,
};
use spikescope::par::Exec;
use spikescope::process::{decompose, fit_rate, simulate, simulate_counts, superpose, CountSequence};
use spikescope::rng::{derive_seed, seeded};
use spikescope::spikes::binarize;
use spikescope::stats::{
    adf_test, combine_pvalues_pearson, fano_factor, fano_gamma_test, kolmogorov_q, ks_two_sample, ljung_box,
    window_counts, WindowedCounts, ADF_CRITICAL_CONSTANT,
};
use spikescope::TraceMeta;
use spikescope_cli::commands::experiment::{cmd_experiment, ExperimentOptions};
use spikescope_cli::commands::monitor::{cmd_monitor, MonitorOptions};
use spikescope_cli::commands::report::{cmd_report, report, SweepReport};
use spikescope_cli::commands::simulate::{simulate_layer, SimulateOptions};
use spikescope_cli::manifest::Settings;

struct Outcome {
    pass: bool,
    detail: String,
    /// Set for criteria that cannot hold by construction: (what the analysis
    /// predicts, whether the run matched it).
    unattainable: Option<(String, bool)>,
}

impl Outcome {
    fn new(pass: bool, detail: String) -> Self {
        Self { pass, detail, unattainable: None }
    }
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("spikescope-acceptance-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn settings(section: &str, pairs: &[(&str, String)]) -> Settings {
    let mut s = Settings::empty(section);
    for (k, v) in pairs {
        s.set(k, v);
    }
    s
}

fn frac(xs: &[bool]) -> f64 {
    xs.iter().filter(|&&b| b).count() as f64 / xs.len() as f64
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

// 1. Poisson null calibration of the Fano factor on simulated trains.
fn c1() -> Outcome {
    let (lambda, n, w) = (0.3, 100_000, 100);
    let t = Instant::now();
    let fanos = Exec::Parallel.map_range(1000, |i| {
        let o = SimulateOptions { lambda, n, nodes: 1, seed: derive_seed(0xc1, i as u64) };
        let sm = simulate_layer(&o).unwrap();
        fano_factor(&window_counts(&sm.train(0), w).unwrap()).unwrap()
    });
    let secs = t.elapsed().as_secs_f64();
    let m = mean(&fanos);
    let within = frac(&fanos.iter().map(|f| (0.9..=1.1).contains(f)).collect::<Vec<_>>());
    let pass = (0.97..=1.03).contains(&m) && within >= 0.95 && secs <= 120.0;
    // a window of w binary steps holds Binomial(w, lambda) spikes: F = 1 - lambda
    let predicted = 1.0 - lambda;
    let near = frac(&fanos.iter().map(|f| (f - predicted).abs() <= 0.1).collect::<Vec<_>>());
    let matches = (m - predicted).abs() <= 0.01 && near >= 0.95;
    Outcome {
        pass,
        detail: format!("mean F {m:.4}, per-seed in [0.9, 1.1]: {:.1}%, {secs:.1}s", 100.0 * within),
        unattainable: Some((
            format!(
                "binary trains have F = 1 - lambda = {predicted:.2}; observed mean {m:.4}, {:.1}% within 0.1",
                100.0 * near
            ),
            matches,
        )),
    }
}

// 2. Size and power of the battery.
fn c2() -> Outcome {
    let t = Instant::now();
    let fano_keep = Exec::Parallel.map_range(2000, |i| {
        let c = simulate_counts(0.3, 10_000, derive_seed(0xc2f, i as u64)).unwrap();
        let wc = WindowedCounts::from_counts(&c.counts, 100).unwrap();
        let f = fano_factor(&wc).unwrap();
        !fano_gamma_test(f, wc.n_windows()).unwrap().rejects_at(0.05)
    });
    let binary_keep = Exec::Parallel.map_range(2000, |i| {
        let tr = simulate(0.3, 10_000, derive_seed(0xc2f, i as u64)).unwrap();
        let wc = window_counts(&tr, 100).unwrap();
        !fano_gamma_test(fano_factor(&wc).unwrap(), wc.n_windows()).unwrap().rejects_at(0.05)
    });
    let lb_reject = Exec::Parallel.map_range(2000, |i| {
        let tr = simulate(0.3, 10_000, derive_seed(0xc2b, i as u64)).unwrap();
        ljung_box(&tr.as_f64(), 10).unwrap().rejects_at(0.05)
    });
    let adf_iid = Exec::Parallel.map_range(500, |i| {
        let tr = simulate(0.3, 1000, derive_seed(0xc2a, i as u64)).unwrap();
        adf_test(&tr.as_f64(), 0).unwrap().rejects_unit_root(0.05)
    });
    let adf_walk = Exec::Parallel.map_range(500, |i| {
        let mut r = seeded(derive_seed(0xc2c, i as u64));
        let mut y = 0.0;
        let walk: Vec<f64> = (0..1000)
            .map(|_| {
                y += if r.random::<bool>() { 1.0 } else { -1.0 };
                y
            })
            .collect();
        !adf_test(&walk, 0).unwrap().rejects_unit_root(0.05)
    });
    let secs = t.elapsed().as_secs_f64();
    let (fk, lb, ai, aw) = (frac(&fano_keep), frac(&lb_reject), frac(&adf_iid), frac(&adf_walk));
    let pass = fk >= 0.90 && (0.03..=0.07).contains(&lb) && ai >= 0.95 && aw >= 0.90 && secs <= 300.0;
    Outcome::new(
        pass,
        format!(
            "fano non-rejection {:.1}% (Poisson counts; binary trains {:.1}%), LB rejection {:.2}%, \
             ADF rejects iid {:.1}%, keeps walks {:.1}%, {secs:.1}s",
            100.0 * fk,
            100.0 * frac(&binary_keep),
            100.0 * lb,
            100.0 * ai,
            100.0 * aw
        ),
    )
}

// 3. Superposition and thinning.
fn c3() -> Outcome {
    let mut additive = true;
    let mut conserved = true;
    let mut worst: f64 = 0.0;
    for i in 0..100u64 {
        let a = simulate(0.2, 10_000, derive_seed(0xc3a, i)).unwrap();
        let b = simulate(0.35, 10_000, derive_seed(0xc3b, i)).unwrap();
        let (fa, fb) = (fit_rate(&a).unwrap(), fit_rate(&b).unwrap());
        let (ca, cb) = (CountSequence::from(&a), CountSequence::from(&b));
        let s = superpose(&ca, &cb).unwrap();
        additive &= s.counts.iter().zip(ca.counts.iter().zip(&cb.counts)).all(|(s, (x, y))| *s == x + y);
        additive &= s.total() == a.spike_count() + b.spike_count();
        additive &= (s.rate().unwrap() - (fa.lambda + fb.lambda)).abs() < 1e-12;

        let (rate, p) = (0.5, 0.3);
        let c = simulate_counts(rate, 10_000, derive_seed(0xc3c, i)).unwrap();
        let (x, y) = decompose(&c, p, derive_seed(0xc3d, i)).unwrap();
        conserved &= (0..c.len()).all(|t| x.counts[t] + y.counts[t] == c.counts[t]);
        for (part, share) in [(&x, p), (&y, 1.0 - p)] {
            let r = part.rate().unwrap();
            worst = worst.max((r - share * rate).abs()).max((r - share * c.rate().unwrap()).abs());
        }
    }
    Outcome::new(
        additive && conserved && worst <= 0.02,
        format!("additive {additive}, conserved {conserved}, worst rate error {worst:.4} over 100 seeds"),
    )
}

fn generic(spec: &DenseNetSpec, seed: u64) -> Params {
    let mut p = init_network(spec, seed);
    let mut r = seeded(derive_seed(seed, 1));
    for l in &mut p.layers {
        for b in &mut l.biases {
            *b = r.random_range(-0.1..0.1);
        }
    }
    p
}

fn tree_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(dir).unwrap().display().to_string();
                out.push((rel, std::fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

// 4. Gradients, freezing and determinism.
fn c4() -> Outcome {
    let matrix: [&[usize]; 6] =
        [&[4, 3, 10], &[6, 16, 10], &[5, 8, 6, 10], &[64, 32, 10], &[256, 16, 10], &[256, 128, 10]];
    let mut worst: f64 = 0.0;
    for (k, widths) in matrix.iter().enumerate() {
        let spec = DenseNetSpec::new(widths.to_vec()).unwrap();
        let p = generic(&spec, 40 + k as u64);
        let mut r = seeded(derive_seed(0xc4, k as u64));
        let x: Vec<f64> = (0..8 * widths[0]).map(|_| r.random::<f64>()).collect();
        let y: Vec<usize> = (0..8).map(|_| r.random_range(0..10)).collect();
        worst = worst.max(gradient_check(&p, &x, &y, 1e-5, k as u64).unwrap());
    }

    let (train_d, test_d) = make_synthetic_splits(40, 10, 20, 0.2, 4).unwrap();
    let spec = DenseNetSpec::new(vec![20, 12, 8, 10]).unwrap();
    let init = init_network(&spec, 1);
    let cfg = TrainConfig { epochs: 3, batch_size: 32, seed: 2, ..Default::default() };
    let (trained, _) = train(init.clone(), &train_d, &cfg, &FreezeMask::last(3, 2)).unwrap();
    let (h0, h1) = (init.layer_hashes(), trained.layer_hashes());
    let mut frozen_ok = h0[0] == h1[0] && h0[1] != h1[1] && h0[2] != h1[2];
    let data = Splits { train: train_d, test: test_d };
    let rc = RecipeConfig { train: cfg, memorize_epochs: 2 };
    let mem = run_condition(Condition::MemRandomLast, &spec, &rc, &data, 5, None).unwrap();
    frozen_ok &= mem.params.layer_hashes()[0] == init_network(&spec, derive_seed(5, 0)).layer_hashes()[0];

    // identical manifests -> identical bytes, also across sequential / parallel
    let base = [
        ("seed", "3".to_string()),
        ("widths", "8, 12".into()),
        ("seeds", "2".into()),
        ("dim", "16".into()),
        ("n_train_per_class", "30".into()),
        ("n_test_per_class", "25".into()),
        ("epochs", "2".into()),
        ("memorize_epochs", "2".into()),
    ];
    let root = scratch("determinism");
    let mut trees = Vec::new();
    for (name, parallel) in [("a", "true"), ("b", "true"), ("c", "false")] {
        let mut pairs = base.to_vec();
        pairs.push(("parallel", parallel.into()));
        let o = ExperimentOptions::from_settings(&settings("experiment", &pairs)).unwrap();
        let dir = root.join(name);
        cmd_experiment(&o, &dir, false).unwrap();
        let rep = root.join(format!("{name}.report.json"));
        cmd_report(&dir, &rep, false).unwrap();
        let mut t = tree_bytes(&dir);
        t.retain(|(p, _)| p != "config.json"); // records the parallel flag itself
        t.push(("report".into(), std::fs::read(&rep).unwrap()));
        trees.push(t);
    }
    let deterministic = trees[0] == trees[1] && trees[0] == trees[2];
    let files = trees[0].len();

    Outcome::new(
        worst <= 1e-4 && frozen_ok && deterministic,
        format!(
            "worst gradient rel. error {worst:.2e} over {} nets, frozen hashes {frozen_ok}, \
             {files} output files byte-identical across reruns and seq/par: {deterministic}",
            matrix.len()
        ),
    )
}

fn desk_sweep() -> (SweepReport, PathBuf, f64) {
    let dir = scratch("desk-sweep");
    let o = ExperimentOptions::from_settings(&settings("experiment", &[("seed", "1".into())])).unwrap();
    let t = Instant::now();
    cmd_experiment(&o, &dir, true).unwrap();
    let secs = t.elapsed().as_secs_f64();
    (report(&dir).unwrap(), dir, secs)
}

// 5. Generalize vs MemRandomLast ordering on every cell and split.
fn c5(r: &SweepReport, secs: f64) -> Outcome {
    let checks: Vec<_> = r.ordering.iter().filter(|o| o.memorization_condition == "MemRandomLast").collect();
    let held = checks.iter().filter(|o| o.holds).count();
    let cells: std::collections::BTreeSet<_> = checks.iter().map(|o| (o.width, o.seed)).collect();
    let others = r.ordering.iter().filter(|o| o.memorization_condition != "MemRandomLast");
    let (oh, on) = others.fold((0, 0), |(h, n), o| (h + o.holds as usize, n + 1));
    Outcome::new(
        held == checks.len() && cells.len() == 12 && checks.len() == 24 && secs <= 900.0,
        format!(
            "{held}/{} cell-splits hold over {} (width, seed) cells, {secs:.0}s (MemRetrainLast: {oh}/{on})",
            checks.len(),
            cells.len()
        ),
    )
}

// 6. Untrained networks fire about half the time.
fn c6(r: &SweepReport) -> Outcome {
    let (train, test) = make_synthetic_splits(300, 100, 256, 0.3, 1).unwrap();
    let data = Splits { train, test };
    let mut u = seeded(0xc6);
    let uniform =
        Dataset::new((0..1000 * 256).map(|_| u.random::<f64>()).collect(), vec![0; 1000], 256, "uniform", "test")
            .unwrap();
    let mfr = |params: &Params, d: &Dataset| {
        let (_, tr) = forward_capture(params, d.inputs(), 0, TraceMeta::default()).unwrap();
        mean(&binarize(&tr, 0.0).unwrap().firing_rates())
    };
    let mut all_ok = true;
    let mut parts = Vec::new();
    let mut singles = Vec::new();
    for width in [16, 32, 64, 128] {
        let spec = DenseNetSpec::mlp(256, width).unwrap();
        let per_net: Vec<(f64, f64)> = Exec::Parallel.map_range(20, |s| {
            let a =
                run_condition(Condition::Random, &spec, &RecipeConfig::default(), &data, 100 + s as u64, None).unwrap();
            (mfr(&a.params, &data.test), mfr(&a.params, &uniform))
        });
        let m_data = mean(&per_net.iter().map(|p| p.0).collect::<Vec<_>>());
        let m_unif = mean(&per_net.iter().map(|p| p.1).collect::<Vec<_>>());
        all_ok &= (0.4..=0.6).contains(&m_data) && (0.4..=0.6).contains(&m_unif);
        singles.extend(per_net.iter().flat_map(|p| [p.0, p.1]).map(|v| (0.4..=0.6).contains(&v)));
        parts.push(format!("w{width} {m_data:.3}/{m_unif:.3}"));
    }
    let sweep: Vec<String> = r
        .means
        .iter()
        .filter(|(k, _)| k.ends_with("/Random"))
        .map(|(k, v)| format!("{} {:.3}", k.trim_end_matches("/Random"), v.mfr))
        .collect();
    Outcome::new(
        all_ok,
        format!(
            "mean MFR over 20 inits (data/uniform): {}; single nets in band {:.0}%; sweep Random: {}",
            parts.join(", "),
            100.0 * frac(&singles),
            sweep.join(", ")
        ),
    )
}

// 7. Train and test traces are indistinguishable after Bonferroni.
fn c7(r: &SweepReport) -> Outcome {
    let f = r.test_train_similar_fraction.unwrap_or(0.0);
    Outcome::new(
        f >= 0.95,
        format!(
            "{}/{} {:?} pairs non-significant at alpha/m = {:.3e} (m = {})",
            r.test_train_similar,
            r.test_train_pairs,
            PairKind::TestTrain,
            r.threshold,
            r.comparisons
        ),
    )
}

// 8. Drop-then-stabilize of the monitored firing rate.
fn c8() -> Outcome {
    let dir = scratch("monitor");
    let t = Instant::now();
    let mut passing = 0;
    let mut parts = Vec::new();
    for seed in [1u64, 2, 3] {
        let o = MonitorOptions::from_settings(&settings("monitor", &[("seed", seed.to_string())])).unwrap();
        let path = dir.join(format!("monitor_{seed}.csv"));
        cmd_monitor(&o, &path, true).unwrap();
        let rows = monitor_rows_from_csv(&std::fs::read_to_string(&path).unwrap()).unwrap();
        let mem = rows.iter().filter(|r| r.split == "train" && r.phase == Phase::Memorize).count();
        let bpe = mem / o.config.memorize_epochs;
        let mut ok = true;
        for split in ["train", "test"] {
            let c = curve_shape(&rows, split, 5, bpe).unwrap();
            ok &= c.drop_then_stabilize();
            parts.push(format!(
                "s{seed}/{split} {:.3}->{:.3} sd {:.3}->{:.4}",
                c.before, c.after, c.first_epoch_std, c.final_epoch_std
            ));
        }
        passing += ok as usize;
    }
    Outcome::new(
        passing >= 2,
        format!("{passing}/3 seeds on both splits, {:.0}s; {}", t.elapsed().as_secs_f64(), parts.join(", ")),
    )
}

fn fixture(name: &str) -> Value {
    let p = format!("{}/../core/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

/// Kolmogorov tail via the theta-function series.
fn q_theta(lambda: f64) -> f64 {
    let pi2 = std::f64::consts::PI.powi(2);
    let s: f64 = (1..200).map(|k| (-((2 * k - 1) as f64).powi(2) * pi2 / (8.0 * lambda * lambda)).exp()).sum();
    1.0 - (2.0 * std::f64::consts::PI).sqrt() / lambda * s
}

// 9. Independent reference values.
fn c9() -> Outcome {
    let pearson = fixture("pearson.json");
    let cases = pearson.as_array().unwrap();
    let mut pe: f64 = 0.0;
    for c in cases {
        let r = combine_pvalues_pearson(&floats(&c["p"])).unwrap();
        let st = c["statistic"].as_f64().unwrap();
        pe = pe
            .max((r.statistic - st).abs() / st.abs().max(1.0))
            .max((r.p_value - c["p_value"].as_f64().unwrap()).abs());
    }
    let ks = fixture("ks.json");
    let mut ke: f64 = 0.0;
    for c in ks["kolmogorov_q"].as_array().unwrap() {
        let x = c["lambda"].as_f64().unwrap();
        ke = ke.max((kolmogorov_q(x) - c["q"].as_f64().unwrap()).abs()).max((kolmogorov_q(x) - q_theta(x)).abs());
    }
    for c in ks["two_sample"].as_array().unwrap() {
        let r = ks_two_sample(&floats(&c["a"]), &floats(&c["b"])).unwrap();
        ke = ke.max((r.p_value - c["p_value"].as_f64().unwrap()).abs());
    }
    let crit = &fixture("adf.json")["asymptotic_constant_only"];
    let adf_exact = ADF_CRITICAL_CONSTANT
        .iter()
        .zip(["1%", "5%", "10%"])
        .all(|((_, tau), k)| *tau == (crit[k].as_f64().unwrap() * 100.0).round() / 100.0);
    Outcome::new(
        cases.len() >= 100 && pe <= 1e-8 && ke <= 1e-6 && adf_exact,
        format!(
            "Pearson worst {pe:.1e} on {} vectors, KS worst {ke:.1e}, ADF -3.43/-2.86/-2.57 exact: {adf_exact}",
            cases.len()
        ),
    )
}

fn main() {
    let only: Option<Vec<u8>> =
        std::env::var("ACCEPTANCE_ONLY").ok().map(|v| v.split(',').filter_map(|s| s.trim().parse().ok()).collect());
    let want = |id: u8| only.as_ref().is_none_or(|o| o.contains(&id));

    let mut results: Vec<(u8, &str, Outcome, f64)> = Vec::new();
    let mut timed = |id: u8, name: &'static str, f: &mut dyn FnMut() -> Outcome| {
        if want(id) {
            let t = Instant::now();
            let o = f();
            let secs = t.elapsed().as_secs_f64();
            let verdict = if o.pass { "PASS" } else { "FAIL" };
            println!("criterion {id} {verdict}: {name}: {}", o.detail);
            if let Some((note, matched)) = &o.unattainable {
                println!(
                    "  unattainable as stated; analysis {}: {note}",
                    if *matched { "confirmed" } else { "NOT confirmed" }
                );
            }
            results.push((id, name, o, secs));
        }
    };

    timed(1, "Fano factor of simulated trains near 1", &mut c1);
    timed(2, "battery size and power", &mut c2);
    timed(3, "superposition and decomposition", &mut c3);
    timed(4, "gradients, frozen layers, determinism", &mut c4);
    let sweep = (want(5) || want(6) || want(7)).then(desk_sweep);
    if let Some((r, dir, secs)) = &sweep {
        timed(5, "generalize vs memorize ordering", &mut || c5(r, *secs));
        timed(6, "random-init firing rate near 0.5", &mut || c6(r));
        timed(7, "train/test indistinguishable", &mut || c7(r));
        let _ = std::fs::remove_dir_all(dir);
    }
    timed(8, "monitoring drop then stabilize", &mut c8);
    timed(9, "oracle cross-checks", &mut c9);

    let passed = results.iter().filter(|r| r.2.pass).count();
    println!("acceptance: {passed}/{} criteria PASS", results.len());
    let unexpected: Vec<u8> = results
        .iter()
        .filter(|(_, _, o, _)| match &o.unattainable {
            Some((_, matched)) => !matched,
            None => !o.pass,
        })
        .map(|r| r.0)
        .collect();
    if !unexpected.is_empty() {
        println!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
