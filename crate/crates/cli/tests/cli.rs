//! Drives the `spikescope` binary end to end: exit codes, overwrite
//! protection, schema validity of every JSON file and determinism.

use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;
use spikescope::indicators::{gap_rows_from_csv, gap_rows_to_csv};
use spikescope::netlab::monitor::{monitor_rows_from_csv, monitor_rows_to_csv, Phase};
use spikescope::trace_io::load_spikes;

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("spikescope-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_spikescope")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8_lossy(&out.stderr).into_owned())
}

fn ok(args: &[&str]) {
    let (code, err) = run(args);
    assert_eq!(code, 0, "{args:?}: {err}");
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn assert_schema(schema: &str, doc: &Path) {
    let path = format!("{}/../../schemas/{schema}.schema.json", env!("CARGO_MANIFEST_DIR"));
    let schema = read_json(Path::new(&path));
    let v = jsonschema::validator_for(&schema).unwrap();
    let inst = read_json(doc);
    let errors: Vec<String> = v.iter_errors(&inst).map(|e| format!("{} at {}", e, e.instance_path)).collect();
    assert!(errors.is_empty(), "{} does not match {schema}: {errors:?}", doc.display());
}

const SMALL: &str = "\
seed = 3
[experiment]
widths = 8, 12
seeds = 2
dim = 16
n_train_per_class = 30
n_test_per_class = 25
epochs = 2
memorize_epochs = 2
[monitor]
width = 8
dim = 16
n_train_per_class = 30
n_test_per_class = 25
epochs = 1
memorize_epochs = 1
";

fn manifest(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("manifest.txt");
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn simulate_exit_codes_and_overwrite_protection() {
    let d = scratch("simulate");
    let out = d.join("sim.csv");
    ok(&["simulate", "--lambda", "0.3", "--n", "500", "--seed", "1", "-o", s(&out)]);
    let first = std::fs::read(&out).unwrap();
    assert_eq!(run(&["simulate", "--lambda", "0.3", "--n", "500", "--seed", "2", "-o", s(&out)]).0, 2);
    assert_eq!(std::fs::read(&out).unwrap(), first, "refused write must leave the file alone");
    ok(&["simulate", "--lambda", "0.3", "--n", "500", "--seed", "2", "-o", s(&out), "--force"]);
    assert_ne!(std::fs::read(&out).unwrap(), first);

    assert_eq!(run(&["simulate", "--lambda", "1.3", "--n", "10", "--seed", "1", "-o", s(&d.join("x.csv"))]).0, 2);
    assert_eq!(run(&["simulate", "--lambda", "0.3", "--n", "10", "-o", s(&d.join("y.csv"))]).0, 2);
    assert!(!d.join("x.csv").exists());

    let zeros = d.join("zeros.csv");
    ok(&["simulate", "--lambda", "0", "--n", "300", "--nodes", "3", "--seed", "4", "-o", s(&zeros)]);
    assert!(load_spikes(&zeros).unwrap().spikes().iter().all(|&b| b == 0));
}

#[test]
fn analyze_recovers_simulated_rate_and_binary_fano() {
    let d = scratch("analyze");
    let sim = d.join("sim.csv");
    ok(&["simulate", "--lambda", "0.3", "--n", "50000", "--nodes", "32", "--seed", "11", "-o", s(&sim)]);
    let rep = d.join("report.json");
    ok(&["analyze", s(&sim), "-o", s(&rep)]);
    assert_schema("analysis_report", &rep);
    let r = read_json(&rep);
    let ind = &r["layers"][0]["indicators"];
    for fr in ind["fr_per_node"].as_array().unwrap() {
        assert!((fr.as_f64().unwrap() - 0.3).abs() < 0.02);
    }
    // var of a binary count window is w * lambda * (1 - lambda)
    assert!((ind["mf"].as_f64().unwrap() - 0.7).abs() < 0.03);
    assert!(r["similarity"].is_null());
}

#[test]
fn analyze_dead_layer_has_no_nan() {
    let d = scratch("dead");
    let sim = d.join("dead.csv");
    ok(&["simulate", "--lambda", "0", "--n", "400", "--nodes", "3", "--seed", "1", "-o", s(&sim)]);
    let rep = d.join("r.json");
    ok(&["analyze", s(&sim), "-o", s(&rep)]);
    assert_schema("analysis_report", &rep);
    let text = std::fs::read_to_string(&rep).unwrap();
    assert!(!text.contains("NaN"));
    assert_eq!(read_json(&rep)["layers"][0]["layer"]["excluded_node_count"], 3);
}

#[test]
fn analyze_missing_input_is_a_data_error() {
    let d = scratch("missing");
    assert_eq!(run(&["analyze", s(&d.join("nope.csv")), "-o", s(&d.join("r.json"))]).0, 3);
}

#[test]
fn unknown_manifest_key_is_a_usage_error() {
    let d = scratch("unknown");
    let m = manifest(&d, "seed = 1\nlambda = 0.2\nn = 100\nlamda = 0.3\n");
    assert_eq!(run(&["simulate", "-c", s(&m), "-o", s(&d.join("o.csv"))]).0, 2);
    let m = manifest(&d, "[simulate]\nseed = 1\nlambda = 0.2\nn = 100\nnodez = 3\n");
    assert_eq!(run(&["simulate", "-c", s(&m), "-o", s(&d.join("o.csv"))]).0, 2);
    let m = manifest(&d, "[simulate]\nseed = 1\nlambda = 0.2\nn = 100\n");
    ok(&["simulate", "-c", s(&m), "-o", s(&d.join("o.csv"))]);
}

#[test]
fn experiment_outputs_validate_round_trip_and_repeat_byte_for_byte() {
    let d = scratch("experiment");
    let m = manifest(&d, SMALL);
    let (a, b) = (d.join("a"), d.join("b"));
    ok(&["experiment", "-c", s(&m), "-o", s(&a)]);
    ok(&["experiment", "-c", s(&m), "-o", s(&b)]);

    for (schema, file) in [
        ("accuracy", "accuracy.json"),
        ("comparisons", "comparisons.json"),
        ("status", "status.json"),
        ("config", "config.json"),
    ] {
        assert_schema(schema, &a.join(file));
        assert_eq!(std::fs::read(a.join(file)).unwrap(), std::fs::read(b.join(file)).unwrap(), "{file}");
    }
    assert_eq!(read_json(&a.join("status.json"))["status"], "complete");
    assert_schema("history", &a.join("runs/w8_s3/Generalize/history.json"));
    assert!(a.join("runs/w12_s4/MemRandomLast/test_spikes.csv").exists());

    let gap = std::fs::read_to_string(a.join("gap.csv")).unwrap();
    assert_eq!(gap_rows_to_csv(&gap_rows_from_csv(&gap).unwrap()), gap);

    let (ra, rb) = (d.join("ra.json"), d.join("rb.json"));
    ok(&["report", "-i", s(&a), "-o", s(&ra)]);
    ok(&["report", "-i", s(&b), "-o", s(&rb)]);
    assert_schema("report", &ra);
    assert_eq!(std::fs::read(&ra).unwrap(), std::fs::read(&rb).unwrap());

    // rerunning into a finished directory needs --force
    assert_eq!(run(&["experiment", "-c", s(&m), "-o", s(&a)]).0, 2);

    // test/train spike files of one condition pair up with a symbol
    let run_dir = a.join("runs/w8_s3/Generalize");
    let rep = d.join("pair.json");
    ok(&["analyze", s(&run_dir.join("test_spikes.csv")), s(&run_dir.join("train_spikes.csv")), "-o", s(&rep)]);
    assert_schema("analysis_report", &rep);
    let sim = &read_json(&rep)["similarity"];
    assert_eq!(sim["pairs"][0]["pair"], "test_train");
    assert_eq!(sim["comparisons"], 1);
}

#[test]
fn report_refuses_incomplete_experiment() {
    let d = scratch("incomplete");
    std::fs::write(d.join("status.json"), "{\"status\": \"incomplete\"}\n").unwrap();
    assert_eq!(run(&["report", "-i", s(&d), "-o", s(&d.join("r.json"))]).0, 3);
}

#[test]
fn random_only_sweep_has_no_history_and_only_test_train_pairs() {
    let d = scratch("random-only");
    let m = manifest(&d, &SMALL.replace("[experiment]\n", "[experiment]\nconditions = Random\n"));
    let out = d.join("o");
    ok(&["experiment", "-c", s(&m), "-o", s(&out)]);
    assert!(!out.join("runs/w8_s3/Random/history.json").exists());
    let cmp = read_json(&out.join("comparisons.json"));
    for cell in cmp["cells"].as_array().unwrap() {
        for c in cell["comparisons"].as_array().unwrap() {
            assert_eq!(c["pair"], "test_train");
        }
    }
    let acc = read_json(&out.join("accuracy.json"));
    assert_eq!(acc["runs"].as_array().unwrap().len(), 4);
}

#[test]
fn monitor_phase_switches_at_the_boundary() {
    let d = scratch("monitor");
    let m = manifest(&d, SMALL);
    let out = d.join("m.csv");
    ok(&["monitor", "-c", s(&m), "-o", s(&out)]);
    let text = std::fs::read_to_string(&out).unwrap();
    let rows = monitor_rows_from_csv(&text).unwrap();
    assert_eq!(monitor_rows_to_csv(&rows), text);
    // 300 training rows, 10% held out -> 270 fitted rows -> 2 batches of 256
    let phase_at = |b: usize| rows.iter().find(|r| r.batch == b).unwrap().phase;
    assert_eq!(phase_at(0), Phase::Init);
    assert_eq!(phase_at(2), Phase::Generalize);
    assert_eq!(phase_at(3), Phase::Memorize);
    assert_eq!(rows.iter().map(|r| r.batch).max(), Some(4));
    assert_eq!(rows.len(), 10);
}

#[test]
fn zero_epoch_monitor_emits_only_the_initial_probe() {
    let d = scratch("monitor0");
    let m = manifest(&d, SMALL);
    let out = d.join("m.csv");
    ok(&["monitor", "-c", s(&m), "--seed", "5", "-o", s(&out)]);
    let text = std::fs::read_to_string(&out).unwrap();
    let edited = d.join("m0.txt");
    std::fs::write(&edited, SMALL.replace("epochs = 1\nmemorize_epochs = 1\n", "epochs = 0\nmemorize_epochs = 0\n"))
        .unwrap();
    let out0 = d.join("m0.csv");
    ok(&["monitor", "-c", s(&edited), "-o", s(&out0)]);
    let rows = monitor_rows_from_csv(&std::fs::read_to_string(&out0).unwrap()).unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.batch == 0 && r.phase == Phase::Init));
    assert!(text.lines().count() > 3);
}
