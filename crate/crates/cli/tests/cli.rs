use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mdpdec"))
}

fn three_state() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/three-state.json")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

/// Drops every `elapsed_millis` field.
fn strip_timing(v: &mut Value) {
    match v {
        Value::Object(map) => {
            map.remove("elapsed_millis");
            map.values_mut().for_each(strip_timing);
        }
        Value::Array(items) => items.iter_mut().for_each(strip_timing),
        _ => {}
    }
}

#[test]
fn three_state_scheme2_converges() {
    let o = run(&["solve", "--builtin", "three-state", "--opt", "sup", "--scheme", "2", "--epsilon", "0.001"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["result"]["status"], "Converged");
    assert!((v["result"]["value"].as_f64().unwrap() - 0.5).abs() <= 1e-3);
}

#[test]
fn model_file_solves_like_builtin() {
    let path = three_state();
    let o = run(&["solve", "--model", path.to_str().unwrap(), "--opt", "sup", "--epsilon", "0.001"]);
    assert_eq!(o.status.code(), Some(0));
    assert!((json(&o)["result"]["value"].as_f64().unwrap() - 0.5).abs() <= 1e-3);
}

#[test]
fn right_ladder_exits_3_with_flat_upper_trace() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("mr.csv");
    let o = run(&[
        "solve", "--builtin", "mr", "--opt", "sup", "--scheme", "2", "--epsilon", "0.1", "--max-horizon", "200",
        "--trace", trace.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3));
    let csv = std::fs::read_to_string(&trace).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n,lower,upper,states_explored,elapsed_millis"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 200);
    for row in rows {
        let upper: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
        assert_eq!(upper, 1.0);
    }
}

#[test]
fn check_reports_the_open_end_component() {
    let o = run(&["check", "--model", three_state().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "not sup-decisive: MEC {s0} exits via beta");
}

#[test]
fn avoid_sets() {
    let path = three_state();
    let sup = run(&["avoid", "--model", path.to_str().unwrap(), "--opt", "sup"]);
    assert_eq!(json(&sup), serde_json::json!(["bad"]));
    let inf = run(&["avoid", "--model", path.to_str().unwrap(), "--opt", "inf"]);
    assert_eq!(json(&inf), serde_json::json!(["s0", "bad"]));
}

#[test]
fn mec_listing() {
    let o = run(&["mec", "--model", three_state().to_str().unwrap()]);
    let v = json(&o);
    assert_eq!(v[0]["states"], serde_json::json!(["s0"]));
    assert_eq!(v[0]["actions"]["s0"], serde_json::json!(["alpha"]));
    assert_eq!(v.as_array().unwrap().len(), 3);
}

#[test]
fn solve_finite_exact_and_float() {
    let path = three_state();
    let e = json(&run(&["solve-finite", "--model", path.to_str().unwrap(), "--opt", "sup", "--exact"]));
    assert_eq!(e["value"], "1/2");
    assert_eq!(e["witness"]["s0"], "beta");
    let f = json(&run(&["solve-finite", "--model", path.to_str().unwrap(), "--opt", "sup", "--tol", "1e-9"]));
    let (lo, hi) = (f["lower"].as_f64().unwrap(), f["upper"].as_f64().unwrap());
    assert!(lo <= 0.5 && 0.5 <= hi && hi - lo < 1e-9);
}

#[test]
fn seeded_runs_are_reproducible() {
    let args = [
        "solve", "--builtin", "walk", "--param", "p=1/3", "--param", "q=1/2", "--opt", "inf", "--scheme", "1",
        "--epsilon", "0.01", "--seed", "42",
    ];
    let mut a = json(&run(&args));
    let mut b = json(&run(&args));
    strip_timing(&mut a);
    strip_timing(&mut b);
    assert_eq!(a, b);
    let sim = [
        "simulate", "--builtin", "walk", "--param", "p=2/3", "--always", "alpha", "--opt", "inf", "--trials", "2000",
        "--horizon", "500", "--seed", "7", "--path",
    ];
    assert_eq!(stdout(&run(&sim)), stdout(&run(&sim)));
}

#[test]
fn simulate_finite_scheduler_file() {
    let dir = tempfile::tempdir().unwrap();
    let sched = dir.path().join("sched.json");
    std::fs::write(&sched, r#"{"s0": "beta"}"#).unwrap();
    let o = run(&[
        "simulate", "--model", three_state().to_str().unwrap(), "--scheduler", sched.to_str().unwrap(), "--trials",
        "100", "--horizon", "10",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json(&o)["estimate"]["estimate"], 1.0);
}

#[test]
fn usage_errors() {
    for args in [
        &["solve", "--builtin", "three-state", "--opt", "sup", "--epsilon", "2"][..],
        &["solve", "--opt", "sup"][..],
        &["solve", "--builtin", "walk", "--param", "p=5/3", "--opt", "inf"][..],
        &["solve", "--builtin", "three-state", "--opt", "sup", "--bogus"][..],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(o.stdout.is_empty());
    }
}

#[test]
fn bad_model_file_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    std::fs::write(
        &path,
        r#"{"states":["s","g"],"initial":"s","goal":"g","transitions":[{"from":"s","action":"a","to":[["g","0.9"]]}]}"#,
    )
    .unwrap();
    let o = run(&["solve-finite", "--model", path.to_str().unwrap(), "--opt", "sup"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("distribution"));
}

#[test]
fn repro_named_and_unknown() {
    let o = run(&["repro", "three-state-scheme1-stuck", "lcs-bounded-cap"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("PASS three-state-scheme1-stuck"));
    assert!(text.contains("PASS lcs-bounded-cap"));
    let o = run(&["repro", "no-such-scenario"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn repro_all_passes_and_writes_scoped_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["repro", "--all", "--out-dir", dir.path().to_str().unwrap()]);
    let text = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{text}");
    assert!(!text.contains("FAIL"));
    assert!(dir.path().join("walk-inf-decisive-1.csv").exists());
    assert!(dir.path().join("walk-inf-decisive-2.json").exists());
    assert!(dir.path().join("walk-monte-carlo.json").exists());
}
