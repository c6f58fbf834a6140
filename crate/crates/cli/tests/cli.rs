use std::path::Path;
use std::process::{Command, Output};

fn qpolar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qpolar")).args(args).output().expect("spawn qpolar")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn design_n8(dir: &Path) -> String {
    let path = dir.join("n8.json");
    let path = path.to_str().unwrap().to_owned();
    let out = qpolar(&["design", "--n-exp", "3", "--p", "0.05", "--k", "4", "--trials", "20000", "--out", &path]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    path
}

#[test]
fn design_writes_code_json() {
    let dir = tempfile::tempdir().unwrap();
    let path = design_n8(dir.path());
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(json["n_exp"], 3);
    assert_eq!(json["frozen_set"], serde_json::json!([1, 2, 3, 5]));
    assert_eq!(json["design_p"], 0.05);
}

#[test]
fn full_rate_design_has_no_frozen_indices() {
    let out = qpolar(&["design", "--n-exp", "3", "--p", "0.1", "--k", "8", "--trials", "100"]);
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["frozen_set"], serde_json::json!([]));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["design", "--n-exp", "0", "--p", "0.1", "--k", "1"][..],
        &["design", "--n-exp", "3", "--p", "0.7", "--k", "1"],
        &["design", "--n-exp", "3", "--p", "0.1"],
        &["design", "--n-exp", "3", "--p", "0.1", "--k", "9"],
        &["trace", "--n-exp", "3"],
        &["trace", "--p", "1.5"],
        &["frobnicate"],
    ] {
        let out = qpolar(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn trace_prints_exact_headlines() {
    let out = qpolar(&["trace", "--p", "0.1", "--frozen", "1,3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("9/50 = 0.180000000000"));
    assert!(text.contains("369/1250 = 0.295200000000"));
    assert!(text.contains("81/1762 = 0.045970488082"));
    assert!(text.contains("u2 L_F=[1] h=[0,0]"));
}

#[test]
fn sweep_csv_shape_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let spec = design_n8(dir.path());
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let r = qpolar(&["sweep", "--spec", &spec, "--points", "5", "--trials", "500", "--out", out.to_str().unwrap()]);
        assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(reader.headers().unwrap().len(), 13);
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 15);
    assert!(rows.iter().all(|r| r.len() == 13));
}

#[test]
fn empty_grid_is_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let spec = design_n8(dir.path());
    let out = qpolar(&["sweep", "--spec", &spec, "--points", "0"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().count(), 1);
}

#[test]
fn sweep_rejects_unknown_protocol() {
    let dir = tempfile::tempdir().unwrap();
    let spec = design_n8(dir.path());
    let out = qpolar(&["sweep", "--spec", &spec, "--protocols", "turbo"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exact_mode_above_cap_is_a_resource_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("n16.json");
    let r = qpolar(&["design", "--n-exp", "4", "--p", "0.05", "--k", "8", "--trials", "1000", "--out", path.to_str().unwrap()]);
    assert!(r.status.success());
    let out = qpolar(&["run", "--spec", path.to_str().unwrap(), "--p", "0.05", "--mode", "quantum-exact"]);
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn run_prints_outcome_json() {
    let dir = tempfile::tempdir().unwrap();
    let spec = design_n8(dir.path());
    let out = qpolar(&["run", "--spec", &spec, "--p", "0.05", "--mode", "quantum-exact", "--random-basis"]);
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((json["success_prob"].as_f64().unwrap() - 0.9556194578125).abs() < 1e-10);
    assert!(json["fidelity"].as_f64().unwrap() > 1.0 - 1e-9);
    assert_eq!(json["qubits_sent"], 4);
    assert_eq!(json["mode"], "quantum-exact");
}

#[test]
fn verify_negative_control_exits_3() {
    let out = qpolar(&["verify", "--quantum-cap", "0", "--inject-fault"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stdout(&out).contains("FAIL round-trip"));
}
