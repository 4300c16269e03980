use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn locfin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_locfin")).args(args).output().expect("binary runs")
}

fn json(bytes: &[u8]) -> Value {
    serde_json::from_slice(bytes).expect("json output")
}

fn fixture(dir: &Path, name: &str, args: &[&str]) -> String {
    let mut a = vec!["generate-fixture"];
    a.extend_from_slice(args);
    let out = locfin(&a);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let path = dir.join(name);
    std::fs::write(&path, &out.stdout).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn components_report_shape() {
    let out = locfin(&["components", "--space", "fixture:five_point"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out.stdout);
    assert_eq!(v["command"], "components");
    assert!(v["elapsed_ms"].is_u64());
    assert_eq!(v["input_digest"].as_str().unwrap().len(), 64);
    assert_eq!(v["result"]["components"].as_array().unwrap().len(), 3);
}

#[test]
fn deterministic_reports_drop_timing() {
    let a = locfin(&["--deterministic", "zoom", "--space", "fixture:z_window:r=10"]);
    let b = locfin(&["--deterministic", "zoom", "--space", "fixture:z_window:r=10"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(json(&a.stdout).get("elapsed_ms").is_none());
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(locfin(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(locfin(&["distortion"]).status.code(), Some(2));
    assert_eq!(locfin(&["distortion", "--space", "x", "--edges-mode", "some"]).status.code(), Some(2));
}

#[test]
fn input_errors_exit_one_with_json() {
    let out = locfin(&["components", "--space", "/nonexistent/space.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    let v = json(&out.stderr);
    assert!(v["error"]["kind"].is_string());

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"kind": "points", "points": [[0,0],[0,0]]}"#).unwrap();
    let out = locfin(&["components", "--space", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out.stderr)["error"]["kind"], "Axiom", "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn disconnected_distortion_needs_components_flag() {
    let out = locfin(&["distortion", "--space", "fixture:five_point"]);
    assert_eq!(out.status.code(), Some(1));
    let out = locfin(&["--deterministic", "distortion", "--space", "fixture:five_point", "--components"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out.stdout);
    assert!(v["result"]["components"]["bound"].as_f64().unwrap() > 0.0);
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("report.json");
    let args = ["--deterministic", "symbolic-graph", "--space", "fixture:cycle:n=6"];
    let direct = locfin(&args);
    let mut with_out = vec!["--out", target.to_str().unwrap()];
    with_out.extend_from_slice(&args);
    let out = locfin(&with_out);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read(&target).unwrap(), direct.stdout);
    let leftovers = std::fs::read_dir(dir.path()).unwrap().count();
    assert_eq!(leftovers, 1);
}

#[test]
fn generated_fixtures_feed_commands() {
    let dir = tempfile::tempdir().unwrap();
    let space = fixture(dir.path(), "c5.json", &["cycle", "n=5"]);
    let circuit = dir.path().join("gen.json");
    std::fs::write(&circuit, r#"{"base": 0, "points": [0, 1, 2, 3, 4, 0]}"#).unwrap();
    let out = locfin(&["homotopy-search", "--space", &space, "--circuit", circuit.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out.stdout);
    assert_ne!(v["result"]["search"]["outcome"], "found", "{v}");
    assert_eq!(v["result"]["winding"]["cycle"].as_i64().map(i64::abs), Some(1), "{v}");

    let curve = fixture(dir.path(), "twelve.json", &["twelve_step"]);
    let out = locfin(&["jordan", "--curve", &curve]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out.stdout);
    assert!(v["result"]["rejected"].is_string(), "{v}");
    assert_eq!(v["result"]["simplicity_witness"]["j"], 6);

    let ring = fixture(dir.path(), "ring.json", &["ring3"]);
    let pgm = dir.path().join("ring.pgm");
    let out = locfin(&["jordan", "--curve", &ring, "--margin", "2", "--pgm", pgm.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(std::fs::read_to_string(&pgm).unwrap().starts_with("P2"));
}
