use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_graphon-commons"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let out = run(&full);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)));
    (out.status.code().unwrap(), v)
}

fn scratch(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("graphon-commons-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn two_triangles_on_the_pair_graphon() {
    let (code, v) = json(&["density", "2*K3", "diag:1/3"]);
    assert_eq!(code, 0);
    assert_eq!(v["mono"]["value"], "53/729");
    assert_eq!(v["t"]["value"], "49/729");
    assert_eq!(v["t_complement"]["value"], "4/729");
}

#[test]
fn graph_json_input_matches_expression() {
    let p = scratch("k3.json", r#"{"vertices":3,"edges":[[0,1],[1,2],[0,2]]}"#);
    let (_, from_file) = json(&["density", p.to_str().unwrap(), "zy:1/4,1/2"]);
    let (_, from_expr) = json(&["density", "K3", "zy:1/4,1/2"]);
    assert_eq!(from_file, from_expr);
}

#[test]
fn input_errors_exit_2() {
    assert_eq!(run(&["density", "K3+", "const:1/2"]).status.code(), Some(2));
    assert_eq!(run(&["density", "K3", "const:3/2"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "/nonexistent/problem.json"]).status.code(), Some(2));
}

#[test]
fn budget_overrun_exits_3() {
    let out = run(&["density", "K12", "turan:13"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));
}

#[test]
fn certificate_round_trip_and_replay() {
    let dir = std::env::temp_dir().join(format!("graphon-commons-cert-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cert = dir.join("cert.json");
    let out = run(&["verify", "two_triangles:2", "--strategy", "interval", "--out", cert.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    assert_eq!(v["verdict"]["status"], "holds");
    assert!(!v["records"].as_array().unwrap().is_empty());
    let (code, rep) = json(&["verify", cert.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(rep["ok"], true);
}

#[test]
fn tampered_certificate_fails_replay() {
    let dir = std::env::temp_dir().join(format!("graphon-commons-tamper-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cert = dir.join("cert.json");
    assert_eq!(run(&["verify", "two_triangles:1", "--out", cert.to_str().unwrap()]).status.code(), Some(0));
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    let recs = v["records"].as_array_mut().unwrap();
    let last = recs.len() - 1;
    recs[last]["margin"] = Value::from(1e6);
    std::fs::write(&cert, serde_json::to_string(&v).unwrap()).unwrap();
    assert_eq!(run(&["verify", cert.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn problem_without_floor_fails() {
    let p = scratch("p.json", r#"{"k":"2","ell":"3","g":{"kind":"power","m":"3"},"rho":{"kind":"zero"},"c":"2"}"#);
    let (code, v) = json(&["verify", p.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(v["verdict"]["status"], "fails_at");
}

#[test]
fn search_exit_codes() {
    assert_eq!(run(&["search", "K3", "--budget", "2000"]).status.code(), Some(1));
    let (code, v) = json(&["search", "W5", "--family", "turan"]);
    assert_eq!(code, 0);
    assert_eq!(v["best"]["kind"], "turan");
}

#[test]
fn classify_statuses() {
    let (code, v) = json(&["classify", "--k", "1", "--l", "1"]);
    assert_eq!(code, 0);
    assert_eq!(v["status"], "uncommon");
    let (code, v) = json(&["classify", "--k", "3", "--l", "5"]);
    assert_eq!(code, 0);
    assert_eq!(v["status"], "common");
    let (code, v) = json(&["classify", "--k", "4", "--l", "7"]);
    assert_eq!(code, 4);
    assert_eq!(v["status"], "unknown");
    let (code, v) = json(&["classify", "--k", "3", "--range"]);
    assert_eq!(code, 0);
    assert_eq!(v["common_max"], 5);
    assert_eq!(v["uncommon_min"], 6);
}

#[test]
fn tree_record() {
    let p = scratch("t.json", r#"{"tree_edges":[[0,1]],"vertex_labels":{"0":[0,1,2],"1":[0,1,2]},"edge_labels":{"0-1":[0]}}"#);
    let (code, v) = json(&["tree", p.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["edges"], 6);
    assert_eq!(v["gamma"], 0);
    assert_eq!(v["correlated"]["status"], "common");
}

#[test]
fn reproduce_single_entry() {
    let out = run(&["reproduce", "--id", "wheel-chromatic-test"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("1/243"));
    assert_eq!(run(&["reproduce", "--id", "no-such-entry"]).status.code(), Some(2));
}
