use std::io::Write;
use std::process::{Command, Output, Stdio};

use quickest::io::parse_flow;
use quickest::prelude::*;
use quickest::expansion::verify_flow;
use quickest::io::parse_instance;

const SINGLE_ARC: &str = r#"{
  "nodes": 2,
  "arcs": [{ "tail": 0, "head": 1, "capacity": 1, "transit": 2 }],
  "sources": [{ "node": 0, "supply": 3 }],
  "sinks": [{ "node": 1, "demand": 3 }]
}"#;

const INSTANCE_B: &str = r#"{
  "nodes": 3,
  "arcs": [
    { "tail": 0, "head": 2, "capacity": 2, "transit": 0 },
    { "tail": 1, "head": 2, "capacity": 1, "transit": 1 }
  ],
  "sources": [{ "node": 0, "supply": 5 }, { "node": 1, "supply": 1 }],
  "sinks": [{ "node": 2, "demand": 6 }]
}"#;

const UNREACHABLE: &str = r#"{
  "nodes": 2,
  "arcs": [{ "tail": 1, "head": 0, "capacity": 1, "transit": 1 }],
  "sources": [{ "node": 0, "supply": 1 }],
  "sinks": [{ "node": 1, "demand": 1 }]
}"#;

fn qtsp(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_qtsp"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn error_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stderr).unwrap()
}

#[test]
fn solve_prints_exact_and_decimal() {
    let out = qtsp(&["solve"], SINGLE_ARC);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[..2], ["5", "5.0"]);
}

#[test]
fn solve_and_oracle_agree() {
    for algo in ["simple", "jumps"] {
        let out = qtsp(&["solve", "--algo", algo], INSTANCE_B);
        assert_eq!(stdout(&out).lines().next(), Some("5/2"));
    }
    let out = qtsp(&["oracle"], INSTANCE_B);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().next(), Some("5/2"));
}

#[test]
fn solve_json_is_parseable() {
    let out = qtsp(&["solve", "--json", "--trace"], INSTANCE_B);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["theta_star"], "5/2");
}

#[test]
fn feas_reports_violated_set() {
    let out = qtsp(&["feas", "--theta", "4"], SINGLE_ARC);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("infeasible"), "{text}");
    assert!(text.contains("violated set: [0]"), "{text}");
    let out = qtsp(&["feas", "--theta", "5"], SINGLE_ARC);
    assert!(stdout(&out).starts_with("feasible"));
}

#[test]
fn extract_writes_valid_flow() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("flow.json");
    let out = qtsp(&["extract", "--output", path.to_str().unwrap()], INSTANCE_B);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let flow = parse_flow(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let instance = parse_instance(INSTANCE_B).unwrap();
    assert_eq!(verify_flow(&instance, &flow, &ratio(5, 2)), vec![]);
}

#[test]
fn trace_labels_iterations() {
    let out = qtsp(&["trace"], SINGLE_ARC);
    assert!(out.status.success());
    assert!(stdout(&out).contains("class=I"));
}

#[test]
fn bench_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("bench.csv");
    let env = dir.path().join("env.csv");
    let out = qtsp(
        &["bench", "--count", "3", "--csv", csv.to_str().unwrap(), "--envelope", env.to_str().unwrap()],
        "",
    );
    assert!(out.status.success());
    let text = std::fs::read_to_string(csv).unwrap();
    assert!(text.starts_with("seed,n,m,k,theta_star,iters_simple,iters_jumps,count_I1,count_I2,count_I3"));
    assert_eq!(text.lines().count(), 4);
    assert!(std::fs::read_to_string(env).unwrap().lines().count() > 1);
}

#[test]
fn generate_is_deterministic() {
    let args = ["generate", "--n", "6", "--m", "12", "--k", "4", "--seed", "1"];
    let a = qtsp(&args, "");
    let b = qtsp(&args, "");
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    parse_instance(&stdout(&a)).unwrap();
    let bad = qtsp(&["generate", "--n", "3", "--m", "4", "--k", "5"], "");
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn exit_codes() {
    let out = qtsp(&["solve"], UNREACHABLE);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(error_json(&out)["error"], "infeasible-forever");

    let out = qtsp(&["solve"], "{ \"nodes\": 2, ");
    assert_eq!(out.status.code(), Some(2));
    assert!(error_json(&out)["message"].as_str().unwrap().contains("line"));

    let negative = SINGLE_ARC.replace("\"capacity\": 1", "\"capacity\": -1");
    let out = qtsp(&["solve"], &negative);
    assert_eq!(out.status.code(), Some(2));

    let out = qtsp(&["extract", "--expansion-cap", "3"], SINGLE_ARC);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(error_json(&out)["error"], "cap-exceeded");
}
