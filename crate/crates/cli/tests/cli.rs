//! End-to-end tests of the `misinfo` binary.

use std::io::Write;
use std::process::{Command, Output, Stdio};

const RUNNING_EXAMPLE: &str = r#"{
  "actual": {"players": 2, "strategies": [2, 2],
    "payoffs": [[[6,6],[2,7]],[[7,2],[1,1]]]},
  "subjective": [
    {"players": 2, "strategies": [2, 2],
     "payoffs": [[[2,2],[0,3]],[[3,0],[1,1]]]},
    {"players": 2, "strategies": [2, 2],
     "payoffs": [[[-1,1],[2,-2]],[[1,-1],[0,0]]]}
  ]
}"#;

fn run(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_misinfo"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary spawns");
    child
        .stdin
        .as_mut()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON on stdout")
}

#[test]
fn adapt_reports_running_example_statistics() {
    let out = run(&["adapt"], RUNNING_EXAMPLE);
    let v = stdout_json(&out);
    assert_eq!(v["lad"], 2);
    assert_eq!(v["unique_mgs"], 4);
    assert_eq!(v["naive_nodes"], 10);
    assert_eq!(v["leaves"], 3);
    assert_eq!(v["smes"], 1);
    let terminal = v["terminal"].as_array().unwrap();
    assert_eq!(
        serde_json::to_string(terminal).unwrap(),
        "[[[2,1]],[[2,1],[2,2]]]"
    );
    assert!(v["version"].is_string());
    assert_eq!(v["config"]["threads"], 1);
}

#[test]
fn nme_and_sme_listings() {
    let out = run(&["nme"], RUNNING_EXAMPLE);
    let v = stdout_json(&out);
    assert_eq!(v["mode"], "exact");
    assert_eq!(
        serde_json::to_string(&v["nme"]).unwrap(),
        r#"[[[0,1],["1/2","1/2"]]]"#
    );
    let out = run(&["sme", "--format", "text"], RUNNING_EXAMPLE);
    assert!(out.status.success());
    assert_eq!(
        String::from_utf8_lossy(&out.stdout),
        "1: (0, 1) x (1, 0)\n"
    );
    let out = run(&["one-sme"], RUNNING_EXAMPLE);
    let v = stdout_json(&out);
    assert_eq!(
        serde_json::to_string(&v["profile"]).unwrap(),
        "[[0,1],[1,0]]"
    );
    assert_eq!(v["updates"], 1);
}

#[test]
fn solve_prisoners_dilemma() {
    let pd = r#"{"players":2,"strategies":[2,2],
        "payoffs":[[[3,3],[0,5]],[[5,0],[1,1]]]}"#;
    let out = run(&["solve"], pd);
    let v = stdout_json(&out);
    assert_eq!(v["mode"], "exact");
    assert_eq!(v["degenerate"], false);
    assert_eq!(
        serde_json::to_string(&v["equilibria"]).unwrap(),
        "[[[0,1],[0,1]]]"
    );
}

#[test]
fn canonicalize_and_inflate_round_trip() {
    // A 2-player view smaller than the actual game gets inflated.
    let ragged = r#"{
      "actual": {"players": 2, "strategies": [2, 2],
        "payoffs": [[[6,6],[2,7]],[[7,2],[1,1]]]},
      "subjective": [
        {"players": 2, "strategies": [2, 2],
         "payoffs": [[[2,2],[0,3]],[[3,0],[1,1]]]},
        {"players": 1, "strategies": [2], "payoffs": [[4],[5]]}
      ]
    }"#;
    let out = run(&["canonicalize"], ragged);
    let v = stdout_json(&out);
    assert_eq!(v["actual"]["strategies"], serde_json::json!([2, 2]));
    for view in v["subjective"].as_array().unwrap() {
        assert_eq!(view["strategies"], serde_json::json!([2, 2]));
    }

    let g = r#"{"players":2,"strategies":[2,2],
        "payoffs":[[[3,3],[0,5]],[[5,0],[1,1]]]}"#;
    let out = run(&["inflate", "--target", "3,2"], g);
    let v = stdout_json(&out);
    assert_eq!(v["strategies"], serde_json::json!([3, 2]));
    // Filler cells carry min - 1 = -1.
    assert_eq!(v["payoffs"][2][0], serde_json::json!([-1, -1]));
}

#[test]
fn export_dot_is_deterministic_across_threads() {
    let mut outputs = Vec::new();
    for threads in ["1", "2", "8"] {
        let out = run(&["export-dot", "--threads", threads], RUNNING_EXAMPLE);
        assert!(out.status.success());
        outputs.push(out.stdout);
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
    let dot = String::from_utf8(outputs[0].clone()).unwrap();
    assert!(dot.starts_with("digraph"));
    assert!(dot.contains("{(2,1),(2,2)}"));
}

#[test]
fn experiment_emits_csv() {
    let out = run(
        &["experiment", "--shape", "2,2", "--runs", "5", "--seed", "7"],
        "",
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = String::from_utf8(out.stdout).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("setting,run,"));
    assert!(csv.lines().last().unwrap().contains(",avg,"));
}

#[test]
fn exit_codes() {
    // Parse failure: 2.
    let out = run(&["solve"], "not json");
    assert_eq!(out.status.code(), Some(2));
    // Missing file: 2.
    let out = run(&["solve", "--in", "/nonexistent/game.json"], "");
    assert_eq!(out.status.code(), Some(2));
    // Domain failure (degenerate game): 1.
    let degenerate = r#"{"players":2,"strategies":[2,2],
        "payoffs":[[[1,0],[1,0]],[[0,0],[0,0]]]}"#;
    let out = run(&["solve"], degenerate);
    assert_eq!(out.status.code(), Some(1));
    // Same game accepted with --allow-degenerate.
    let out = run(&["solve", "--allow-degenerate"], degenerate);
    assert_eq!(out.status.code(), Some(0));
    // Success: 0.
    let out = run(&["adapt"], RUNNING_EXAMPLE);
    assert_eq!(out.status.code(), Some(0));
}
