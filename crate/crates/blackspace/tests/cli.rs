use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_blackspace"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn table1_prints_header_and_four_rows() {
    let o = run(&["table1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 5);
    assert!(text.contains("national,100000,45000000,25.000,2000.000,2055.000"));
    assert!(text.contains(",300.000,false"));
}

#[test]
fn queueing_table_flags_but_does_not_fail() {
    let o = run(&["table1", "--mode", "queueing", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v[1]["status"], "unstable");
    let o = run(&["table1", "--mode", "queueing", "--require-stable"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn compose_needs_a_stable_queue() {
    let o = run(&["compose", "--name", "regional", "--mode", "queueing"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&[
        "compose",
        "--name",
        "semi-national",
        "--cumulative",
        "--step",
        "0.5",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("time_ms,cumulative\n"));
    assert!(text.trim_end().ends_with(",1.000"));
}

#[test]
fn exported_scenarios_load_back() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("suite.json");
    assert!(run(&["export-scenarios", "--out", path(&file)])
        .status
        .success());
    let from_file = run(&["table1", "--scenario", path(&file)]);
    assert!(from_file.status.success());
    assert_eq!(from_file.stdout, run(&["table1"]).stdout);
}

#[test]
fn invalid_scenario_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.json");
    let text = String::from_utf8(run(&["export-scenarios"]).stdout)
        .unwrap()
        .replacen("\"processors\": 1,", "\"processors\": 0,", 1);
    std::fs::write(&file, text).unwrap();
    let o = run(&["table1", "--scenario", path(&file)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("processors"));
    assert_eq!(
        run(&["table1", "--scenario", "/nonexistent/x.json"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        run(&["simulate", "--name", "nowhere"]).status.code(),
        Some(1)
    );
}

#[test]
fn sweep_reports_each_size() {
    let o = run(&[
        "sweep",
        "--name",
        "semi-national",
        "--sizes",
        "1e5,1e6,45e6",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[2].starts_with("1000000,6.000,"));
    assert!(lines[3].contains(",2000.000,2055.000,"));
    assert_eq!(run(&["sweep", "--sizes", "0"]).status.code(), Some(1));
}

#[test]
fn check_and_simulate_outputs() {
    let o = run(&["check", "--verdict", "probability", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 4);
    assert_eq!(v[0]["basis"], "probability");

    let o = run(&[
        "simulate",
        "--name",
        "fully-distributed",
        "--duration",
        "3600",
        "--reps",
        "2",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("fully-distributed,1,2,3600.000,1,"));
}
