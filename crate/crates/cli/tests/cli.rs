use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_l0prune"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("failed to launch l0prune")
}

fn tiny() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data/tiny")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is not JSON")
}

#[test]
fn missing_lambda_is_a_usage_error() {
    let out = run(&["solve", "--generate", "10,5,2,0.5,10,1"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("--lambda"), "{err}");
    assert!(err.to_lowercase().contains("usage"), "{err}");
}

#[test]
fn help_exits_zero() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("solve"));
}

#[test]
fn solves_bundled_instance() {
    let data = tiny();
    let out = run(&["solve", "--data", data.to_str().unwrap(), "--lambda", "0.5", "--M", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = stdout_json(&out);
    assert_eq!(report["status"], "Optimal");
    let support = report["support"].as_array().unwrap();
    assert_eq!(report["support_size"].as_u64().unwrap() as usize, support.len());
    assert_eq!(report["x"].as_array().unwrap().len(), 10);
}

#[test]
fn solve_agrees_with_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let data = tiny();
    let common = ["--data", data.to_str().unwrap(), "--lambda", "0.3", "--M", "2", "--penalty", "bigml2", "--alpha", "0.1"];
    let oracle_path = dir.path().join("oracle.json");
    let mut args = vec!["oracle"];
    args.extend(common);
    args.extend(["--out", oracle_path.to_str().unwrap()]);
    let out = run(&args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let oracle: Value = serde_json::from_str(&fs::read_to_string(&oracle_path).unwrap()).unwrap();
    assert!(oracle["support"].is_array());

    let mut args = vec!["solve"];
    args.extend(common);
    let report = stdout_json(&run(&args));
    let a = report["objective"].as_f64().unwrap();
    let b = oracle["objective"].as_f64().unwrap();
    assert!((a - b).abs() <= 1e-6 * (1.0 + b.abs()), "{a} vs {b}");
}

#[test]
fn time_limit_exits_two() {
    let out = run(&["solve", "--generate", "50,200,5,0.9,10,1", "--M", "1.5", "--lambda", "0.3", "--time-limit", "0.0001"]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout_json(&out)["status"], "TimeLimit");
}

#[test]
fn trace_is_json_lines() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.jsonl");
    let report = dir.path().join("report.json");
    let out = run(&[
        "solve",
        "--generate",
        "20,15,2,0.5,10,4",
        "--lambda",
        "0.2",
        "--trace",
        trace.to_str().unwrap(),
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = fs::read_to_string(&trace).unwrap();
    let events: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert!(!events.is_empty());
    assert_eq!(events[0]["event"], "enter");
    assert!(events.iter().all(|e| e["event"].is_string()));
}

#[test]
fn path_csv() {
    let data = tiny();
    let out = run(&["path", "--data", data.to_str().unwrap(), "--M", "2", "--lambda-factor", "0.5", "--max-points", "6"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "lambda,objective,support_size,nodes,relaxations,fixed_by_simpruning,time_s,status");
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert!(!rows.is_empty() && rows.len() <= 6);
    assert_eq!(rows[0][2], "0");
    let lambdas: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    for w in lambdas.windows(2) {
        assert!((w[1] / w[0] - 0.5).abs() < 1e-12);
    }
}

#[test]
fn generate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        let out = run(&["generate", "12,6,2,0.4,5,9", "--alternating", "--out", d.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    for f in ["A.csv", "y.csv", "xtrue.csv", "meta.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    let xtrue = fs::read_to_string(a.join("xtrue.csv")).unwrap();
    assert!(xtrue.contains('-'));
}

#[test]
fn oracle_refuses_large_n() {
    let out = run(&["oracle", "--generate", "30,20,2,0.5,10,1", "--lambda", "0.1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("n too large"));
}

#[test]
fn bench_writes_csvs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bench.json");
    fs::write(
        &cfg,
        r#"{
            "scenario": "Sensibility",
            "base": {"m": 20, "n": 25, "k": 2, "rho": 0.5, "snr_db": 10.0,
                     "loss": "least_squares", "penalty": {"kind": "big_m", "big_m": 1.5},
                     "lambda_ratio": 0.1},
            "sweep": {"name": "k", "grid": [1, 2]},
            "repetitions": 1,
            "seeds": [1, 2],
            "variants": [
                {"name": "on", "config": {}},
                {"name": "off", "config": {"simultaneous_pruning": false}}
            ],
            "baseline": "off"
        }"#,
    )
    .unwrap();
    let raw = dir.path().join("raw.csv");
    let summary = dir.path().join("summary.csv");
    let out = run(&["bench", cfg.to_str().unwrap(), "--raw", raw.to_str().unwrap(), "--summary", summary.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let raw_text = fs::read_to_string(&raw).unwrap();
    assert_eq!(raw_text.lines().count(), 1 + 2 * 2 * 2);
    let width = raw_text.lines().next().unwrap().split(',').count();
    assert!(raw_text.lines().all(|l| l.split(',').count() == width));
    assert_eq!(fs::read_to_string(&summary).unwrap().lines().count(), 1 + 2);
}

#[test]
fn bad_inputs_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope");
    let out = run(&["solve", "--data", missing.to_str().unwrap(), "--lambda", "0.1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());

    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, "{\"scenario\": \"Sensibility\"").unwrap();
    assert_eq!(run(&["bench", cfg.to_str().unwrap()]).status.code(), Some(1));

    let out = run(&["solve", "--generate", "10,5,9,0.5,10,1", "--lambda", "0.1"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["solve", "--generate", "10,5", "--lambda", "0.1"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["solve", "--generate", "10,5,2,0.5,10,1", "--lambda", "-1"]);
    assert_eq!(out.status.code(), Some(1));
}
