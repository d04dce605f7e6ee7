use std::fs;
use std::process::Command;

use relief_cli::{run_cli, EXIT_ERROR, EXIT_VIOLATION};

fn run(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut argv = vec!["relief"];
    argv.extend_from_slice(args);
    let code = run_cli(argv, &mut out);
    (code, String::from_utf8(out).unwrap())
}

#[test]
fn gen_then_simulate_and_solve() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let (code, out) = run(&["gen", "--class", "coastal", "--n", "18", "--seed", "7", "--delta", "0.3", "--out", d]);
    assert_eq!(code, 0);
    let file = out.trim().to_string();
    assert!(fs::metadata(&file).is_ok());

    let (code, out) = run(&["simulate", "--instance", &file, "--policy", "efha"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["policy"], "efha");
    assert!(v["makespan"].as_f64().unwrap() > 0.0);

    let (code, out) = run(&["solve", "--instance", &file]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(v["opt_star"].as_f64().unwrap() <= v["truck_only_opt"].as_f64().unwrap() + 1e-9);
}

#[test]
fn gen_dataset_writes_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = run(&["gen", "--dataset", "small", "--seed", "3", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code, 0);
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["entries"].as_array().unwrap().len(), 100);
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 101);
}

#[test]
fn experiment_verify_aggregate_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let res = dir.path().join("res");
    let res_s = res.to_str().unwrap();
    let (code, out) = run(&[
        "experiment", "--dataset", "SMALL", "--alphas", "1", "--fleets", "1x1",
        "--policies", "optimistic,regretless", "--workers", "2", "--strict", "--out", res_s,
    ]);
    assert_eq!(code, 0, "{out}");
    for f in ["records.csv", "bounds_report.json", "ratio_vs_alpha_regretless.csv", "risk_vs_alpha_optimistic.csv"] {
        assert!(res.join(f).exists(), "{f}");
    }
    let records = res.join("records.csv");
    let records_s = records.to_str().unwrap();

    let (code, out) = run(&["verify", "--in", records_s, "--strict"]);
    assert_eq!(code, 0);
    assert!(out.is_empty(), "{out}");

    let summary = dir.path().join("summary.csv");
    let (code, _) = run(&[
        "aggregate", "--in", records_s, "--group-by", "policy", "--metric", "risk",
        "--out", summary.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let text = fs::read_to_string(&summary).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("policy,metric,count,"));
    assert_eq!(lines.count(), 2);

    // One Regretless record pushed past its drone impact ceiling.
    let csv_text = fs::read_to_string(&records).unwrap();
    let mut rows: Vec<String> = csv_text.lines().map(str::to_string).collect();
    let i = rows.iter().position(|r| r.contains(",regretless,")).unwrap();
    let mut cells: Vec<String> = rows[i].split(',').map(str::to_string).collect();
    let last = cells.len() - 1;
    cells[last] = "1.5".into();
    rows[i] = cells.join(",");
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, rows.join("\n") + "\n").unwrap();
    let (code, out) = run(&["verify", "--in", bad.to_str().unwrap(), "--strict"]);
    assert_eq!(code, EXIT_VIOLATION);
    assert!(out.contains("violation"));
    let (code, _) = run(&["verify", "--in", bad.to_str().unwrap()]);
    assert_eq!(code, 0);
}

#[test]
fn errors_exit_with_two() {
    assert_eq!(run(&["verify", "--in", "/nonexistent/records.csv"]).0, EXIT_ERROR);
    assert_eq!(run(&["simulate", "--instance", "/nonexistent.json", "--policy", "efha"]).0, EXIT_ERROR);
    assert_eq!(run(&["experiment", "--dataset", "NOPE"]).0, EXIT_ERROR);
    assert_eq!(run(&["bogus"]).0, EXIT_ERROR);
}

#[test]
fn binary_runs() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_relief"))
        .args(["gen", "--class", "random", "--n", "8", "--seed", "1", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let bad = Command::new(env!("CARGO_BIN_EXE_relief")).args(["solve", "--instance", "/nonexistent"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_ERROR));
}
