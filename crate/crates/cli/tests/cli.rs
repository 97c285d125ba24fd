use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_chemflood"))
}

fn model(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("models").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).env_remove("CHEMFLOOD_TOL").output().unwrap()
}

fn data_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines().skip(2).map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect()
}

#[test]
fn validate_accepts_boomerang() {
    let out = run(&["validate", "-m", model("boomerang.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["result"]["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
}

#[test]
fn rejected_model_exits_with_2() {
    let m = model("monotone_corey.json");
    assert_eq!(run(&["validate", "-m", m.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["window", "-m", m.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn usage_errors_exit_with_1() {
    assert_eq!(run(&["--bogus"]).status.code(), Some(1));
    assert_eq!(run(&["connect"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn solver_failure_exits_with_3() {
    // outside the velocity window there is no connection
    assert_eq!(run(&["connect", "--v", "0.5"]).status.code(), Some(3));
}

#[test]
fn sweep_writes_decreasing_kappa() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("curve.csv");
    let out = run(&["sweep", "-m", model("boomerang.json").to_str().unwrap(), "-n", "50", "-o", csv.to_str().unwrap(), "--jobs", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    let header: serde_json::Value = serde_json::from_str(text.lines().next().unwrap().strip_prefix("# ").unwrap()).unwrap();
    assert_eq!(header["subcommand"], "sweep");
    assert_eq!(header["deterministic"], true);
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 50);
    assert!(rows.windows(2).all(|w| w[1][1] < w[0][1]));
}

#[test]
fn solve_profile_has_one_concentration_jump() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("prof.csv");
    let out = run(&["solve", "-m", model("boomerang.json").to_str().unwrap(), "--kappa", "2", "-o", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let rows = data_rows(&std::fs::read_to_string(&csv).unwrap());
    let jumps = rows.windows(2).filter(|w| w[0][2] != w[1][2]).count();
    assert_eq!(jumps, 1);
    assert!(rows.windows(2).all(|w| w[1][1] <= w[0][1]));
}

#[test]
fn identical_runs_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        assert!(run(&["connect", "--v", "0.71", "-o", p.to_str().unwrap()]).status.success());
    }
    // the manifest names the output path, so compare from the column line on
    let body = |p: &PathBuf| std::fs::read_to_string(p).unwrap().lines().skip(1).collect::<Vec<_>>().join("\n");
    assert_eq!(body(&a), body(&b));
}

#[test]
fn tolerance_override_from_env() {
    let out = bin().args(["window"]).env("CHEMFLOOD_TOL", r#"{"root": 1e-10}"#).output().unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["manifest"]["tolerances"]["root"], 1e-10);
    let bad = bin().args(["window"]).env("CHEMFLOOD_TOL", r#"{"nope": 1}"#).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn portrait_and_lax_and_simulate_run() {
    let dir = tempfile::tempdir().unwrap();
    let skew = model("skewed_boomerang.json");
    let out = run(&["portrait", "-m", skew.to_str().unwrap(), "--v", "0.70", "-o", dir.path().join("n.csv").to_str().unwrap()]);
    assert!(out.status.success());
    let lax = run(&["lax", "-o", dir.path().join("l.csv").to_str().unwrap()]);
    assert!(lax.status.success());
    let sim = run(&[
        "simulate", "--kappa", "1", "-n", "300", "--eps-c", "0.02", "--t-end", "0.3",
        "-o", dir.path().join("f.csv").to_str().unwrap(),
        "--snapshot", dir.path().join("s.csv").to_str().unwrap(),
    ]);
    assert!(sim.status.success(), "{}", String::from_utf8_lossy(&sim.stderr));
    assert_eq!(data_rows(&std::fs::read_to_string(dir.path().join("s.csv")).unwrap()).len(), 300);
}
