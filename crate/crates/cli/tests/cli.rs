use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

const REFERENCE: &str = r#"{"n": 3, "distributions": [
  [".2", ".2", ".2", ".4"],
  [".3", ".0", ".4", ".3"],
  [".6", ".0", ".3", ".1"],
  [".0", ".2", ".1", ".7"],
  [".7", ".1", ".2", ".0"],
  [".1", ".4", ".0", ".5"]
]}"#;

fn emdkit() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_emdkit"));
    cmd.env_remove("EMDKIT_EXACT_THRESHOLD");
    cmd
}

fn run(args: &[&str]) -> Output {
    emdkit().args(args).output().expect("binary runs")
}

fn run_stdin(args: &[&str], input: &str) -> Output {
    let mut child = emdkit()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn emd_of_reference_tuple() {
    let v = json(&run_stdin(&["emd", "-"], REFERENCE));
    assert_eq!(v["command"], "emd");
    assert_eq!(v["values"]["emd"]["exact"], "7/2");
    let cols: Vec<&str> = v["values"]["columns"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["exact"].as_str().unwrap())
        .collect();
    assert_eq!(cols, ["13/10", "1", "6/5"]);
    assert_eq!(v["inputs_digest"].as_str().unwrap().len(), 64);
}

#[test]
fn emd_from_csv_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tuple.csv");
    std::fs::write(&path, "p0,p1,p2,p3\n.2,.2,.2,.4\n.3,0,.4,.3\n.6,0,.3,.1\n0,.2,.1,.7\n.7,.1,.2,0\n.1,.4,0,.5\n").unwrap();
    let v = json(&run(&["emd", path.to_str().unwrap(), "--plan"]));
    assert_eq!(v["values"]["emd"]["exact"], "7/2");
    assert!(!v["values"]["plan"].as_array().unwrap().is_empty());
}

#[test]
fn repeated_rows_cost_nothing() {
    let v = json(&run_stdin(&["emd", "--format", "csv", "-"], ".1,.2,.7\n.1,.2,.7\n.1,.2,.7\n"));
    assert_eq!(v["values"]["emd"]["exact"], "0");
}

#[test]
fn bad_row_is_reported() {
    let out = run_stdin(&["emd", "-"], r#"{"n": 1, "distributions": [[".5", ".5"], [".6", ".5"]]}"#);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("row 2"), "{}", stderr(&out));
    assert!(out.stdout.is_empty());
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["expected", "-n", "3"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn normalized_expectation() {
    let v = json(&run(&["expected", "-n", "8", "-d", "10", "--normalized"]));
    let norm = v["values"]["normalized"]["decimal"].as_str().unwrap();
    assert!(norm.starts_with("0.1975"), "{norm}");
}

#[test]
fn quadrature_for_large_d() {
    let v = json(&run(&["expected", "-n", "6", "-d", "100", "--method", "quadrature"]));
    let x: f64 = v["values"]["expected"]["decimal"].as_str().unwrap().parse().unwrap();
    assert!((x - 72.6685).abs() < 1e-4, "{x}");
    assert_eq!(v["method"]["name"], "quadrature");
}

#[test]
fn recursion_matches_integral() {
    let v = json(&run(&["expected", "-n", "1", "-d", "2", "--method", "recursive"]));
    assert_eq!(v["values"]["expected"]["exact"], "1/3");
    let w = json(&run(&["expected", "-n", "1", "-d", "2"]));
    assert_eq!(w["values"]["expected"]["exact"], "1/3");
}

#[test]
fn recursion_budget_is_enforced() {
    let out = run(&["expected", "-n", "5", "-d", "6", "--method", "recursive", "--budget", "10"]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
}

#[test]
fn threshold_from_environment() {
    let out = emdkit()
        .args(["expected", "-n", "5", "-d", "5"])
        .env("EMDKIT_EXACT_THRESHOLD", "10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("quadrature"), "{}", stderr(&out));
    assert_eq!(run(&["expected", "-n", "5", "-d", "5"]).status.code(), Some(0));
}

#[test]
fn monte_carlo_is_reproducible() {
    let args = ["expected", "-n", "2", "-d", "3", "--method", "mc", "--samples", "5000", "--seed", "7"];
    let a = json(&run(&args));
    let b = json(&run(&[&args[..], &["--workers", "3"]].concat()));
    assert_eq!(a["values"]["expected"], b["values"]["expected"]);
    assert_eq!(a["method"]["seed"], 7);
}

#[test]
fn decompose_reference_tuple() {
    let v = json(&run_stdin(&["decompose", "-"], REFERENCE));
    let vals = &v["values"];
    assert_eq!(vals["g_second_derivative"]["exact"], "18/5");
    assert_eq!(vals["pairwise_sum"]["exact"], "139/10");
    assert_eq!(vals["identity"]["holds"], true);
    assert_eq!(vals["equality_holds"], false);
}

#[test]
fn decompose_three_members_has_no_obstruction() {
    let input = r#"{"n": 2, "distributions": [["1/2", "1/4", "1/4"], ["0", "1", "0"], ["1/3", "1/3", "1/3"]]}"#;
    let v = json(&run_stdin(&["decompose", "-"], input));
    assert_eq!(v["values"]["g_second_derivative"]["exact"], "0");
    assert_eq!(v["values"]["equality_holds"], true);
}

#[test]
fn plan_methods_agree() {
    let g = json(&run_stdin(&["plan", "-"], REFERENCE));
    let s = json(&run_stdin(&["plan", "--method", "sweep", "-"], REFERENCE));
    assert_eq!(g["values"]["objective"]["exact"], "7/2");
    assert_eq!(s["values"]["objective"]["exact"], "7/2");
    assert!(s["values"]["intervals"].is_array());
}

#[test]
fn cost_closed_forms() {
    let v = json(&run(&["cost", "1", "3", "--sites", "3"]));
    assert_eq!(v["values"]["epsilon_form"]["exact"], "2");
    assert_eq!(v["values"]["gap_form"]["exact"], "2");
    assert_eq!(v["values"]["counting_form"]["exact"], "2");
}

#[test]
fn digits_flag_controls_rendering() {
    let v = json(&run(&["expected", "-n", "1", "-d", "2", "--digits", "3"]));
    assert_eq!(v["values"]["expected"]["decimal"], "0.333");
}

#[test]
fn selftest_modes() {
    let ok = run(&["selftest"]);
    assert_eq!(ok.status.code(), Some(0), "{}", stderr(&ok));
    let bad = run(&["selftest", "--inject-corruption"]);
    assert_eq!(bad.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&bad.stdout).unwrap();
    assert_eq!(v["suites"][0]["status"], "fail");
    let skip = json(&run(&["selftest", "--budget", "0"]));
    assert_eq!(skip["suites"][0]["status"], "skipped");
    assert_eq!(skip["passed"], true);
}
