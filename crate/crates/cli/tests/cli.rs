use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .display()
        .to_string()
}

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("summa").chain(args.iter().copied());
    let code = summa_cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let (code, out, err) = run(&full);
    assert!(err.is_empty(), "{err}");
    (code, serde_json::from_str(&out).unwrap())
}

#[test]
fn khintchine_moment_is_exact() {
    let (code, v) = json(&["dyadic", "khintchine", "--coeffs", "1,1", "--p", "4"]);
    assert_eq!(code, 0);
    assert_eq!(v["values"]["moment"], "8");
    let (_, v) = json(&["dyadic", "khintchine", "--coeffs", "1,1,1", "--p", "4"]);
    assert_eq!(v["values"]["moment"], "21");
}

#[test]
fn dirac_singular_rows() {
    let (code, v) = json(&["mart", "experiment", "dirac_singular", "--stages", "6"]);
    assert_eq!(code, 0);
    let table = &v["tables"][0];
    let col = table["columns"].as_array().unwrap().iter().position(|c| c == "l1").unwrap();
    let rows = table["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| r[col] == "1"));
}

#[test]
fn exit_codes() {
    let (code, _, err) = run(&["frobnicate"]);
    assert_eq!(code, 2);
    assert!(err.contains("Usage"));
    let (code, _, err) = run(&["sums", "ynorm", "--terms", &data("malformed.json")]);
    assert_eq!(code, 3, "{err}");
    let (code, _, _) = run(&["sums", "ynorm", "--terms", &data("missing.json")]);
    assert_eq!(code, 3);
    let (code, _, err) = run(&["sums", "ynorm", "--family", "harmonic", "--horizon", "40"]);
    assert_eq!(code, 4, "{err}");
    let (code, _, _) = run(&["measures", "rn", "--in", &data("measure.json"), "--nu", &data("measure.json")]);
    assert_eq!(code, 5);
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("suite"));
}

#[test]
fn suites_pass_and_report_counts() {
    let (code, v) = json(&["suite", "measures", "--seed", "1"]);
    assert_eq!(code, 0);
    assert_eq!(v["summary"]["status"], "pass");
    let checks = v["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    assert!(checks.iter().all(|c| c["count"].as_u64().unwrap() > 0));
}

#[test]
fn injected_fault_fails_with_a_witness() {
    let (code, v) = json(&["suite", "measures", "--inject-fault"]);
    assert_eq!(code, 1);
    assert_eq!(v["summary"]["status"], "fail");
    let failed: Vec<&Value> = v["checks"].as_array().unwrap().iter().filter(|c| c["passed"] == false).collect();
    assert!(!failed.is_empty());
    assert!(failed.iter().all(|c| c["witness"].is_string()));
}

#[test]
fn reports_are_byte_stable_for_a_seed() {
    let a = run(&["suite", "paths", "--seed", "7", "--format", "csv"]);
    let b = run(&["suite", "paths", "--seed", "7", "--format", "csv"]);
    assert_eq!(a, b);
    assert_eq!(a.0, 0);
}

#[test]
fn seed_falls_back_to_the_environment() {
    let bin = env!("CARGO_BIN_EXE_summa");
    let with_env = Command::new(bin).args(["suite", "dyadic", "--format", "json"]).env("SUMMA_SEED", "5").output().unwrap();
    let v: Value = serde_json::from_slice(&with_env.stdout).unwrap();
    assert_eq!(v["values"]["seed"], 5);
    let flag = Command::new(bin).args(["suite", "dyadic", "--format", "json", "--seed", "9"]).env("SUMMA_SEED", "5").output().unwrap();
    let v: Value = serde_json::from_slice(&flag.stdout).unwrap();
    assert_eq!(v["values"]["seed"], 9);
}

#[test]
fn guard_override_from_the_command_line() {
    let bin = env!("CARGO_BIN_EXE_summa");
    let status = Command::new(bin)
        .args(["--guard-subsets", "3", "sums", "ynorm", "--terms", &data("family.json")])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(4));
}

#[test]
fn documented_invocations() {
    let (code, v) = json(&["sums", "cauchy", "--family", "geometric", "--ratio", "1/2", "--eps", "1e-6"]);
    assert_eq!(code, 0);
    assert_eq!(v["values"]["verdict"], "pass");
    let (code, v) = json(&["sums", "ynorm", "--terms", &data("family.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["values"]["y"], "3/4");
    let (code, v) = json(&["dyadic", "maximal", "--measure", &data("dyadic_measure.json"), "--t", "3", "--depth", "8"]);
    assert_eq!(code, 0, "{v}");
    let (code, v) = json(&["mart", "classify", "--seq", &data("seq.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["values"]["class"], "martingale");
    let (code, v) = json(&["mart", "doob-lp", "--seq", &data("seq.json"), "--p", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["values"]["lhs"], "11/2");
    assert_eq!(v["values"]["rhs"], "16");
    let (code, v) = json(&["path", "length", "--in", &data("path.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["values"]["length"], "9");
    let (code, _) = json(&["path", "stieltjes", "--phi", "t^2", "--in", &data("path.json"), "--mesh", "1/1024"]);
    assert_eq!(code, 0);
    let (code, v) = json(&["convexity", "modulus", "--norm", "l1.5", "--dim", "2", "--grid", "4096"]);
    assert_eq!(code, 0);
    assert_eq!(v["tables"][0]["rows"].as_array().unwrap().len(), 3);
}

#[test]
fn csv_is_quoted_and_exact() {
    let (code, out, _) = run(&["measures", "hahn", "--in", &data("measure.json"), "--format", "csv"]);
    assert_eq!(code, 0);
    assert!(out.contains("positive,\"[0, 2, 3]\""), "{out}");
    let (_, out, _) = run(&["mart", "experiment", "dirac_singular", "--stages", "3", "--format", "csv"]);
    assert!(out.contains("1,1,2,1/2"), "{out}");
}

#[test]
fn out_flag_writes_the_report() {
    let path = std::env::temp_dir().join(format!("summa-report-{}.json", std::process::id()));
    let (code, out, _) = run(&["dyadic", "walsh", "--n", "3", "--format", "json", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["summary"]["passed"], 1);
    let _ = std::fs::remove_file(path);
}
