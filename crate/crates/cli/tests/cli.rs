use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn lab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_friedrichs-lab"))
        .args(args)
        .current_dir(dir)
        .env_remove("FRIEDRICHS_LAB_THREADS")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn no_arguments_prints_usage_and_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = lab(&[], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("Usage"));
}

#[test]
fn unknown_command_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = lab(&["frobnicate"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).starts_with("error_code=usage"));
}

#[test]
fn sharp_constant_on_the_disk() {
    let dir = tempfile::tempdir().unwrap();
    let out = lab(&["sharp-const", "--n", "2", "--R", "1", "--mesh", "512"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    let r = json(&out)["ratio"].as_f64().unwrap();
    assert!((r - 1.0).abs() < 0.01, "{r}");
}

#[test]
fn lorentz_norm_of_indicator() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("step01.csv"), "t_break,value\n1,1\n").unwrap();
    let out = lab(&["norm", "--spec", "Lorentz(2,1)", "--profile", "step01.csv"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    assert!((json(&out)["norm"].as_f64().unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn malformed_norm_spec_and_missing_file() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("p.csv"), "t_break,value\n1,1\n").unwrap();
    let out = lab(&["norm", "--spec", "Lorentz(2", "--profile", "p.csv"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).starts_with("error_code=parse"));
    let out = lab(&["norm", "--spec", "Lp(2)", "--profile", "nope.csv"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).starts_with("error_code=invalid_input"));
}

#[test]
fn lp_budget_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let rows: String = (0..10).map(|i| format!("{i},0,{i}\n")).collect();
    fs::write(dir.path().join("t.csv"), format!("x,y,value\n{rows}")).unwrap();
    let out = lab(&["hajlasz", "--trace", "t.csv", "--budget", "5"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).starts_with("error_code=budget"));
}

#[test]
fn rearrange_writes_profile() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("space.txt"), "a,0.5\nb,0.25\nc,0.25\n").unwrap();
    fs::write(dir.path().join("v.txt"), "1\n-3\n2\n").unwrap();
    let out = lab(&["rearrange", "--space", "space.txt", "--values", "v.txt"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t_break,value"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows, [[0.25, 3.0], [0.5, 2.0], [1.0, 1.0]]);
}

#[test]
fn raycast_hits_the_right_edge() {
    let dir = tempfile::tempdir().unwrap();
    let out = lab(&["raycast", "--domain", "builtin:square", "--x", "0.25,0.5", "--theta", "2,0"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["hit"]["point"][0].as_f64(), Some(1.0));
    assert!((v["hit"]["distance"].as_f64().unwrap() - 0.75).abs() < 1e-15);
}

#[test]
fn hajlasz_linear_trace() {
    let dir = tempfile::tempdir().unwrap();
    let rows: String = (0..16).map(|i| format!("{},0,{}\n", i as f64 / 15.0, 3.0 * i as f64 / 15.0)).collect();
    fs::write(dir.path().join("t.csv"), format!("x,y,value\n{rows}")).unwrap();
    let out = lab(&["hajlasz", "--trace", "t.csv", "--objective", "sup", "--normspec", "Lp(2)"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    let v = json(&out);
    assert!((v["value"].as_f64().unwrap() - 1.5).abs() < 1e-6);
    assert!(v["seminorm"]["value"].as_f64().unwrap() > 0.0);
    let g = fs::read_to_string(dir.path().join("g.csv")).unwrap();
    assert_eq!(g.lines().count(), 17);
}

#[test]
fn hardy_problem_file() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("p.txt"), "template = red1bis\nn = 2\nalpha = 2\nX = Lp(1.5)\nY = Lp(6)\n").unwrap();
    let out = lab(&["hardy", "--problem", "p.txt", "--grid", "64", "--restarts", "2"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    let e = json(&out)["estimate"].as_f64().unwrap();
    assert!(e.is_finite() && e > 0.0);
}

#[test]
fn pointwise_reports_refinement_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = lab(&["check-pointwise", "--order", "first", "--domain", "lshape", "--u", "linear:1,2", "--mdirs", "32"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["refinement"].as_array().unwrap().len(), 2);
    assert!(v["c_emp"].as_f64().unwrap().is_finite());
}

#[test]
fn check_inequality_is_deterministic_and_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("spec.toml"), "theorem = \"fried1\"\nn = 2\np = 1.5\nr = 2\n").unwrap();
    fs::write(dir.path().join("funcs.txt"), "one = const:1\nramp = linear:1,2\n").unwrap();
    let args =
        ["check-inequality", "--spec", "spec.toml", "--domain", "square", "--domain", "lshape", "--corpus", "funcs.txt", "--cells", "16"];
    let mut a = args.to_vec();
    a.extend(["--out-dir", "a", "--emit-plot", "ratios.csv"]);
    let out = lab(&a, dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(json(&out)["cases"].as_u64(), Some(4));
    let mut b = args.to_vec();
    b.extend(["--out-dir", "b", "--threads", "1"]);
    assert!(lab(&b, dir.path()).status.success());
    let ja = fs::read(dir.path().join("a/report.json")).unwrap();
    assert_eq!(ja, fs::read(dir.path().join("b/report.json")).unwrap());
    let csv = fs::read_to_string(dir.path().join("a/report.csv")).unwrap();
    assert!(csv.starts_with("case,theorem,domain,lhs,rhs1,rhs2,rhs3,coef1,coef2,coef3,ratio\n"));
    assert_eq!(fs::read_to_string(dir.path().join("ratios.csv")).unwrap().lines().count(), 5);
    let out = lab(&["report", "--input", "a/report.json"], dir.path());
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("fried1"));
}

#[test]
fn dry_run_computes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = lab(&["--dry-run", "sharp-const", "--mesh", "64"], dir.path());
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["command"], "sharp-const");
    assert_eq!(v["mesh"], 64);
    assert!(v.get("ratio").is_none());
    let out = lab(&["check-inequality", "--dry-run", "--out-dir", "x"], dir.path());
    assert!(out.status.success());
    assert_eq!(json(&out)["specs"].as_array().unwrap().len(), 7);
    assert!(!dir.path().join("x").exists());
}

#[test]
fn threads_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_friedrichs-lab"))
        .args(["--dry-run", "raycast", "--domain", "square", "--x", "0.5,0.5", "--theta", "1,0"])
        .current_dir(dir.path())
        .env("FRIEDRICHS_LAB_THREADS", "1")
        .output()
        .unwrap();
    let v = json(&out);
    assert_eq!(v["threads"], 1);
    assert_eq!(v["execution"], "sequential");
    let out = Command::new(env!("CARGO_BIN_EXE_friedrichs-lab"))
        .args(["--threads", "0", "raycast", "--domain", "square", "--x", "0,0", "--theta", "1,0"])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}
