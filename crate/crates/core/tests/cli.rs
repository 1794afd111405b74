use serde_json::Value;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn nversion(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nversion")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

fn out_arg(dir: &Path) -> String {
    dir.to_str().unwrap().to_string()
}

#[test]
fn l0_scan_lq4_in_three_dimensions_is_consistent() {
    let dir = tempfile::tempdir().unwrap();
    let o = nversion(&["l0-scan", "--body", "lq:n=3,q=4", "--out", &out_arg(dir.path())]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("consistent"));
    let r = report(dir.path());
    assert_eq!(r["verdict"], "consistent");
    assert_eq!(r["command"], "l0-scan");
    assert!(dir.path().join("data/pairings.csv").exists());
}

#[test]
fn missing_q_is_a_usage_error() {
    let o = nversion(&["l0-scan", "--body", "lq:n=3"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("lq:n=<int>,q=<float|inf>"));
}

#[test]
fn unknown_tags_name_the_grammar() {
    let o = nversion(&["pd-check", "--body", "ball:n=3", "--f", "exp_pow:p=1"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("lq:n=<int>"));
    let o = nversion(&["pd-check", "--body", "lq:n=2,q=2", "--f", "gauss"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("exp_pow"));
}

#[test]
fn bad_flags_and_help() {
    assert_eq!(code(&nversion(&["nosuch"])), 2);
    assert_eq!(code(&nversion(&["pd-check", "--body", "lq:n=2,q=2", "--f", "exp_pow:p=1", "--m", "x"])), 2);
    assert_eq!(code(&nversion(&["--help"])), 0);
    assert_eq!(code(&nversion(&["recover-measure", "--body", "lq:n=3,q=4"])), 2);
}

#[test]
fn witness_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let o = nversion(&[
        "pd-refute", "--body", "lq:n=3,q=inf", "--f", "exp_pow:p=2", "--budget", "100000", "--seed", "7", "--out",
        &out_arg(dir.path()),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let wpath = dir.path().join("witness.json");
    assert!(wpath.exists());
    assert_eq!(report(dir.path())["verdict"], "refuted");
    assert_eq!(code(&nversion(&["verify-witness", wpath.to_str().unwrap()])), 0);

    let mut w: Value = serde_json::from_str(&fs::read_to_string(&wpath).unwrap()).unwrap();
    for c in w["coefficients"].as_array_mut().unwrap() {
        *c = Value::from(0.0);
    }
    let zeroed = dir.path().join("zeroed.json");
    fs::write(&zeroed, serde_json::to_string(&w).unwrap()).unwrap();
    assert_eq!(code(&nversion(&["verify-witness", zeroed.to_str().unwrap()])), 1);

    let text = fs::read_to_string(&wpath).unwrap();
    let truncated = dir.path().join("truncated.json");
    fs::write(&truncated, &text[..text.len() / 2]).unwrap();
    assert_eq!(code(&nversion(&["verify-witness", truncated.to_str().unwrap()])), 2);
    assert_eq!(code(&nversion(&["verify-witness", "/nonexistent/witness.json"])), 2);
}

fn without_timestamp(dir: &Path) -> Value {
    let mut r = report(dir);
    r.as_object_mut().unwrap().remove("timestamp");
    r
}

#[test]
fn reports_are_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for (dir, workers) in [(&a, "1"), (&b, "3")] {
        let o = nversion(&[
            "pd-check", "--body", "lq:n=4,q=2", "--f", "exp_pow:p=1", "--samples", "50", "--seed", "5", "--workers",
            workers, "--out", &out_arg(dir.path()),
        ]);
        assert_eq!(code(&o), 0);
    }
    let ra = without_timestamp(a.path());
    assert_eq!(serde_json::to_string(&ra).unwrap(), serde_json::to_string(&without_timestamp(b.path())).unwrap());
    assert_eq!(ra["config"]["seed"], 5);
    assert_eq!(ra["config"]["tol"], 1e-8);
    assert_eq!(ra["verdict"], "consistent");
}

#[test]
fn config_merges_under_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# pd check\nbody=lq:n=2,q=2\nf=exp_pow:p=0.5\nsamples=20\nseed=3\n").unwrap();
    let out = dir.path().join("out");
    let o = nversion(&["pd-check", "--config", cfg.to_str().unwrap(), "--seed", "11", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&out);
    assert_eq!(r["config"]["seed"], 11);
    assert_eq!(r["config"]["samples"], 20);
    assert_eq!(r["config"]["body"], "lq:n=2,q=2");

    fs::write(&cfg, "body=lq:n=2,q=2\nbody=lq:n=3,q=2\n").unwrap();
    assert_eq!(code(&nversion(&["pd-check", "--config", cfg.to_str().unwrap()])), 2);
    assert_eq!(code(&nversion(&["pd-check", "--config", "/nonexistent.cfg"])), 2);
}

#[test]
fn omega_table_and_version_test() {
    let dir = tempfile::tempdir().unwrap();
    let o = nversion(&["omega-table", "--n", "3", "--count", "11", "--out", &out_arg(dir.path())]);
    assert_eq!(code(&o), 0);
    assert_eq!(report(dir.path())["verdict"], "agrees");
    let csv = fs::read_to_string(dir.path().join("data/omega.csv")).unwrap();
    assert_eq!(csv.lines().count(), 12);

    let o = nversion(&["version-test", "--p", "1", "--a", "1,2,3", "--m", "2000", "--repeats", "3"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("version-test:"));
    assert_eq!(code(&nversion(&["version-test", "--p", "3", "--a", "1,2"])), 2);
}

#[test]
fn recover_and_proof_scan() {
    let dir = tempfile::tempdir().unwrap();
    let o = nversion(&["recover-measure", "--body", "lq:n=2,q=2", "--grid", "64", "--out", &out_arg(dir.path())]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("data/measure.csv")).unwrap();
    assert!(csv.trim_end().lines().last().unwrap().starts_with("# C="));

    let dir = tempfile::tempdir().unwrap();
    let o = nversion(&[
        "proof-scan", "--body", "lq:n=2,q=2", "--f", "exp_pow:p=2", "--eps", "0.5,0.25,0.125", "--out",
        &out_arg(dir.path()),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(report(dir.path())["verdict"], "consistent");
    let csv = fs::read_to_string(dir.path().join("data/epsilon_scan.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
    let o = nversion(&["proof-scan", "--body", "lq:n=2,q=2", "--f", "exp_pow:p=2", "--eps", "0.25,0.5"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn tail_check_cauchy() {
    let o = nversion(&["tail-check", "--law", "stable:p=1,n=2", "--samples", "20000"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("holds"));
}
