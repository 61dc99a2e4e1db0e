use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn spx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spx")).args(args).env_remove("SPX_THREADS").output().expect("spx runs")
}

fn body(out: &Output) -> Value {
    let v: Value = serde_json::from_slice(&out.stdout).expect("json report");
    assert_eq!(v["schema"], "spx-report/1");
    v["body"].clone()
}

fn generate(dir: &Path, name: &str, args: &[&str]) -> String {
    let path = dir.join(name).display().to_string();
    let mut full = vec!["gen"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", &path]);
    assert!(spx(&full).status.success());
    path
}

#[test]
fn oracle_reports_threshold_and_bound() {
    let dir = tempfile::tempdir().unwrap();
    let f = generate(dir.path(), "a.spx", &["csp", "--n", "10", "--m", "25", "--seed", "4"]);
    let out = spx(&["oracle", "--in", &f, "--eta", "1/2"]);
    assert_eq!(out.status.code(), Some(0));
    let b = body(&out);
    let t = b["t_count"].as_f64().unwrap();
    assert!(t.log2() <= b["mcdiarmid_log2_rhs"].as_f64().unwrap() + 1e-9);
    assert!(b["h_min"].as_str().unwrap().starts_with('-'));
}

#[test]
fn exponent_grid_matches_the_calculator() {
    let out = spx(&["exponents", "--k", "3", "--eta", "1/2", "--gamma", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let b = body(&out);
    let r = &b[0];
    let q = r["q_eta"].as_f64().unwrap();
    let h = -q * q.log2() - (1.0 - q) * (1.0 - q).log2();
    assert!((r["c_cl"].as_f64().unwrap() - h.min(1.0)).abs() < 1e-12);
    assert!(r["ratio"].as_f64().unwrap() > 1.0);
}

#[test]
fn every_solver_reaches_the_optimum() {
    let dir = tempfile::tempdir().unwrap();
    let lin = generate(dir.path(), "l.spx", &["lin2", "--n", "12", "--m", "24", "--seed", "2", "--planted"]);
    let csp = generate(dir.path(), "c.spx", &["csp", "--n", "12", "--k", "2", "--m", "24", "--family", "and", "--seed", "2", "--planted"]);
    let h = |f: &str| body(&spx(&["oracle", "--in", f]))["h_min"].as_str().unwrap().to_string();
    let (hl, hc) = (h(&lin), h(&csp));
    for (solver, file, opt) in [("case1", &lin, &hl), ("case2", &csp, &hc), ("sweep", &csp, &hc)] {
        let out = spx(&["solve", solver, "--in", file, "--seed", "9"]);
        assert_eq!(out.status.code(), Some(0), "{solver}");
        assert_eq!(&body(&out)["outcome"]["value"], opt.as_str(), "{solver}");
    }
    let out = spx(&["solve", "ranked", "--in", &lin, "--gamma", "0.3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(body(&out)["outcome"]["value"], hl.as_str());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let lin = generate(dir.path(), "l.spx", &["lin2", "--n", "12", "--m", "24", "--seed", "5"]);
    assert_eq!(spx(&["nonsense"]).status.code(), Some(1));
    assert_eq!(spx(&["solve", "case2", "--in", &lin]).status.code(), Some(1));
    assert_eq!(spx(&["solve", "ranked", "--in", &lin]).status.code(), Some(1));
    assert_eq!(spx(&["solve", "case1", "--in", &lin, "--budget", "3"]).status.code(), Some(3));
    assert_eq!(spx(&["solve", "ranked", "--in", &lin, "--gamma", "0.5", "--budget", "3"]).status.code(), Some(3));
    assert_eq!(spx(&["verify", "--scale", "small"]).status.code(), Some(0));
}

#[test]
fn bench_replays_and_handles_empty_ranges() {
    let args = ["bench", "--n", "8..10:2", "--seeds", "1", "--runs", "3", "--threads", "2"];
    let a = spx(&args);
    let b = spx(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let csv = String::from_utf8(a.stdout).unwrap();
    assert_eq!(csv.lines().count(), 3);
    let empty = spx(&["bench", "--n", "10..9"]);
    assert_eq!(empty.status.code(), Some(0));
    assert_eq!(String::from_utf8(empty.stdout).unwrap().lines().count(), 1);
}

#[test]
fn reports_differ_only_in_the_timestamp() {
    let dir = tempfile::tempdir().unwrap();
    let f = generate(dir.path(), "a.spx", &["lin2", "--n", "10", "--m", "20", "--seed", "1"]);
    let run = || {
        let mut v: Value = serde_json::from_slice(&spx(&["solve", "case1", "--in", &f, "--seed", "3"]).stdout).unwrap();
        v["generated_at"] = Value::Null;
        v["body"]["outcome"]["wall_time"] = Value::Null;
        v
    };
    let a = run();
    assert_eq!(a, run());
    assert_eq!(a["config"]["seed"], 3);
    assert_eq!(a["config"]["eta"], "1/2");
    assert_eq!(a["config"]["delta"], "1/10");
}

#[test]
fn dimacs_input_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("x.cnf");
    std::fs::write(&f, "p cnf 3 2\n1 -2 0\n2 3 0\n").unwrap();
    let out = spx(&["oracle", "--in", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(body(&out)["n"], 3);
}
