//! End-to-end runs of the `kcurv` binary.

use std::path::Path;
use std::process::{Command, Output};

fn kcurv(args: &[&str], out_env: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_kcurv"));
    cmd.args(args).env_remove("KCURV_OUT_DIR");
    if let Some(dir) = out_env {
        cmd.env("KCURV_OUT_DIR", dir);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn verify_smoke_run_is_fast_and_clean() {
    let start = std::time::Instant::now();
    let o = kcurv(&["verify", "--suite", "all", "--samples", "10", "--seed", "1"], None);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(start.elapsed().as_secs_f64() < 5.0);
    let reports: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(reports.as_array().unwrap().len(), kcurv::harness::SUITES.len());
    assert_eq!(reports[0]["schema_version"], 1);
}

#[test]
fn verify_is_deterministic() {
    let run = || {
        let o = kcurv(&["verify", "--suite", "lemma1", "--suite", "eig-jet", "--samples", "200", "--seed", "42"], None);
        let mut v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
        for r in v.as_array_mut().unwrap() {
            r["wall_time_ms"] = 0.into();
        }
        v
    };
    assert_eq!(run(), run());
}

#[test]
fn newton_identity_suite_has_no_violations() {
    let o = kcurv(&["verify", "--suite", "newton-identity", "--samples", "100000", "--seed", "42", "--format", "csv"], None);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().filter(|l| l.starts_with("newton-identity")).collect();
    assert_eq!(lines.len(), 2);
    for l in lines {
        let f: Vec<&str> = l.split(',').collect();
        assert_eq!(f[3], f[4], "{l}");
    }
}

#[test]
fn unknown_suite_is_a_usage_error() {
    let o = kcurv(&["verify", "--suite", "bogus"], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("sigma-oracle"));
    let o = kcurv(&["frobnicate"], None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn tolerance_override_can_force_a_failure() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"suites":["euler"],"samples":50,"seed":3,"tolerances":{"euler/euler":1e-40}}"#).unwrap();
    let o = kcurv(&["verify", "--config", cfg.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert!(stderr(&o).contains("FAIL euler/euler"));
}

#[test]
fn solve_sphere_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("p.json");
    std::fs::write(&p, r#"{"n":2,"k":2,"family":{"family":"constant","c":4},"grid":32}"#).unwrap();
    let out = dir.path().join("out");
    let o = kcurv(&["solve", p.to_str().unwrap()], Some(&out));
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("solve.json")).unwrap()).unwrap();
    assert!((v["report"]["kappa1_max"].as_f64().unwrap() - 2.0).abs() < 1e-9);
    assert_eq!(v["report"]["status"], "converged");
}

#[test]
fn solve_rejects_bad_problems_with_paths() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("p.json");
    std::fs::write(&p, r#"{"n":2,"k":2,"family":{"family":"constant","c":1},"grid":32,"config":{"tol":"tight"}}"#).unwrap();
    let o = kcurv(&["solve", p.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("config.tol"), "{}", stderr(&o));
    std::fs::write(&p, r#"{"n":2,"k":2,"family":{"family":"normal_linear","c":1,"a":1.2},"grid":32}"#).unwrap();
    let o = kcurv(&["solve", p.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("positive"), "{}", stderr(&o));
}

#[test]
fn obstructed_solve_exits_with_failure() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("p.json");
    std::fs::write(&p, r#"{"n":2,"k":2,"family":{"family":"normal_linear","c":1,"a":0.2},"grid":16}"#).unwrap();
    let o = kcurv(&["solve", "--config", p.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("gauge_obstruction"), "{}", stderr(&o));
}

#[test]
fn sweep_emits_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("f.json");
    std::fs::write(&p, r#"{"n":2,"k":2,"family":{"family":"constant","c":1},"values":[1,3,6],"grids":[16,32]}"#).unwrap();
    let out = dir.path().join("out");
    let o = kcurv(&["sweep", p.to_str().unwrap(), "--out", out.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(out.join("sweep.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("family_param,grid,kappa1_max,u_min,u_max,residual,iterations,status"));
    let k1: Vec<f64> = lines.filter(|l| l.contains(",32,")).map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect();
    for (got, want) in k1.iter().zip([1f64, 3f64.sqrt(), 6f64.sqrt()]) {
        assert!((got - want).abs() < 1e-9);
    }
    let summary: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("sweep_summary.json")).unwrap()).unwrap();
    assert_eq!(summary["table"]["summary"]["stable"], true);
}

#[test]
fn sweep_isolates_unreachable_members() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("f.json");
    std::fs::write(&p, r#"{"n":2,"k":1,"family":{"family":"normal_linear","c":2,"a":0},"values":[0,0.1],"grids":[16]}"#).unwrap();
    let o = kcurv(&["sweep", p.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.lines().nth(1).unwrap().ends_with(",converged"));
    assert!(text.lines().nth(2).unwrap().ends_with(",unreachable"));
}
