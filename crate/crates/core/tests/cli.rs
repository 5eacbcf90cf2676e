//! The `tuberrt` binary end to end, including exit codes.

use std::path::Path;
use std::process::{Command, Output};

fn tuberrt(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tuberrt")).current_dir(dir).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn plan_optimize_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("cfg.json"), r#"{"planner": {"max_iters": 1500}, "seed": 3}"#).unwrap();
    let out = tuberrt(d, &["gen-env", "-o", "env.json", "--volume-fraction", "0.08"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    let out = tuberrt(d, &["plan", "-c", "cfg.json", "--env", "env.json", "-o", "path.json", "--nodes", "nodes.csv"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let nodes = std::fs::read_to_string(d.join("nodes.csv")).unwrap();
    assert!(nodes.starts_with("id,x,y,z,parent,cost,clearance_r,cum_turning"));

    let out = tuberrt(d, &["optimize", "--path", "path.json", "--env", "env.json", "-o", "traj"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["trajectory.csv", "trajectory.json", "report.json"] {
        assert!(d.join("traj").join(f).exists(), "{f}");
    }
    let header = std::fs::read_to_string(d.join("traj/trajectory.csv")).unwrap();
    assert!(header.starts_with("t,x,y,z,vx,vy,vz,ax,ay,az,f1_x"));

    let out = tuberrt(d, &["verify", "--trajectory", "traj/trajectory.json", "--env", "env.json", "-o", "verify.json"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.join("verify.json")).unwrap()).unwrap();
    assert_eq!(report["pass"], true);
}

#[test]
fn infeasible_inputs_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&tuberrt(d, &["gen-env", "-o", "env.json", "--volume-fraction", "0.08"])), 0);
    let env: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.join("env.json")).unwrap()).unwrap();
    let c = &env["obstacles"][0]["center"];
    let inside = format!("{},{},{}", c[0], c[1], c[2]);
    let out = tuberrt(d, &["plan", "--env", "env.json", "-o", "p.json", "--start-m", &inside]);
    assert_eq!(code(&out), 2, "{}", String::from_utf8_lossy(&out.stderr));

    assert_eq!(code(&tuberrt(d, &["plan", "--env", "env.json", "-o", "p.json", "--max-iters", "1500", "--seed", "3"])), 0);
    let out = tuberrt(d, &["optimize", "--path", "p.json", "-o", "t", "--t-upper-n", "10"]);
    assert_eq!(code(&out), 2, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&tuberrt(d, &["plan", "--env", "missing.json", "-o", "p.json"])), 1);
    assert_eq!(code(&tuberrt(d, &["gen-env", "-o", "e.json", "--set", "planer.max_iters=3"])), 1);
    assert_eq!(code(&tuberrt(d, &["gen-env", "-o", "e.json", "--volume-fraction", "1.5"])), 1);
}

#[test]
fn bench_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = tuberrt(d, &["bench", "-o", "b", "--seeds", "2", "--max-iters", "100", "--no-wall-clock", "--set", "env_spec.volume_fraction=0.05"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let summary = std::fs::read_to_string(d.join("b/summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 4);
    assert!(d.join("b/trials.csv").exists());
}
