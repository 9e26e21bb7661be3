use std::path::Path;
use std::process::{Command, Output};

use pwa_synth::planner::ChipPlan;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pwa-synth")).args(args).output().expect("binary should start")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn compile_two_mode_plan() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("plan.json");
    let o = run(&["compile", "--gate", "dft", "--d", "2", "--out", path(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let plan = ChipPlan::load(&out).unwrap();
    assert_eq!(plan.metadata.d, 2);
    assert!(plan.metadata.measured_error.unwrap() < 1e-12);
}

#[test]
fn compile_clock_three_modes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("plan.json");
    let o = run(&["compile", "--gate", "clock", "--d", "3", "--N", "8", "--out", path(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let plan = ChipPlan::load(&out).unwrap();
    assert_eq!(plan.metadata.k, 160);
    assert!(plan.metadata.measured_error.unwrap() < 2e-2);
}

#[test]
fn non_unitary_matrix_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.json");
    std::fs::write(&m, "[[[1,0],[1,0]],[[0,0],[1,0]]]").unwrap();
    let o = run(&["compile", "--matrix", path(&m), "--d", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not unitary"));
}

#[test]
fn optimize_rejects_zero_sections() {
    let o = run(&["optimize", "--gate", "shift", "--d", "3", "--K", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn optimize_then_simulate() {
    let dir = tempfile::tempdir().unwrap();
    let (v, csv, trace) = (dir.path().join("v.json"), dir.path().join("r.csv"), dir.path().join("t.csv"));
    let o = run(&[
        "optimize", "--gate", "shift", "--d", "3", "--K", "4", "--restarts", "4", "--seed", "2", "--out", path(&v),
        "--csv", path(&csv),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&v).unwrap()).unwrap();
    let best = json["best_infidelity"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&best));
    let restarts = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(restarts.lines().next(), Some("restart_id,final_infidelity,iterations"));
    assert_eq!(restarts.lines().count(), 5);

    let o = run(&["simulate", "--plan", path(&v), "--input", "2", "--dz", "2e-4", "--out", path(&trace)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let t = std::fs::read_to_string(&trace).unwrap();
    assert_eq!(t.lines().next(), Some("z_m,mode_index,re,im,probability"));
}

#[test]
fn bench_error_scaling_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "bench", "--experiment", "error-scaling", "--gates", "dft", "--dims", "3", "--N", "4,8", "--out-dir",
        path(dir.path()),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("error_scaling.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("gate,d,N,L_m,error,q,epsilon_certificate,slope,status"));
    assert_eq!(csv.lines().count(), 3);
}
