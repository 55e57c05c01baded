//! End-to-end runs of the `utbe` binary through temp files.

use std::path::PathBuf;
use std::process::{Command, Output};

fn utbe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_utbe"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn tmpdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("utbe-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

/// 4x4 mode-reversal permutation in the matrix CSV format.
fn reversal_csv() -> String {
    let mut s = String::from("4,4\n");
    for i in 0..4 {
        for j in 0..4 {
            let re = if i + j == 3 { 1.0 } else { 0.0 };
            s.push_str(&format!("{i},{j},{re},0\n"));
        }
    }
    s
}

#[test]
fn compile_then_simulate_round_trips() {
    let dir = tmpdir("pipeline");
    let csv = dir.join("reversal.csv");
    let tbc = dir.join("reversal.tbc");
    std::fs::write(&csv, reversal_csv()).unwrap();

    let out = utbe(&[
        "compile",
        csv.to_str().unwrap(),
        "-o",
        tbc.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let doc = std::fs::read_to_string(&tbc).unwrap();
    assert!(doc.starts_with("circuit N=4 topology=rect"));
    assert_eq!(doc.lines().filter(|l| l.starts_with("coupler")).count(), 6);

    let out = utbe(&["simulate", tbc.to_str().unwrap(), "--noise", "0"]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((report["fidelity"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    // the compiled circuit routes input j to output 3-j
    let det = report["matrix"].as_array().unwrap();
    for j in 0..4 {
        let p = det[3 - j].as_array().unwrap()[j].as_f64().unwrap();
        assert!((p - 1.0).abs() < 1e-9, "({}, {j}) = {p}", 3 - j);
    }
}

#[test]
fn missing_matrix_entry_exits_with_input_error() {
    let dir = tmpdir("badcsv");
    let csv = dir.join("partial.csv");
    std::fs::write(&csv, "2,2\n0,0,1,0\n1,1,1,0\n0,1,0,0\n").unwrap();
    let out = utbe(&["compile", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing entry"));
}

#[test]
fn non_unitary_matrix_exits_with_numerical_error() {
    let dir = tmpdir("nonunitary");
    let csv = dir.join("bad.csv");
    let mut s = String::from("2,2\n");
    for i in 0..2 {
        for j in 0..2 {
            s.push_str(&format!("{i},{j},0.9,0\n"));
        }
    }
    std::fs::write(&csv, s).unwrap();
    let out = utbe(&["compile", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn parse_error_reports_position_and_exits_2() {
    let dir = tmpdir("badtbc");
    let tbc = dir.join("bad.tbc");
    std::fs::write(
        &tbc,
        "circuit N=4 topology=rect\ncoupler layer=0 slot=0 theta=abc phi=0\n",
    )
    .unwrap();
    let out = utbe(&["simulate", tbc.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn sweep_reports_both_targets() {
    let out = utbe(&["sweep", "--points", "5"]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let points = report["points"].as_array().unwrap();
    assert_eq!(points.len(), 5);
    assert!((points[0]["fidelity_identity"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((points[4]["fidelity_swap"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn perms_single_dimension_and_csv_output() {
    let out = utbe(&["perms", "--n", "4", "--seed", "5"]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["total"].as_u64(), Some(24));
    assert!(report["mean_fidelity_noisy"].as_f64().unwrap() > 0.97);

    let out = utbe(&["perms", "--n", "3", "--csv", "--seed", "5"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.lines().count(), 7); // header + 3! permutations
}

#[test]
fn walk_depths_and_output_file() {
    let dir = tmpdir("walk");
    let path = dir.join("walk.json");
    let out = utbe(&["walk", "--depth", "4", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let per_depth = report["per_depth"].as_array().unwrap();
    assert_eq!(per_depth.len(), 4);
    assert_eq!(per_depth[3]["n_outputs"].as_u64(), Some(8));
}

#[test]
fn stability_defaults_to_the_switch_gate() {
    let out = utbe(&[
        "stability",
        "--hours",
        "3",
        "--noise",
        "0.01",
        "--seed",
        "9",
    ]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["series"].as_array().unwrap().len(), 4);
    assert!(report["mean"].as_f64().unwrap() > 0.97);
}

#[test]
fn schedule_emits_pulse_csv() {
    let dir = tmpdir("sched");
    let tbc = dir.join("two.tbc");
    std::fs::write(
        &tbc,
        "circuit N=4 topology=rect\n\
         coupler layer=0 slot=1 theta=0.7 phi=0.1\n\
         coupler layer=1 slot=0 theta=0 phi=0.4\n",
    )
    .unwrap();
    let out = utbe(&["schedule", tbc.to_str().unwrap(), "--kappa", "2.0"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "layer,slot,time_ps,energy_au,phase_rad");
    // only the theta > 0 coupler emits a pulse, at bin separation 4.3 ps
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("0,1,4.3e0,3.5e-1"));
}
