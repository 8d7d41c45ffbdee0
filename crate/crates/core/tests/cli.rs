use std::path::Path;
use std::process::{Command, Output};

use currentlab::current::{mesh, scm};

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_currentlab"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn text(b: &[u8]) -> String {
    String::from_utf8_lossy(b).into_owned()
}

#[test]
fn spectrum_prints_one_row_per_eigenvalue() {
    let dir = tempfile::tempdir().unwrap();
    scm::write_scm(&mesh::circle_polygon(256, 1.0), dir.path().join("circle256.scm")).unwrap();
    let out = run(&["spectrum", "--in", "circle256.scm", "-k", "4"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let mut rdr = csv::Reader::from_reader(out.stdout.as_slice());
    assert_eq!(rdr.headers().unwrap(), vec!["k", "lambda", "residual"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 4);
    let lambda: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    for (l, want) in lambda.iter().zip([1.0, 1.0, 4.0, 4.0]) {
        assert!((l - want).abs() / want < 5e-3, "{lambda:?}");
    }
}

#[test]
fn spline_experiment_writes_one_record_per_eps() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "experiment",
            "spline",
            "--eps",
            "0.2,0.1,0.05",
            "--profile-resolution",
            "32",
            "--angular-resolution",
            "32",
            "--sphere-level",
            "2",
            "--out",
            "spline.json",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("spline.json")).unwrap()).unwrap();
    let eps: Vec<f64> = v["records"].as_array().unwrap().iter().map(|r| r["eps"].as_f64().unwrap()).collect();
    assert_eq!(eps, vec![0.2, 0.1, 0.05]);
    assert_eq!(v["params"]["profile_resolution"], 32);
}

#[test]
fn config_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("run.cfg"),
        "# small spline run\neps = 0.3\nprofile_resolution = 16\nangular_resolution = 16\nsphere_level = 1\n",
    )
    .unwrap();
    let out = run(&["--config", "run.cfg", "experiment", "spline", "--angular-resolution", "20"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["params"]["eps"], serde_json::json!([0.3]));
    assert_eq!(v["params"]["profile_resolution"], 16);
    assert_eq!(v["params"]["angular_resolution"], 20);
    let again = run(&["--config", "run.cfg", "experiment", "spline", "--angular-resolution", "20"], dir.path());
    assert_eq!(out.stdout, again.stdout);
}

#[test]
fn missing_input_is_a_computation_error_naming_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["mass", "--in", "nowhere.scm"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("nowhere.scm"), "{}", text(&out.stderr));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["mass", "--bogus"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out.stderr).to_lowercase().contains("usage"));
}

#[test]
fn mass_and_boundary_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    scm::write_scm(&mesh::unit_square(), dir.path().join("sq.scm")).unwrap();
    let out = run(&["mass", "--in", "sq.scm"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert!((text(&out.stdout).trim().parse::<f64>().unwrap() - 1.0).abs() < 1e-12);
    let out = run(&["boundary", "--in", "sq.scm", "--out", "bd.scm"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let bd = scm::read_scm(dir.path().join("bd.scm")).unwrap();
    assert!((bd.mass() - 4.0).abs() < 1e-12);
}

#[test]
fn flatdist_in_a_complex_file() {
    let dir = tempfile::tempdir().unwrap();
    scm::write_scm(&mesh::square_patch([0.0, 0.0], [1.0, 0.5], 1), dir.path().join("cx.scm")).unwrap();
    let seg = |h: f64| format!("SCM 1\nambient 2\ndim 1\nvertices 2\n0 {h}\n1 {h}\nsimplices 1\n1 0 1\n");
    std::fs::write(dir.path().join("a.scm"), seg(0.0)).unwrap();
    std::fs::write(dir.path().join("b.scm"), seg(0.5)).unwrap();
    for extra in [&["--complex", "cx.scm"][..], &["--lo", "0,0", "--hi", "1,0.5", "--res", "1,1", "--exact"][..]] {
        let mut args = vec!["flatdist", "--a", "a.scm", "--b", "b.scm"];
        args.extend_from_slice(extra);
        let out = run(&args, dir.path());
        assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert!((v["value"].as_f64().unwrap() - 1.5).abs() < 1e-9, "{v}");
        assert_eq!(v["verified"], true);
        assert!(v["u"].is_array() && v["v"].is_array());
    }
    let both = run(&["flatdist", "--a", "a.scm", "--b", "b.scm", "--complex", "cx.scm", "--lo", "0,0"], dir.path());
    assert_eq!(both.status.code(), Some(1));
}

#[test]
fn goodcuts_reads_a_grid() {
    let dir = tempfile::tempdir().unwrap();
    let mut cells = vec![1u8; 64];
    cells[5] = 0;
    std::fs::write(dir.path().join("g.json"), serde_json::json!({"n": 2, "m": 8, "cells": cells}).to_string()).unwrap();
    let out = run(&["goodcuts", "--grid", "g.json", "--delta", "0.5"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["checks"]["measure"], true);
    assert_eq!(v["sets"].as_array().unwrap().len(), 2);
}
