//! Black-box checks of the command-line binary: exit codes, output files,
//! determinism of generated data, and bitwise round-trips of saved fields.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tomo"))
}

/// Small, fast scenario: disk on a 11×11 lattice, a handful of iterations.
fn small_config(dir: &Path) -> PathBuf {
    let doc = serde_json::json!({
        "scenario": "circular_disk",
        "experiment": "full_boundary_center",
        "grid": { "hbar": 0.1 },
        "model": { "width": 4.0, "gamma": 1e-2, "sigma": 1e-4 },
        "descent": { "max_iter": 5 },
        "data": { "refine": 2, "nu": 0.0, "seed": 0 }
    });
    let path = dir.join("run.json");
    std::fs::write(&path, serde_json::to_string_pretty(&doc).unwrap()).unwrap();
    path
}

fn run_ok(args: &[&str]) -> Output {
    let out = bin().args(args).output().expect("binary runs");
    assert!(
        out.status.success(),
        "command {:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn read_summary(dir: &Path) -> serde_json::Value {
    let text = std::fs::read_to_string(dir.join("summary.json")).expect("summary exists");
    serde_json::from_str(&text).expect("summary parses")
}

#[test]
fn forward_writes_traveltimes_and_a_full_summary() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path());
    let out_dir = tmp.path().join("fwd");
    run_ok(&["forward", "--config", cfg.to_str().unwrap(), "--out-dir", out_dir.to_str().unwrap()]);

    let table = std::fs::read_to_string(out_dir.join("T.csv")).unwrap();
    assert!(table.starts_with("x,z,value\n"));
    assert_eq!(table.lines().count(), 1 + 11 * 11);

    let summary = read_summary(&out_dir);
    assert_eq!(summary["run"]["command"], "forward");
    assert!(summary["derived"]["epsilon"].is_f64(), "epsilon missing from summary");
    assert!(summary["derived"]["delta"].is_f64());
    assert_eq!(summary["config"]["model"]["gamma"], 1e-2);
}

#[test]
fn overrides_are_applied_and_echoed_in_the_summary() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path());
    let out_dir = tmp.path().join("fwd");
    run_ok(&[
        "forward",
        "--config",
        cfg.to_str().unwrap(),
        "--out-dir",
        out_dir.to_str().unwrap(),
        "--set",
        "model.gamma=0.05",
    ]);
    let summary = read_summary(&out_dir);
    assert_eq!(summary["config"]["model"]["gamma"], 0.05);
}

#[test]
fn unknown_configuration_keys_are_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let doc = serde_json::json!({
        "scenario": "circular_disk",
        "experiment": "full_boundary_center",
        "grid": { "hbar": 0.1 },
        "model": { "width": 4.0, "gamma": 1e-2, "sigma": 1e-4, "wobble": 3 }
    });
    let cfg = tmp.path().join("bad.json");
    std::fs::write(&cfg, doc.to_string()).unwrap();
    let out = bin()
        .args(["forward", "--config", cfg.to_str().unwrap(), "--out-dir"])
        .arg(tmp.path().join("x"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("wobble"), "stderr does not name the bad key: {stderr}");
}

#[test]
fn missing_files_exit_with_the_configuration_code() {
    let tmp = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["forward", "--config", "/nonexistent/run.json", "--out-dir"])
        .arg(tmp.path().join("x"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/run.json"));

    let cfg = small_config(tmp.path());
    let out = bin()
        .args(["invert", "--config", cfg.to_str().unwrap(), "--obs", "/nonexistent/obs.json", "--out-dir"])
        .arg(tmp.path().join("y"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/obs.json"));
}

#[test]
fn generated_observations_are_byte_for_byte_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path());
    for dir in ["a", "b"] {
        run_ok(&[
            "gen-data",
            "--config",
            cfg.to_str().unwrap(),
            "--out-dir",
            tmp.path().join(dir).to_str().unwrap(),
            "--set",
            "data.nu=1e-2",
            "--set",
            "data.seed=3",
        ]);
    }
    let a = std::fs::read(tmp.path().join("a/obs.json")).unwrap();
    let b = std::fs::read(tmp.path().join("b/obs.json")).unwrap();
    assert_eq!(a, b, "same seed produced different observation files");
}

#[test]
fn inversion_outputs_round_trip_and_reruns_are_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path());
    let data_dir = tmp.path().join("data");
    run_ok(&["gen-data", "--config", cfg.to_str().unwrap(), "--out-dir", data_dir.to_str().unwrap()]);
    let obs = data_dir.join("obs.json");

    let mut dirs = Vec::new();
    for name in ["inv1", "inv2"] {
        let out_dir = tmp.path().join(name);
        run_ok(&[
            "invert",
            "--config",
            cfg.to_str().unwrap(),
            "--obs",
            obs.to_str().unwrap(),
            "--out-dir",
            out_dir.to_str().unwrap(),
        ]);
        for file in ["u.csv", "w.csv", "s.csv", "history.csv", "summary.json"] {
            assert!(out_dir.join(file).exists(), "{name}/{file} missing");
        }
        dirs.push(out_dir);
    }

    // Deterministic rerun: every numeric artifact matches byte for byte.
    for file in ["u.csv", "w.csv", "s.csv", "history.csv"] {
        let a = std::fs::read(dirs[0].join(file)).unwrap();
        let b = std::fs::read(dirs[1].join(file)).unwrap();
        assert_eq!(a, b, "{file} differs between identical reruns");
    }

    // Saved phase field reloads to the same bits it was written from.
    let cfg_parsed: tomo::config::RunConfig =
        serde_json::from_str(&std::fs::read_to_string(&cfg).unwrap()).unwrap();
    let r = cfg_parsed.resolve().unwrap();
    let u = tomo::io::read_mesh_field(&dirs[0].join("u.csv"), &r.mesh).unwrap();
    let rewritten = tmp.path().join("u-rewrite.csv");
    tomo::io::write_mesh_field(&rewritten, &r.mesh, &u).unwrap();
    assert_eq!(
        std::fs::read(dirs[0].join("u.csv")).unwrap(),
        std::fs::read(&rewritten).unwrap(),
        "phase field does not round-trip bitwise"
    );

    let summary = read_summary(&dirs[0]);
    assert_eq!(summary["run"]["command"], "invert");
    assert!(summary["run"]["iterations"].is_u64());
    assert!(summary["run"]["stop"].is_string());
}

#[test]
fn profile_subcommand_reports_the_interface_constants() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path());
    let out_dir = tmp.path().join("prof");
    run_ok(&["profile", "--config", cfg.to_str().unwrap(), "--out-dir", out_dir.to_str().unwrap()]);
    let table = std::fs::read_to_string(out_dir.join("profile.csv")).unwrap();
    assert!(table.starts_with("t,z,dz,ddz\n"));
    let summary = read_summary(&out_dir);
    for key in ["lambda1", "lambda2", "delta", "p_gamma", "delta_residual"] {
        assert!(summary["run"][key].is_f64(), "{key} missing from profile summary");
    }
}

#[test]
fn parameter_study_tabulates_one_row_per_value() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path());
    let out_dir = tmp.path().join("study");
    run_ok(&[
        "param-study",
        "--config",
        cfg.to_str().unwrap(),
        "--out-dir",
        out_dir.to_str().unwrap(),
        "--vary",
        "width",
        "--values",
        "4,6",
        "--set",
        "descent.max_iter=2",
    ]);
    let table = std::fs::read_to_string(out_dir.join("study.csv")).unwrap();
    let mut lines = table.lines();
    assert_eq!(
        lines.next().unwrap(),
        "value,misfit,regularizer,objective,perimeter_estimate,misclassified_area,iterations"
    );
    assert_eq!(lines.count(), 2);
    let summary = read_summary(&out_dir);
    assert_eq!(summary["run"]["entries"].as_array().unwrap().len(), 2);
}
