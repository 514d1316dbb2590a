//! Black-box tests of the command-line binary: exit codes, artifact
//! layout, determinism, and flag overrides.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn dyonflow<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    Command::new(env!("CARGO_BIN_EXE_dyonflow"))
        .args(args)
        .output()
        .expect("binary spawns")
}

fn run_in(dir: &Path, cmd: &str, config: &Path, extra: &[&str]) -> Output {
    let mut args: Vec<std::ffi::OsString> = vec![
        cmd.into(),
        "--config".into(),
        config.into(),
        "--out".into(),
        dir.into(),
    ];
    args.extend(extra.iter().map(|s| s.into()));
    dyonflow(args)
}

#[test]
fn verify_passes_on_the_bundled_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), "verify", &fixture("flat_quadratic.cfg"), &[]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("verify.json")).unwrap())
            .unwrap();
    assert_eq!(doc["all_passed"], true);
    assert!(doc["checks"].as_array().unwrap().len() >= 4);
}

#[test]
fn verify_fails_when_a_check_fails() {
    // Zeroing the growth-bound constants makes the metric certification
    // fail while everything else still runs.
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(fixture("flat_quadratic.cfg")).unwrap();
    let broken = text.replace(
        "family = flat\nn_fields = 1",
        "family = flat\nn_fields = 1\nepsilon = 0\nc1 = 0\nc2 = 0\nc3 = 0",
    );
    assert_ne!(text, broken, "fixture text changed under the test");
    let cfg = dir.path().join("broken.cfg");
    std::fs::write(&cfg, broken).unwrap();
    let out = run_in(dir.path(), "verify", &cfg, &[]);
    assert_eq!(out.status.code(), Some(9));
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("verify.json")).unwrap())
            .unwrap();
    assert_eq!(doc["all_passed"], false);
}

#[test]
fn solve_artifacts_are_byte_identical_across_runs() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    let cfg = fixture("flat_quadratic.cfg");
    assert_eq!(run_in(dir_a.path(), "solve", &cfg, &[]).status.code(), Some(0));
    assert_eq!(run_in(dir_b.path(), "solve", &cfg, &[]).status.code(), Some(0));
    for name in ["solve.json", "solve.csv"] {
        let a = std::fs::read(dir_a.path().join(name)).unwrap();
        let b = std::fs::read(dir_b.path().join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }
}

#[test]
fn solve_csv_has_the_documented_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), "solve", &fixture("flat_quadratic.cfg"), &[]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("solve.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "r,phi0_re,phi0_im,pi0_re,pi0_im");
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first.len(), 5);
    assert_eq!(first[0].parse::<f64>().unwrap(), 1.5);
}

#[test]
fn energy_exits_with_the_divergence_code_when_the_potential_persists() {
    // The flat fixture has a constant superpotential, so the scalar
    // potential does not vanish at infinity.
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), "energy", &fixture("flat_quadratic.cfg"), &[]);
    assert_eq!(out.status.code(), Some(8));
    // The report is complete, not partial: divergence is a result.
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("energy.json")).unwrap())
            .unwrap();
    assert_eq!(doc["verdict"], "divergent");
    assert_eq!(doc["tail_estimate"], "divergent");
}

#[test]
fn energy_is_finite_on_the_zero_potential_fixture_and_honors_the_split_flag() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        "energy",
        &fixture("curved_series.cfg"),
        &["--L", "50"],
    );
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("energy.json")).unwrap())
            .unwrap();
    assert_eq!(doc["verdict"], "finite");
    assert_eq!(doc["L"], 50.0);
    assert_eq!(doc["bound_check"], true);
}

#[test]
fn scan_grid_rows_come_back_in_charge_order() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), "scan", &fixture("curved_series.cfg"), &[]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("scan.json")).unwrap())
            .unwrap();
    let rows = doc["rows"].as_array().unwrap();
    let qs: Vec<f64> = rows.iter().map(|r| r["electric"][0].as_f64().unwrap()).collect();
    assert_eq!(qs, vec![0.5, 1.0, 1.5]);
    for row in rows {
        assert_eq!(row["converged"], true);
        // At the attractor point of this model, v = 0, so v_eff equals v_bh.
        assert_eq!(row["v_eff"], row["v_bh"]);
    }
    assert!(dir.path().join("scan.csv").exists());
}

#[test]
fn scan_without_a_grid_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), "scan", &fixture("flat_quadratic.cfg"), &[]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn unknown_command_is_a_usage_error() {
    let out = dyonflow(["frobnicate", "--config", "x"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_config_file_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.cfg");
    let out = run_in(dir.path(), "verify", &missing, &[]);
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn malformed_config_is_a_parse_error_with_a_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "[kahler]\nfamily flat\n").unwrap();
    let out = run_in(dir.path(), "verify", &cfg, &[]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "stderr: {err}");
}

#[test]
fn failed_solve_leaves_partial_artifacts() {
    // Request an end radius beyond the background domain: the certified
    // stage succeeds and is staged, then the long-range integration fails.
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(fixture("flat_quadratic.cfg")).unwrap();
    let cfg = dir.path().join("beyond.cfg");
    std::fs::write(&cfg, text.replace("l_split = 30", "l_split = 30\nr_end = 100")).unwrap();
    let out = run_in(dir.path(), "solve", &cfg, &[]);
    assert_eq!(out.status.code(), Some(6), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("solve.json.partial").exists());
    assert!(!dir.path().join("solve.json").exists());
}

#[test]
fn seed_radius_flag_overrides_the_default_offset() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        "seed-horizon",
        &fixture("flat_quadratic.cfg"),
        &["--r0", "1.002"],
    );
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("seed_horizon.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(doc["r0"], 1.002);
    assert_eq!(doc["r_h"], 1.0);
}

#[test]
fn match_artifact_reports_fit_and_window() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), "match", &fixture("flat_quadratic.cfg"), &[]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("match.json")).unwrap())
            .unwrap();
    assert_eq!(doc["window"]["samples"], 40);
    assert!(doc["fit"]["condition"].as_f64().unwrap() < 1e10);
    assert!(doc["fit"]["fit_residual"].as_f64().unwrap().is_finite());
}

#[test]
fn critical_artifact_lists_all_three_potentials() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), "critical", &fixture("flat_quadratic.cfg"), &[]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("critical.json")).unwrap())
            .unwrap();
    let labels: Vec<&str> = doc["points"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["potential"].as_str().unwrap())
        .collect();
    assert_eq!(labels, vec!["scalar", "black_hole", "effective"]);
    assert_eq!(doc["frozen_pair"]["coincide"], true);
}
