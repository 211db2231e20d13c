//! End-to-end tests of the `qcorr` binary: exit codes, report shapes, and
//! determinism of emitted files.

use std::path::Path;
use std::process::{Command, Output};

use qcorr_cli::report::Report;

fn qcorr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcorr"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_scenario(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn swap_scenario_reports_worked_example_values() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(
        dir.path(),
        "swap.json",
        r#"{"schema_version": 1, "kind": "swap", "a_sq": 0.75, "c_sq": 0.875}"#,
    );
    let output = qcorr(&["swap", "--scenario", &path]);
    assert!(output.status.success(), "{output:?}");
    let text = String::from_utf8(output.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5, "header plus one row per Bell outcome");
    assert!(lines[0].starts_with("outcome,probability"));
    // Psi+ row: p = 11/32, rho1 = diag(21/22, 1/22), holds.
    let psi_plus: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(psi_plus[0], "Psi+");
    assert_eq!(psi_plus[1], "3.43750000000e-1");
    assert_eq!(psi_plus[2], "9.54545454545e-1");
    assert_eq!(psi_plus[3], "4.54545454545e-2");
    assert_eq!(*psi_plus.last().unwrap(), "true");
}

#[test]
fn correlations_scenario_on_eq14_preset() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(
        dir.path(),
        "corr.json",
        r#"{"schema_version": 1, "kind": "correlations",
            "state": {"preset": "eq14"}, "blocks": [["1"], ["4"]]}"#,
    );
    let output = qcorr(&["correlations", "--scenario", &path, "--format", "json"]);
    assert!(output.status.success(), "{output:?}");
    let report: Report = serde_json::from_slice(&output.stdout).unwrap();
    let qcorr_cli::report::Payload::Correlations {
        block_correlation, ..
    } = report.payload
    else {
        panic!("wrong payload kind");
    };
    assert!(block_correlation.unwrap().abs() < 1e-10);
}

#[test]
fn malformed_file_exits_1_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(
        dir.path(),
        "bad.json",
        "{\"schema_version\": 1,\n  \"kind\": ",
    );
    let output = qcorr(&["swap", "--scenario", &path]);
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8(output.stderr).unwrap();
    assert!(stderr.contains("parse error"), "{stderr}");
    assert!(stderr.contains("line 2"), "{stderr}");
}

#[test]
fn unknown_field_and_kind_mismatch_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = write_scenario(
        dir.path(),
        "unknown.json",
        r#"{"schema_version": 1, "kind": "swap", "a_sq": 0.75, "c_sq": 0.875, "extra": 1}"#,
    );
    let output = qcorr(&["swap", "--scenario", &unknown]);
    assert_eq!(output.status.code(), Some(1));

    let mismatch = write_scenario(
        dir.path(),
        "mismatch.json",
        r#"{"schema_version": 1, "kind": "swap", "a_sq": 0.75, "c_sq": 0.875}"#,
    );
    let output = qcorr(&["jcm", "--scenario", &mismatch]);
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8(output.stderr).unwrap();
    assert!(stderr.contains("does not match subcommand"), "{stderr}");
}

#[test]
fn missing_seed_for_random_hamiltonian_exits_1_and_flag_fixes_it() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(
        dir.path(),
        "evolve.json",
        r#"{"schema_version": 1, "kind": "evolve",
            "state": {"preset": "eq14"},
            "hamiltonian": {"kind": "random"},
            "acts_on": ["2", "3"],
            "times": [0.4, 0.8]}"#,
    );
    let output = qcorr(&["evolve", "--scenario", &path]);
    assert_eq!(output.status.code(), Some(1));
    let output = qcorr(&["evolve", "--scenario", &path, "--seed", "7"]);
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    let text = String::from_utf8(output.stdout).unwrap();
    assert_eq!(text.lines().count(), 3, "header plus two time rows");
}

#[test]
fn identical_runs_emit_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(
        dir.path(),
        "inv.json",
        r#"{"schema_version": 1, "kind": "invariants",
            "state": {"preset": "eq14"},
            "interacting": ["2", "3"], "trials": 5, "seed": 99,
            "format": "json"}"#,
    );
    let out_a = dir.path().join("a.json");
    let out_b = dir.path().join("b.json");
    for out in [&out_a, &out_b] {
        let output = qcorr(&[
            "invariants",
            "--scenario",
            &path,
            "--out",
            &out.to_string_lossy(),
        ]);
        assert_eq!(output.status.code(), Some(0), "{output:?}");
    }
    let a = std::fs::read(&out_a).unwrap();
    let b = std::fs::read(&out_b).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b, "same scenario and seed must emit identical bytes");
}

#[test]
fn jcm_scenario_decouples_field_at_protocol_times() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(
        dir.path(),
        "jcm.json",
        r#"{"schema_version": 1, "kind": "jcm",
            "t1": 0.7853981633974483, "t2": 1.5707963267948966,
            "format": "json"}"#,
    );
    let output = qcorr(&["jcm", "--scenario", &path]);
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    let report: Report = serde_json::from_slice(&output.stdout).unwrap();
    let qcorr_cli::report::Payload::Jcm {
        final_s_f,
        final_i_a1_a2,
        ..
    } = report.payload
    else {
        panic!("wrong payload kind");
    };
    assert!(final_s_f < 1e-10);
    assert!((final_i_a1_a2 - 2.0 * std::f64::consts::LN_2).abs() < 1e-9);
}

#[test]
fn sweep_scenario_reports_grid() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(
        dir.path(),
        "sweep.json",
        r#"{"schema_version": 1, "kind": "sweep",
            "a_sq_range": {"start": 0.5, "stop": 0.52, "step": 0.01},
            "c_sq_range": {"start": 0.9, "stop": 0.92, "step": 0.01}}"#,
    );
    let output = qcorr(&["sweep", "--scenario", &path]);
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    let text = String::from_utf8(output.stdout).unwrap();
    assert_eq!(text.lines().count(), 10, "header plus 3x3 grid rows");
}

// The verification suite keeps the all-outcomes transfer-bound criterion
// faithful to its statement, and that criterion fails (the Phi branches
// concentrate entanglement), so selftest exits 2 and says which criterion.
#[test]
fn selftest_reports_criteria_and_flags_the_known_red_one() {
    let output = qcorr(&["selftest"]);
    assert_eq!(output.status.code(), Some(2));
    let stdout = String::from_utf8(output.stdout).unwrap();
    let pass_lines = stdout.lines().filter(|l| l.starts_with("PASS")).count();
    let fail_lines: Vec<&str> = stdout.lines().filter(|l| l.starts_with("FAIL")).collect();
    assert_eq!(pass_lines, 9);
    assert_eq!(fail_lines.len(), 1);
    assert!(fail_lines[0].contains("criterion  2"), "{}", fail_lines[0]);
}
