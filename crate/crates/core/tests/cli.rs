//! End-to-end checks of the installed binary: exit codes, output
//! shapes, determinism, and file output.

use std::process::Command;

use minqet::report::{
    AuditReport, CurveReport, OptimizeReport, SimulateReport, SweepReport, VerifyReport,
};

fn run(args: &[&str]) -> (String, String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_minqet"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        String::from_utf8(out.stdout).expect("utf-8 stdout"),
        String::from_utf8(out.stderr).expect("utf-8 stderr"),
        out.status.code().unwrap_or(-1),
    )
}

#[test]
fn reports_parse_back_into_their_types() {
    let (stdout, _, code) = run(&["simulate", "--h", "1", "--k", "2", "--wait", "0.3"]);
    assert_eq!(code, 0);
    let report: SimulateReport = serde_json::from_str(&stdout).unwrap();
    assert_eq!(report.params.k, 2.0);
    assert_eq!(report.wait_time, 0.3);
    assert_eq!(report.branch_details.len(), 2);

    let (stdout, _, code) = run(&["optimize", "--h", "0.5", "--k", "1.5"]);
    assert_eq!(code, 0);
    let report: OptimizeReport = serde_json::from_str(&stdout).unwrap();
    assert!(report.e_b_max > 0.0);
    assert_eq!(report.e_b_max_over_k, report.e_b_max / 1.5);

    let (stdout, _, code) = run(&["curve", "--h", "1", "--k", "1", "--samples", "32"]);
    assert_eq!(code, 0);
    let report: CurveReport = serde_json::from_str(&stdout).unwrap();
    assert_eq!(report.n_samples, 32);
    assert_eq!(report.samples.len(), 32);

    let (stdout, _, code) = run(&["sweep", "--x-min", "0.5", "--x-max", "2", "--n", "5"]);
    assert_eq!(code, 0);
    let report: SweepReport = serde_json::from_str(&stdout).unwrap();
    assert_eq!(report.rows.len(), 5);
    assert!(report.sup_estimate.value <= 0.13);

    let (stdout, _, code) = run(&["audit", "--h", "1", "--k", "1", "--e-cc", "4.5"]);
    assert_eq!(code, 0);
    let report: AuditReport = serde_json::from_str(&stdout).unwrap();
    assert_eq!(report.e_cc, Some(4.5));
    assert_eq!(report.epsilon, 1e-3);

    let (stdout, _, code) = run(&["verify", "--h", "2", "--k", "0.7"]);
    assert_eq!(code, 0);
    let report: VerifyReport = serde_json::from_str(&stdout).unwrap();
    assert!(report.all_structural_pass);
    assert_eq!(report.formula_rows.len(), 5);
}

#[test]
fn validation_failures_exit_1_with_clean_stdout() {
    for args in [
        vec!["optimize", "--h", "0", "--k", "1"],
        vec!["optimize", "--h", "1", "--k", "-3"],
        vec!["audit", "--h", "1", "--k", "1", "--epsilon", "2"],
        vec!["curve", "--h", "1", "--k", "1", "--samples", "1"],
        vec!["sweep", "--x-min", "5", "--x-max", "1", "--n", "10"],
        vec!["simulate", "--h", "1", "--k", "1", "--format", "csv"],
        vec!["verify", "--h", "1", "--k", "1", "--format", "csv"],
    ] {
        let (stdout, stderr, code) = run(&args);
        assert_eq!(code, 1, "args {args:?}");
        assert!(stdout.is_empty(), "stdout not clean for {args:?}");
        assert!(stderr.starts_with("error:"), "stderr for {args:?}: {stderr}");
    }
}

#[test]
fn usage_errors_exit_1_and_help_exits_0() {
    let (_, stderr, code) = run(&["teleport"]);
    assert_eq!(code, 1);
    assert!(stderr.contains("Usage") || stderr.contains("error"));

    let (stdout, _, code) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("simulate"));
    assert!(stdout.contains("verify"));

    let (stdout, _, code) = run(&["--version"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("minqet"));
}

#[test]
fn csv_outputs_have_contract_headers() {
    let (stdout, _, code) = run(&["curve", "--h", "1", "--k", "1", "--samples", "8", "--format", "csv"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines[0], "t,energy_B");
    assert_eq!(lines.len(), 9);
    assert!(stdout.ends_with('\n'));
    assert!(!stdout.contains('\r'));
    let times: Vec<f64> = lines[1..]
        .iter()
        .map(|l| l.split(',').next().unwrap().parse().unwrap())
        .collect();
    assert!(times.windows(2).all(|w| w[0] < w[1]));

    let (stdout, _, code) = run(&[
        "sweep", "--x-min", "0.5", "--x-max", "2", "--n", "4", "--format", "csv",
    ]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines[0], "x,theta_star,eb_over_k");
    assert_eq!(lines.len(), 5);
}

#[test]
fn output_flag_writes_the_report_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let (stdout, _, code) = run(&[
        "optimize",
        "--h",
        "1",
        "--k",
        "1",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    let (direct, _, _) = run(&["optimize", "--h", "1", "--k", "1"]);
    assert_eq!(written, direct);

    let missing = dir.path().join("no-such-dir").join("report.json");
    let (_, stderr, code) = run(&[
        "optimize",
        "--h",
        "1",
        "--k",
        "1",
        "--output",
        missing.to_str().unwrap(),
    ]);
    assert_eq!(code, 1);
    assert!(stderr.contains("cannot write"));
}

#[test]
fn repeated_runs_are_byte_identical_across_commands() {
    for args in [
        vec!["curve", "--h", "0.3", "--k", "2.2", "--samples", "24"],
        vec!["sweep", "--x-min", "0.2", "--x-max", "5", "--n", "7"],
        vec!["verify", "--h", "1", "--k", "1"],
    ] {
        let (first, _, code_a) = run(&args);
        let (second, _, code_b) = run(&args);
        assert_eq!(code_a, 0);
        assert_eq!(code_b, 0);
        assert_eq!(first, second, "nondeterministic output for {args:?}");
    }
}
