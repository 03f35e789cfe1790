//! End-to-end checks of the `pptdisc` binary: exit codes, report
//! determinism, and the problem-file round trip.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pptdisc"))
}

#[test]
fn list_prints_the_seven_experiments() {
    let out = bin().arg("list").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 7);
    assert!(text.contains("theorem2"));
    assert!(text.contains("sdp-solve"));
}

#[test]
fn catalysis_run_is_deterministic_and_exits_zero() {
    let run = || {
        bin()
            .args(["catalysis", "--input", "2"])
            .output()
            .unwrap()
    };
    let a = run();
    let b = run();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout, "reports must be byte-identical");
    let report: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(report["ok"], serde_json::Value::Bool(true));
    assert_eq!(report["experiment"], "catalysis");
}

#[test]
fn usage_errors_exit_two() {
    let out = bin().args(["catalysis", "--input", "9"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().arg("theorem5").output().unwrap();
    assert_eq!(out.status.code(), Some(2), "clap rejects unknown commands");
    let out = bin()
        .args(["sdp-solve", "--in", "/nonexistent/problem.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "I/O failure is a usage error");
}

#[test]
fn analytic_route_passes_and_writes_reports() {
    let dir = std::env::temp_dir().join("pptdisc_cli_test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("theorem2.json");
    let out = bin()
        .args([
            "theorem2",
            "--method",
            "analytic",
            "--out",
            path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report["ok"], serde_json::Value::Bool(true));
    assert!(report["detail"]["analytic"]["contradiction_reached"]
        .as_bool()
        .unwrap());
}

#[test]
fn sdp_solve_round_trips_a_problem_file() {
    let instance = pptdisc::sdp::instances::bell_instance(2).unwrap();
    let problem = pptdisc::sdp::build_ppt_discrimination(&instance).unwrap();
    let dir = std::env::temp_dir().join("pptdisc_cli_test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("problem.json");
    std::fs::write(&path, serde_json::to_string(&problem).unwrap()).unwrap();
    let out = bin()
        .args(["sdp-solve", "--in", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    // Two orthogonal Bell states are perfectly distinguishable.
    let value = report["detail"]["primal_value"].as_f64().unwrap();
    assert!((value - 1.0).abs() <= 1e-6, "value {value}");
}

#[test]
fn channel_one_shot_verdict_is_honest_per_regime() {
    // Weak attachment: certified indistinguishable, exit 0.
    let out = bin()
        .args(["channel", "--delta", "0.01", "--shots", "1", "--format", "table"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    // Strong attachment: a verified PPT POVM decodes perfectly, so the
    // "less than 2 bits" verdict honestly fails with exit code 1.
    let out = bin()
        .args(["channel", "--delta", "0.3", "--shots", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    // Two uses at the strong attachment decode exactly: exit 0.
    let out = bin()
        .args(["channel", "--delta", "0.3", "--shots", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn theorem1_quick_run_exits_zero() {
    let out = bin()
        .args(["theorem1", "--trials", "5", "--format", "table"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("[PASS]"));
}
