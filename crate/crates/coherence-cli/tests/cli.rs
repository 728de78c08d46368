//! End-to-end checks of the command-line interface: file round trips, exit
//! codes, and determinism of reports.

use std::path::PathBuf;
use std::process::{Command, Output};

use coherence::json;
use coherence::sio::{local_bit_flip, qubit_freeze_channel};
use coherence::states::{bell_diagonal, DensityMatrix};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_coherence"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn write_temp(name: &str, contents: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("coherence-cli-test-{}-{name}", std::process::id()));
    std::fs::write(&path, contents).unwrap();
    path
}

fn qubit_state_file(theta: f64) -> PathBuf {
    let mut m = coherence::linalg::CMatrix::zeros(2);
    m[(0, 0)] = num_complex::Complex64::new(0.6, 0.0);
    m[(1, 1)] = num_complex::Complex64::new(0.4, 0.0);
    m[(0, 1)] = num_complex::Complex64::from_polar(0.4, theta);
    m[(1, 0)] = m[(0, 1)].conj();
    let rho = DensityMatrix::new(m).unwrap();
    write_temp(&format!("state-{theta:.3}.json"), &json::state_to_string(&rho))
}

#[test]
fn measure_reports_both_quantifiers() {
    let state = write_temp(
        "plus.json",
        &json::state_to_string(&DensityMatrix::maximally_coherent(2)),
    );
    let out = run(&["measure", "--state", state.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("C_l1 = 1.0"), "{text}");
    assert!(text.contains("C_re = 1.0"), "{text}");
}

#[test]
fn apply_writes_a_valid_state_file() {
    let rho = bell_diagonal(0.6, -0.3, 0.5).unwrap();
    let state = write_temp("bell.json", &json::state_to_string(&rho));
    let channel = write_temp(
        "flip.json",
        &json::channel_to_string(&local_bit_flip(0.5).unwrap()),
    );
    let out = run(&[
        "apply",
        "--state",
        state.to_str().unwrap(),
        "--channel",
        channel.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let sigma = json::state_from_str(&stdout(&out)).unwrap();
    assert_eq!(sigma.dim(), 4);
}

#[test]
fn check_freeze_json_report_and_exit_codes() {
    // θ1 + θ2 + 2θ = 2π: frozen for the l1 norm.
    let phi = qubit_freeze_channel(0.3, std::f64::consts::FRAC_PI_2, 5.0 * std::f64::consts::PI / 6.0)
        .unwrap();
    let channel = write_temp("qfc.json", &json::channel_to_string(&phi));
    let frozen_state = qubit_state_file(std::f64::consts::FRAC_PI_3);
    let out = run(&[
        "check-freeze",
        "--state",
        frozen_state.to_str().unwrap(),
        "--channel",
        channel.to_str().unwrap(),
        "--measure",
        "l1",
        "--format",
        "json",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["operational_frozen"], serde_json::json!(true));
    assert_eq!(report["structural_frozen"], serde_json::json!(true));
    assert_eq!(report["agreement"], serde_json::json!(true));

    // Off the phase manifold: not frozen, still consistent (exit 0).
    let moved_state = qubit_state_file(std::f64::consts::FRAC_PI_4);
    let out = run(&[
        "check-freeze",
        "--state",
        moved_state.to_str().unwrap(),
        "--channel",
        channel.to_str().unwrap(),
        "--measure",
        "l1",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["operational_frozen"], serde_json::json!(false));
    assert_eq!(report["structural_frozen"], serde_json::json!(false));
}

#[test]
fn malformed_input_exits_2() {
    let bad = write_temp("bad.json", "{\"dim\": 2, \"entries\": [[1.0,");
    let out = run(&["measure", "--state", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());

    let incomplete = write_temp(
        "incomplete.json",
        "{\"dim\": 2, \"kraus\": [{\"perm\": [1, 2], \"coeffs\": [[0.5, 0.0], [0.5, 0.0]]}]}",
    );
    let state = qubit_state_file(0.0);
    let out = run(&[
        "check-freeze",
        "--state",
        state.to_str().unwrap(),
        "--channel",
        incomplete.to_str().unwrap(),
        "--measure",
        "l1",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn classify_sio_describes_mixed_unitary_structure() {
    let channel = write_temp(
        "lbf.json",
        &json::channel_to_string(&local_bit_flip(0.4).unwrap()),
    );
    let out = run(&["classify-sio", "--channel", channel.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("mixed-unitary decomposition: present"), "{text}");
    assert!(text.contains("4 Kraus operator(s)"), "{text}");
}

#[test]
fn x_decompose_reports_blocks() {
    let rho = bell_diagonal(0.6, -0.3, 0.5).unwrap();
    let state = write_temp("bellx.json", &json::state_to_string(&rho));
    let out = run(&[
        "x-decompose",
        "--state",
        state.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["pairing"], serde_json::json!([1, 3, 4, 2]));
    assert_eq!(v["lambdas"].as_array().unwrap().len(), 2);
}

#[test]
fn reproduce_commands_exit_zero() {
    let out = run(&["reproduce", "qubit", "--grid", "16"]);
    assert!(out.status.success(), "{}", stdout(&out));
    assert!(stdout(&out).contains("frozen ⇔"));

    let out = run(&["reproduce", "qutrit"]);
    assert!(out.status.success(), "{}", stdout(&out));
    assert!(stdout(&out).contains("verdicts consistent: true"));

    let out = run(&["reproduce", "bell", "--grid", "9", "--q", "0.5", "--format", "csv"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("c1,c2,c3,q,c_before,c_after,frozen,structural\n"));
}

#[test]
fn random_suite_is_byte_identical_across_runs() {
    let args = [
        "random-suite",
        "--trials",
        "12",
        "--seed",
        "5",
        "--dims",
        "2,3",
        "--format",
        "csv",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&b));
    assert!(stdout(&a).lines().count() > 12);
}
