use std::path::Path;
use std::process::Command;

use nclp::io::{StateJson, SuperOpJson, SuperOpKind};
use nclp::qubit::{qubit_map, qubit_state};
use nclp::{State, SuperOperator};
use serde_json::Value;

fn nclp() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nclp"))
}

fn write_inputs(dir: &Path, map: &SuperOperator, state: &State) -> (String, String) {
    let m = dir.join("map.json");
    let s = dir.join("state.json");
    std::fs::write(&m, serde_json::to_string(&SuperOpJson::from_superop(map, SuperOpKind::Choi)).unwrap()).unwrap();
    std::fs::write(&s, serde_json::to_string(&StateJson::from_state(state)).unwrap()).unwrap();
    (m.display().to_string(), s.display().to_string())
}

fn norm_json(map: &SuperOperator, state: &State, p: &str, theta: &str) -> Value {
    let dir = tempfile::tempdir().unwrap();
    let (m, s) = write_inputs(dir.path(), map, state);
    let out = nclp()
        .args(["norm", "--map", &m, "--state", &s, "--p", p, "--theta", theta])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn norm_of_identity_is_one_with_bound() {
    let state = qubit_state(0.3).unwrap();
    for (p, theta) in [("1", "0"), ("1.5", "0.2"), ("3", "0.9")] {
        let v = norm_json(&SuperOperator::identity(2), &state, p, theta);
        assert!((v["lower_bound"].as_f64().unwrap() - 1.0).abs() < 1e-10, "{v}");
        assert!((v["upper_bound"].as_f64().unwrap() - 1.0).abs() < 1e-10, "{v}");
        assert_eq!(v["cp"], Value::Bool(true));
        assert_eq!(v["unital"], Value::Bool(true));
    }
}

#[test]
fn norm_of_qubit_map_without_applicable_bound() {
    let v = norm_json(&qubit_map(0.6).unwrap(), &qubit_state(0.6).unwrap(), "1", "0");
    assert!(v["lower_bound"].as_f64().unwrap() >= 1.224_744, "{v}");
    assert!(v.get("upper_bound").is_none(), "{v}");
    assert_eq!(v["witness"].as_array().unwrap().len(), 2);
}

#[test]
fn norm_of_qubit_map_at_p2() {
    let v = norm_json(&qubit_map(0.6).unwrap(), &qubit_state(0.6).unwrap(), "2", "0");
    assert!((v["lower_bound"].as_f64().unwrap() - 1.0).abs() < 1e-6, "{v}");
    assert!((v["upper_bound"].as_f64().unwrap() - 1.0).abs() < 1e-6, "{v}");
    assert_eq!(v["bound_source"], "Thm41");
}

#[test]
fn norm_rejects_bad_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let (m, _) = write_inputs(dir.path(), &SuperOperator::identity(2), &qubit_state(0.3).unwrap());
    let bad_state = dir.path().join("bad.json");
    std::fs::write(&bad_state, r#"{"dim": 2, "gamma": [[[1, 0], [0, 0]], [[0, 0], [0, 0]]]}"#).unwrap();
    let out = nclp()
        .args(["norm", "--map", &m, "--state", bad_state.to_str().unwrap(), "--p", "1.5", "--theta", "0.3"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    let wrong_dim = dir.path().join("g3.json");
    std::fs::write(&wrong_dim, serde_json::to_string(&StateJson::from_state(&State::maximally_mixed(3))).unwrap()).unwrap();
    let out = nclp()
        .args(["norm", "--map", &m, "--state", wrong_dim.to_str().unwrap(), "--p", "1.5", "--theta", "0.3"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    let garbage = dir.path().join("garbage.json");
    std::fs::write(&garbage, "{ not json").unwrap();
    let out = nclp()
        .args(["norm", "--map", garbage.to_str().unwrap(), "--state", &m, "--p", "1.5", "--theta", "0.3"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn counterexample_outputs() {
    let out = nclp().args(["counterexample", "--p", "1", "--theta", "0"]).output().unwrap();
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["witness"]["m_value"].as_f64().unwrap() > 1.0);
    assert!(v["rows_to_exceed_10"].as_u64().unwrap() >= 1);

    let out = nclp().args(["counterexample", "--p", "1.5", "--theta", "0.5"]).output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "none");

    let out = nclp().args(["counterexample", "--p", "1.1", "--theta", "0.95"]).output().unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["witness"]["m_value"].as_f64().unwrap() > 1.0 + 1e-6);

    let out = nclp().args(["counterexample", "--p", "2.5", "--theta", "0.1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bounded"));
}

#[test]
fn phase_diagram_to_file_and_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.csv");
    let out = nclp()
        .args(["phase-diagram", "--p-min", "1.5", "--p-max", "3", "--theta-step", "0.1", "--out"])
        .arg(&path)
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("p,theta,status,source,family_max\n"));
    assert!(text.lines().any(|l| l == "3,0.9,bounded,Thm41,"));

    let out = nclp()
        .args(["phase-diagram", "--p-min", "1.5", "--p-max", "3", "--theta-step", "0.1"])
        .output()
        .unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), text);

    let out = nclp().args(["phase-diagram", "--p-min", "0.5"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = nclp()
        .args(["phase-diagram", "--out", "/nonexistent-dir/x.csv"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn thread_cap_does_not_change_output() {
    let run = |threads: &str| {
        nclp()
            .env("NCLP_THREADS", threads)
            .args(["phase-diagram", "--p-max", "2", "--p-step", "0.25", "--theta-step", "0.1", "--with-family"])
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(run("1"), run("3"));
}

#[test]
fn verify_passes_and_is_deterministic() {
    let a = nclp().args(["verify"]).output().unwrap();
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stdout));
    let b = nclp().args(["verify", "--seed", "0xC0FFEE"]).output().unwrap();
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["passed"], Value::Bool(true));
}

#[test]
fn invalid_flags_exit_with_2() {
    let out = nclp().args(["norm", "--p", "1.5"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = nclp().args(["verify", "--seed", "nope"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
