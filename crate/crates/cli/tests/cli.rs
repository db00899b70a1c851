use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sha2::{Digest, Sha256};
use tempfile::TempDir;

fn qmix(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmix")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

fn preset(dir: &Path, scenario: &str) -> PathBuf {
    write_config(dir, &format!("{scenario}.json"), &format!("{{\"scenario\": \"{scenario}\"}}"))
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(path: PathBuf) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

const SMALL_SYSTEM: &str = r#"{"qubits": [{"omega": 0.4, "lambda": 0.13, "theta": 0.5235987755982988},
    {"omega": 0.6, "lambda": 0.13, "theta": 0.5235987755982988},
    {"omega": 1.0, "lambda": 0.005, "theta": 0.5235987755982988}], "omega_c": 1.325, "fock_cutoff": 5}"#;

#[test]
fn fig1b_run_writes_levels_and_manifest() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let o = qmix(&["run", "--config", s(&preset(dir.path(), "fig1b")), "--out", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("levels.csv")).unwrap();
    assert!(csv.starts_with("param,E1,E2,E3,E4,E5,E6,label1,"));
    assert_eq!(csv.lines().count(), 202);
    let ac = json(out.join("anticrossing.json"));
    let location = ac["report"]["location"].as_f64().unwrap();
    assert!((0.95..1.05).contains(&location));
    let inset = fs::read_to_string(out.join("levels_inset.csv")).unwrap();
    let first: f64 = inset.lines().nth(1).unwrap().split(',').next().unwrap().parse().unwrap();
    assert!((first - (location - 2e-3)).abs() < 1e-12);

    let manifest = json(out.join("manifest.json"));
    assert_eq!(manifest["command"], "run");
    assert_eq!(manifest["config"]["system"]["qubits"][2]["lambda"], 0.005);
    for file in manifest["files"].as_array().unwrap() {
        let bytes = fs::read(out.join(file["name"].as_str().unwrap())).unwrap();
        assert_eq!(file["sha256"].as_str().unwrap(), format!("{:x}", Sha256::digest(&bytes)));
    }
}

#[test]
fn ecc_run_reports_fourteen_perfect_rows() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let o = qmix(&["run", s(&preset(dir.path(), "ecc")), "--out", s(&out), "--seed", "3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = json(out.join("ecc.json"));
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 14);
    assert!(rows.iter().all(|r| (r["fidelity"].as_f64().unwrap() - 1.0).abs() < 1e-10));
    assert_eq!(json(out.join("manifest.json"))["config"]["seed"], 3);
}

#[test]
fn malformed_config_exits_2_without_outputs() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let bad = write_config(dir.path(), "bad.json", "{\"scenario\": \"fig1b\",");
    let o = qmix(&["run", "--config", s(&bad), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists() || fs::read_dir(&out).unwrap().next().is_none());
}

#[test]
fn unknown_field_is_named_and_rejected() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "typo.json", r#"{"scenario": "fig1b", "sweep": {"parameter": "omega_c", "from": 1, "to": 2, "points": 3, "levelz": 2}}"#);
    let o = qmix(&["validate", s(&cfg)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("levelz"));
}

#[test]
fn validate_reports_dispersive_warnings() {
    let dir = TempDir::new().unwrap();
    let o = qmix(&["validate", "--config", s(&preset(dir.path(), "fig1b"))]);
    assert!(o.status.success());
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(!stdout.contains("qubit 3"), "{stdout}");
    assert!(stdout.contains("ok"));

    let resonant = write_config(
        dir.path(),
        "resonant.json",
        r#"{"scenario": "custom", "system": {"qubits": [{"omega": 1.0, "lambda": 0.1}], "omega_c": 1.0}}"#,
    );
    let o = qmix(&["validate", s(&resonant)]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("warning: qubit 1"));
}

#[test]
fn numerical_failure_exits_3_without_outputs() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    // the minimum lies outside this bracket
    let cfg = write_config(
        dir.path(),
        "edge.json",
        &format!(
            r#"{{"scenario": "custom", "system": {SMALL_SYSTEM},
                "anticrossing": {{"parameter": "qubits[2].omega", "bracket": [0.90, 0.95], "pair": ["gge0", "eeg0"]}}}}"#
        ),
    );
    let o = qmix(&["anticross", "--config", s(&cfg), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!out.exists() || fs::read_dir(&out).unwrap().next().is_none());
}

#[test]
fn missing_section_is_a_validation_error() {
    let dir = TempDir::new().unwrap();
    let o = qmix(&["dynamics", "--config", s(&preset(dir.path(), "fig1b")), "--out", s(&dir.path().join("o"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn levels_are_byte_identical_across_runs_and_thread_counts() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "sweep.json",
        &format!(
            r#"{{"scenario": "custom", "system": {SMALL_SYSTEM},
                "sweep": {{"parameter": "qubits[2].omega", "from": 0.9, "to": 1.1, "points": 41, "levels": 5}}}}"#
        ),
    );
    let run = |name: &str, threads: &str| {
        let out = dir.path().join(name);
        let o = qmix(&["levels", s(&cfg), "--out", s(&out), "--threads", threads]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        fs::read(out.join("levels.csv")).unwrap()
    };
    let a = run("a", "1");
    assert_eq!(a, run("b", "1"));
    assert_eq!(a, run("c", "2"));
}

#[test]
fn cutoff_override_and_perturbation_output() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let o = qmix(&["perturb", s(&preset(dir.path(), "fig1b")), "--out", s(&out), "--cutoff", "6"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report = json(out.join("perturbation.json"));
    assert_eq!(report["paths"].as_array().unwrap().len(), 48);
    assert_eq!(json(out.join("manifest.json"))["config"]["system"]["fock_cutoff"], 6);
    let o = qmix(&["perturb", s(&preset(dir.path(), "fig1b")), "--out", s(&out), "--cutoff", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn short_dynamics_run() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let cfg = write_config(
        dir.path(),
        "dyn.json",
        &format!(
            r#"{{"scenario": "custom", "system": {SMALL_SYSTEM},
                "dynamics": {{"initial": "egg0", "t_end": 50.0, "samples": 11, "gamma": 0.01,
                              "observables": ["exc:1", "photons"]}}}}"#
        ),
    );
    let o = qmix(&["dynamics", s(&cfg), "--out", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("dynamics.csv")).unwrap();
    assert!(csv.starts_with("t,exc_q1,photons\n"));
    assert_eq!(csv.lines().count(), 12);
    let last: Vec<f64> = csv.lines().last().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    // single-qubit decay at rate ~gamma
    assert!(last[1] < 0.7 && last[1] > 0.5, "{last:?}");
}
