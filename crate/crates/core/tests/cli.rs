use std::path::Path;
use std::process::{Command, Output};

use cmsim::scenarios::output::{parse_csv, JsonDoc};

fn cmsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cmsim")).args(args).output().expect("binary runs")
}

fn config(dir: &Path, json: &str) -> String {
    let p = dir.join("config.json");
    std::fs::write(&p, json).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn run_writes_csv_and_one_summary_line() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let res = cmsim(&["run", "thermalization", "--out", out]);
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));
    let stdout = String::from_utf8(res.stdout).unwrap();
    assert_eq!(stdout.lines().count(), 1);
    let line: serde_json::Value = serde_json::from_str(stdout.trim()).unwrap();
    assert_eq!(line["scenario"], "thermalization");
    assert_eq!(line["summary"]["monotone"], true);

    let csv = std::fs::read_to_string(dir.path().join("thermalization_0.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("# schema_version: 1"));
    assert_eq!(lines.next(), Some("step,E_S,Q_resource,Q_bath,W,S_S,S_anc,I_SE,Sigma,D_pair"));
    assert_eq!(parse_csv(&csv).unwrap().len(), 2000);
    assert!(!dir.path().join("thermalization_0.json").exists());
}

#[test]
fn run_keyword_is_optional() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let cfg = config(dir.path(), r#"{"n_steps": 10}"#);
    assert_eq!(cmsim(&["thermalization", "--config", &cfg, "--out", out, "--seed", "9"]).status.code(), Some(0));
    assert!(dir.path().join("thermalization_9.csv").exists());
}

#[test]
fn unknown_scenario_exits_2_and_lists_the_registry() {
    let res = cmsim(&["run", "thermalisation"]);
    assert_eq!(res.status.code(), Some(2));
    let err = String::from_utf8(res.stderr).unwrap();
    for name in ["thermalization", "nonmarkov_sweep", "battery", "two_qubit_local_global", "landauer", "continuous_limit"] {
        assert!(err.contains(name), "{err}");
    }
}

#[test]
fn bad_configs_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    for json in [r#"{"omgea": 1}"#, "{not json", r#"{"tau": -1}"#, r#"{"kappa": 1}"#] {
        let cfg = config(dir.path(), json);
        let res = cmsim(&["run", "thermalization", "--config", &cfg, "--out", out]);
        assert_eq!(res.status.code(), Some(3), "{json}");
    }
    let res = cmsim(&["run", "thermalization", "--config", "/nonexistent/cfg.json"]);
    assert_eq!(res.status.code(), Some(3));
}

#[test]
fn cap_exceeded_exits_3_with_the_dimension() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let cfg = config(dir.path(), r#"{"backend": "full", "n_steps": 12}"#);
    let res = cmsim(&["run", "thermalization", "--config", &cfg, "--out", out]);
    assert_eq!(res.status.code(), Some(3));
    let err = String::from_utf8(res.stderr).unwrap();
    assert!(err.contains("8192") && err.contains("13"), "{err}");
}

#[test]
fn non_convergence_exits_5() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let cfg = config(dir.path(), r#"{"n_steps": 60}"#);
    let res = cmsim(&["run", "battery", "--config", &cfg, "--out", out]);
    assert_eq!(res.status.code(), Some(5), "{}", String::from_utf8_lossy(&res.stderr));
    assert!(!dir.path().join("battery_0.csv").exists());
}

#[test]
fn exit_codes_by_error_kind() {
    use cmsim::cli::exit_code;
    use cmsim::Error;
    assert_eq!(exit_code(&Error::Integrity { step: 3, min_eig: -1e-6 }), 4);
    assert_eq!(exit_code(&Error::Ledger { step: 1, what: "x".into() }), 4);
    assert_eq!(exit_code(&Error::NotConverged { drift: 1.0 }), 5);
    assert_eq!(exit_code(&Error::CapExceeded { factors: 12, dim: 4096, cap: 10 }), 3);
    assert_eq!(exit_code(&Error::Config("x".into())), 3);
}

#[test]
fn csv_and_json_carry_identical_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let res = cmsim(&["run", "landauer", "--out", out, "--emit", "both", "--seed", "3"]);
    assert_eq!(res.status.code(), Some(0));
    let csv = parse_csv(&std::fs::read_to_string(dir.path().join("landauer_3.csv")).unwrap()).unwrap();
    let doc: JsonDoc = serde_json::from_str(&std::fs::read_to_string(dir.path().join("landauer_3.json")).unwrap()).unwrap();
    assert_eq!(doc.scenario, "landauer");
    assert_eq!(doc.seed, 3);
    assert_eq!(doc.rows, csv);
    assert!(doc.summary["all_bounds_hold"].as_bool().unwrap());
}

#[test]
fn json_only_and_pair_distances() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let cfg = config(dir.path(), r#"{"p_grid": [0, 1]}"#);
    let res = cmsim(&["run", "nonmarkov_sweep", "--config", &cfg, "--out", out, "--emit", "json"]);
    assert_eq!(res.status.code(), Some(0));
    assert!(!dir.path().join("nonmarkov_sweep_0.csv").exists());
    let doc: JsonDoc = serde_json::from_str(&std::fs::read_to_string(dir.path().join("nonmarkov_sweep_0.json")).unwrap()).unwrap();
    assert!(doc.rows.iter().all(|r| r.d_pair.is_some()));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg = config(a.path(), r#"{"aa_mode": "incoherent", "p_grid": [0.5]}"#);
    for d in [&a, &b] {
        let res = cmsim(&["run", "nonmarkov_sweep", "--config", &cfg, "--out", d.path().to_str().unwrap(), "--seed", "42", "--emit", "both"]);
        assert_eq!(res.status.code(), Some(0));
    }
    for f in ["nonmarkov_sweep_42.csv", "nonmarkov_sweep_42.json"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn log_base_flag() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let cfg = config(dir.path(), r#"{"n_steps": 5}"#);
    assert_eq!(cmsim(&["run", "thermalization", "--config", &cfg, "--out", out, "--log-base", "e"]).status.code(), Some(0));
    assert_eq!(cmsim(&["run", "thermalization", "--log-base", "10"]).status.code(), Some(2));
}
