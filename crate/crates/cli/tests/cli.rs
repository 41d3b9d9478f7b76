use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn fracmax(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracmax"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn report(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn dim_of_power_sequence() {
    let out = TempDir::new().unwrap();
    let o = fracmax(&["dim", "--config", config("dim_power.json").to_str().unwrap()], out.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&out.path().join("dim.json"));
    let v = r["estimates"][0]["value"].as_f64().unwrap();
    assert!((v - 0.5).abs() < 0.05, "{v}");
    assert_eq!(r["manifest"]["subcommand"], "dim");
    let table = fs::read_to_string(out.path().join("dim_entropy.csv")).unwrap();
    assert!(table.starts_with("delta,N,"));
}

#[test]
fn dim_of_middle_thirds_cantor_block() {
    let out = TempDir::new().unwrap();
    let o = fracmax(&["dim", "--config", config("dim_cantor.json").to_str().unwrap()], out.path());
    assert_eq!(o.status.code(), Some(0));
    let v = report(&out.path().join("dim.json"))["estimates"][0]["value"].as_f64().unwrap();
    assert!((v - 2f64.ln() / 3f64.ln()).abs() < 0.03, "{v}");
}

#[test]
fn failed_expectation_exits_two() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        r#"{"E": {"generator": {"kind": "power_sequence", "a": 1.0}}, "expect": {"value": 0.9, "tolerance": 0.01}}"#,
    );
    let o = fracmax(&["dim", "--config", cfg.to_str().unwrap()], &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(report(&dir.path().join("out/dim.json"))["pass"], false);
}

#[test]
fn empty_set_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"E": {"generator": {"kind": "explicit_points", "points": []}}}"#);
    let o = fracmax(&["dim", "--config", cfg.to_str().unwrap()], &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(1));
    assert!(!String::from_utf8_lossy(&o.stderr).is_empty());
}

#[test]
fn malformed_config_reports_position() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "c.json", "{\n  \"E\": {\n    \"generator\": \n}\n");
    let o = fracmax(&["dim", "--config", cfg.to_str().unwrap()], &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("c.json:4:1"), "{err}");
}

#[test]
fn unknown_config_field_is_rejected() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"methodz": []}"#);
    let o = fracmax(&["dim", "--config", cfg.to_str().unwrap()], &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("methodz"));
}

#[test]
fn missing_config_and_bad_arguments_exit_one() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("nope.json");
    assert_eq!(fracmax(&["dim", "--config", missing.to_str().unwrap()], dir.path()).status.code(), Some(1));
    assert_eq!(fracmax(&["verify", "--suite", "everything"], dir.path()).status.code(), Some(1));
    assert_eq!(fracmax(&["verify", "--workers", "0"], dir.path()).status.code(), Some(1));
    assert_eq!(fracmax(&["frobnicate"], dir.path()).status.code(), Some(1));
    assert_eq!(fracmax(&["--help"], dir.path()).status.code(), Some(0));
}

#[test]
fn verify_fraccalc_suite() {
    let out = TempDir::new().unwrap();
    let o = fracmax(&["verify", "--suite", "fraccalc", "--seed", "3"], out.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let r = report(&out.path().join("verify_fraccalc.json"));
    assert_eq!(r["failed"], 0);
    assert_eq!(r["manifest"]["seed"], 3);
    assert!(r["checks"].as_array().unwrap().iter().all(|c| c["criterion"] == 5));
    assert!(String::from_utf8_lossy(&o.stdout).lines().all(|l| !l.starts_with("FAIL")));
    assert!(out.path().join("verify_fraccalc_timings.csv").exists());
}

#[test]
fn halfwave_experiment_is_reproducible() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let cfg = config("experiment_halfwave.json");
    for out in [&a, &b] {
        let o = fracmax(&["experiment", "--config", cfg.to_str().unwrap()], out.path());
        assert_eq!(o.status.code(), Some(0));
    }
    let r = report(&a.path().join("experiment.json"));
    assert!(r["result"]["beta_fit"].as_f64().unwrap() >= 0.4);
    assert_eq!(r["manifest"]["seed"], 7);
    let strip = |p: &Path| {
        let mut v = report(p);
        v["manifest"]["output_dir"] = Value::Null;
        serde_json::to_string(&v).unwrap()
    };
    assert_eq!(strip(&a.path().join("experiment.json")), strip(&b.path().join("experiment.json")));
    assert_eq!(
        fs::read(a.path().join("halfwave.csv")).unwrap(),
        fs::read(b.path().join("halfwave.csv")).unwrap()
    );
}

#[test]
fn seed_flag_overrides_config_seed() {
    let out = TempDir::new().unwrap();
    let cfg = config("experiment_lemma31.json");
    let o = fracmax(&["experiment", "--config", cfg.to_str().unwrap(), "--seed", "11"], out.path());
    assert_eq!(o.status.code(), Some(0));
    let r = report(&out.path().join("experiment.json"));
    assert_eq!(r["manifest"]["seed"], 11);
    assert_eq!(r["config"]["seed"], 11);
    assert!(out.path().join("pixel_ratios.csv").exists());
}
