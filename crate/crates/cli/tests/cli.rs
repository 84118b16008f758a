//! End-to-end checks of the command-line interface: subcommand contracts,
//! exit codes, deterministic re-runs, and the config-override path.

use std::process::{Command, Output};

fn lipap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lipap"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn discretize_half_power_sequence() {
    let out = lipap(&[
        "discretize", "--omega", "pow(0.5*r)", "--r", "2", "--lambda", "5", "--nmax", "200",
    ]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["sequence"]["mu"], serde_json::json!([1, 6, 31, 156]));
    assert_eq!(v["report"]["pass"], serde_json::json!(true));
}

#[test]
fn discretize_missing_lambda_is_usage_error() {
    let out = lipap(&["discretize", "--omega", "pow(0.5)", "--r", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn discretize_small_lambda_is_parameter_error() {
    let out = lipap(&[
        "discretize", "--omega", "pow(0.5)", "--r", "1", "--lambda", "3", "--nmax", "100",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn embed_classical_table_rows() {
    let cases = [
        (vec!["--d", "1", "--p", "1", "--r", "1", "--l", "0", "--omega", "pow(0.6)"], "ii", "embeds"),
        (vec!["--d", "2", "--p", "1", "--r", "1", "--l", "1", "--omega", "log(-0.5)"], "iii", "fails"),
        (vec!["--d", "3", "--p", "1", "--r", "1", "--l", "0", "--omega", "pow(0.9)"], "out-of-range", "fails"),
    ];
    for (args, case, verdict) in cases {
        let mut full = vec!["embed"];
        full.extend(args.iter().copied());
        let out = lipap(&full);
        assert!(out.status.success());
        let v = stdout_json(&out);
        assert_eq!(v["case"], serde_json::json!(case));
        assert_eq!(v["verdict"], serde_json::json!(verdict));
    }
}

#[test]
fn reruns_are_byte_identical() {
    let args = [
        "embed", "--d", "1", "--p", "1", "--r", "1", "--l", "0", "--omega", "pow(0.7)",
        "--constants", "--nmax", "256", "--seed", "9",
    ];
    let a = lipap(&args);
    let b = lipap(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn modulus_emits_csv() {
    let out = lipap(&[
        "modulus", "--family", "wave:1", "--r", "1", "--l", "0", "--q", "2", "--format", "csv",
        "--tcount", "4",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,value,h1,alpha1"));
    assert_eq!(lines.count(), 4);
}

#[test]
fn kkdl_pipeline_dominates() {
    let out = lipap(&[
        "kkdl", "--family", "decay:32,1.0", "--r", "1", "--l", "0", "--seed", "5",
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["report"]["domination_ok"], serde_json::json!(true));
}

#[test]
fn lemma22_random_pair() {
    let out = lipap(&[
        "lemma22", "--random", "64", "--p", "1", "--q", "0.5", "--r", "1", "--seed", "3",
    ]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    let ratio = v["ratio"].as_f64().unwrap();
    assert!(ratio.is_finite() && ratio > 0.0);
}

#[test]
fn bernstein_wave_ratio() {
    let out = lipap(&[
        "bernstein", "--family", "wave:64", "--l", "0", "--r", "1", "--nmin", "64",
    ]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    let direct = v["bernstein_ratio"].as_f64().unwrap();
    let closed = (1.0 + std::f64::consts::TAU * 64.0) / 64.0;
    assert!((direct - closed).abs() / closed < 1e-6);
    let rev = v["reverse_bernstein_ratio"].as_f64().unwrap();
    assert!(rev >= std::f64::consts::TAU - 1e-9);
}

#[test]
fn represent_power_majorant() {
    let out = lipap(&["represent", "--omega", "pow(0.5)", "--p", "1", "--r", "1", "--m", "128"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    let alpha = v["alpha"].as_array().unwrap();
    assert!(alpha.iter().all(|x| x.as_f64().unwrap() >= 0.0));
    let lower = v["lower"].as_f64().unwrap();
    let upper = v["upper"].as_f64().unwrap();
    assert!(upper / lower <= 8.0);
}

#[test]
fn config_overrides_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"omega": "pow(1.0)", "nmax": 200}"#).unwrap();
    // flags say pow(0.5) nmax 50; config wins
    let out = lipap(&[
        "discretize", "--omega", "pow(0.5)", "--r", "2", "--lambda", "5", "--nmax", "50",
        "--config", cfg.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["sequence"]["mu"], serde_json::json!([1, 6, 31, 156]));
}

#[test]
fn config_rejects_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"bogus": 1}"#).unwrap();
    let out = lipap(&[
        "discretize", "--omega", "pow(0.5)", "--r", "1", "--lambda", "5",
        "--config", cfg.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn poly_file_round_trip_through_modulus() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("poly.csv");
    // write a wave via the library's canonical layout
    let text = "d,n,real\n1,1,0\n1,1.0,0.0\n";
    std::fs::write(&path, text).unwrap();
    let out = lipap(&[
        "modulus", "--poly", path.to_str().unwrap(), "--r", "1", "--q", "2",
        "--tcount", "3", "--tmax", "0.5", "--tmin", "0.125",
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    // top of the grid: sup_{|h| <= 1/2} |1 - e^{2 pi i h}| = 2
    let top = v[0]["value"].as_f64().unwrap();
    assert!((top - 2.0).abs() < 1e-9);
}

#[test]
fn tabulated_majorant_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("omega.json");
    let values: Vec<f64> = (1..=4096u64).map(|n| (n as f64).powf(-0.8)).collect();
    std::fs::write(&table, serde_json::to_string(&values).unwrap()).unwrap();
    let spec = format!("table:{}", table.display());
    let out = lipap(&[
        "embed", "--d", "1", "--p", "1", "--r", "1", "--l", "0", "--omega", &spec,
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["verdict"], serde_json::json!("embeds"));
}

#[test]
fn embed_witness_growth_csv() {
    let dir = tempfile::tempdir().unwrap();
    let wpath = dir.path().join("growth.csv");
    let out = lipap(&[
        "embed", "--d", "1", "--p", "1", "--r", "1", "--l", "0", "--omega", "pow(0.5)",
        "--witness", "--witness-out", wpath.to_str().unwrap(), "--nmax", "128",
        "--iterations", "2", "--seed", "4",
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&wpath).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("nmax,ap_norm,lip_functional"));
    let rows: Vec<&str> = lines.collect();
    assert!(rows.len() >= 2);
}
