use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mfspin::config::RunConfig;

fn mfspin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mfspin"))
        .args(args)
        .env("MFSPIN_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"))
        .join("cli")
        .join(name);
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("config.json");
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn preset_output_parses_back() {
    let out = mfspin(&["preset", "fig3"]);
    assert!(out.status.success());
    let cfg = RunConfig::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert_eq!(cfg, mfspin::config::preset("fig3").unwrap().resolved());
    assert_eq!(mfspin(&["preset", "nope"]).status.code(), Some(2));
}

#[test]
fn bad_arguments_and_configs_exit_2() {
    assert_eq!(mfspin(&["entropy"]).status.code(), Some(2));
    assert_eq!(mfspin(&["run"]).status.code(), Some(2));
    let dir = scratch("bad");
    let cfg = write_config(
        &dir,
        r#"{"topology":"three_bath","alpha":-1,"omega0":2,"gamma":0.6,"temperatures":[1],"engines":["qg"],"output":"x"}"#,
    );
    assert_eq!(mfspin(&["run", "--config", &cfg]).status.code(), Some(2));
    let missing = dir.join("missing.json");
    assert_eq!(
        mfspin(&["run", "--config", missing.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn unwritable_output_exits_4() {
    let dir = scratch("io");
    let blocker = dir.join("file");
    std::fs::write(&blocker, "").unwrap();
    let output = blocker.join("sub").join("run");
    let cfg = write_config(
        &dir,
        &format!(
            r#"{{"topology":"three_bath","alpha":1,"omega0":2,"gamma":0.6,"temperatures":[1],"engines":["qg"],"output":{:?}}}"#,
            output.to_str().unwrap()
        ),
    );
    assert_eq!(mfspin(&["run", "--config", &cfg]).status.code(), Some(4));
}

#[test]
fn run_writes_csv_and_meta() {
    let dir = scratch("run");
    let stem = dir.join("nested").join("out");
    let cfg = write_config(
        &dir,
        r#"{"topology":"three_bath","alpha":0.1,"omega0":2,"gamma":0.6,
            "temperatures":[0, 0.5, 1],"engines":["weak","qg","cg","cmf"],"output":"ignored"}"#,
    );
    let out = mfspin(&["run", "--config", &cfg, "--output", stem.to_str().unwrap()]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let csv = std::fs::read_to_string(stem.with_extension("csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), mfspin::sweep::CSV_HEADER);
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 12);
    let engines: Vec<&str> = rows.iter().map(|r| r[0]).collect();
    assert_eq!(&engines[..4], &["qg", "qg", "qg", "cmf"]);
    assert_eq!(&engines[9..], &["weak_t0", "weak", "weak"]);
    // Bare Gibbs at t = 1: tanh(1/2).
    let qg: f64 = rows[2][5].parse().unwrap();
    assert!((qg - 0.5f64.tanh()).abs() < 1e-14);
    // CMF and CG rows agree to the byte.
    for i in 0..3 {
        assert_eq!(rows[3 + i][2..], rows[6 + i][2..]);
    }

    let meta: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.join("nested").join("out.meta.json")).unwrap(),
    )
    .unwrap();
    let echoed: RunConfig = serde_json::from_value(meta["config"].clone()).unwrap();
    assert_eq!(echoed.output, stem.to_str().unwrap());
    assert!(echoed.fock.is_some());
    assert_eq!(meta["versions"]["mfspin_core"], mfspin_core::VERSION);
}

#[test]
fn entropy_reports_zero_without_coupling() {
    let out = mfspin(&[
        "entropy",
        "--topology",
        "single",
        "--alpha",
        "0",
        "--t",
        "0",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["entropy_over_ln2"].as_f64().unwrap(), 0.0);
    assert_eq!(v["topology"], "single_bath");
}

#[test]
fn check_suites_pass_and_tampering_fails() {
    assert!(mfspin(&["check", "--suite", "invariants"]).status.success());
    assert!(mfspin(&["check", "--suite", "oracles"]).status.success());
    assert_eq!(
        mfspin(&["check", "--suite", "oracles", "--tamper-delta", "100"])
            .status
            .code(),
        Some(1)
    );
}
