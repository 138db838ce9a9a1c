//! End-to-end runs of the `plategap` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_plategap"))
        .args(args)
        .output()
        .unwrap()
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn error(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stderr);
    let line = text
        .lines()
        .find(|l| l.starts_with("{\"error\""))
        .expect("error json on stderr");
    serde_json::from_str::<Value>(line).unwrap()["error"].clone()
}

#[test]
fn sine_limit_on_the_free_plate() {
    let v = json(&[
        "gap",
        "--force",
        "sin:1",
        "--reinforcement",
        "none",
        "--format",
        "json",
    ]);
    assert!((v["max_gap"].as_f64().unwrap() * 1e4 - 65.444).abs() < 5e-4);
    assert!((v["argmax"].as_f64().unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-9);
    assert!(v["curve"].as_array().unwrap().len() > 100);
    let s = json(&["solve", "--force", "sin:1", "--format", "json"]);
    assert_eq!(s["max_gap"], v["max_gap"]);
}

#[test]
fn even_force_has_no_gap() {
    for r in ["none", "cross:1", "strips"] {
        let s = json(&[
            "solve",
            "--force",
            "even-test",
            "--reinforcement",
            r,
            "--format",
            "json",
        ]);
        assert!(s["max_gap"].as_f64().unwrap().abs() < 1e-12, "{r}");
    }
}

#[test]
fn cross_optimum() {
    let out = run(&[
        "optimize",
        "--class-d",
        "cross:0..5",
        "--class-f",
        "sin:1..10",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let best = v["best_reinforcement"].as_u64().unwrap() as usize;
    assert_eq!(v["reinforcements"][best], "D0");
    assert_eq!(v["best_force"], 0);
    assert!((v["value"].as_f64().unwrap() * 1e4 - 47.113).abs() < 5e-4);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("optimum (D0, sin(1x)/limit) with maximal gap 47.11284e-4"),
        "{stderr}"
    );
}

#[test]
fn bad_force_spec_is_a_json_error() {
    let out = run(&["solve", "--force", "bogus"]);
    assert_eq!(out.status.code(), Some(2));
    let e = error(&out);
    assert_eq!(e["kind"], "spec");
    assert!(e["message"].as_str().unwrap().contains("bogus"));
}

#[test]
fn invalid_parameter_is_rejected() {
    let out = run(&["solve", "--force", "sin:1", "--sigma", "1.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(error(&out)["message"].as_str().unwrap().contains("sigma"));
}

#[test]
fn config_errors_carry_line_column_and_field() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = dir.path().join("unknown.json");
    fs::write(&unknown, "{\"ell\": 0.02,\n \"sigmaa\": 0.2}").unwrap();
    let out = run(&[
        "solve",
        "--config",
        unknown.to_str().unwrap(),
        "--force",
        "sin:1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let e = error(&out);
    assert_eq!(
        (e["kind"].as_str(), e["line"].as_u64(), e["field"].as_str()),
        (Some("config"), Some(2), Some("sigmaa"))
    );

    let typed = dir.path().join("typed.json");
    fs::write(&typed, "{\n  \"terms\": 10,\n  \"ell\": \"wide\"\n}").unwrap();
    let e = error(&run(&[
        "solve",
        "--config",
        typed.to_str().unwrap(),
        "--force",
        "sin:1",
    ]));
    assert_eq!(
        (e["line"].as_u64(), e["field"].as_str()),
        (Some(3), Some("ell"))
    );

    let missing = dir.path().join("missing.json");
    let out = run(&[
        "solve",
        "--config",
        missing.to_str().unwrap(),
        "--force",
        "sin:1",
    ]);
    assert_ne!(out.status.code(), Some(0));
    assert_eq!(error(&out)["kind"], "io");
}

#[test]
fn config_file_sets_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(
        &cfg,
        "{\"force\": \"sin:1\", \"reinforcement\": \"cross:0\", \"mu\": 0.3, \"format\": \"json\"}",
    )
    .unwrap();
    let s = json(&["solve", "--config", cfg.to_str().unwrap()]);
    assert!((s["max_gap"].as_f64().unwrap() * 1e4 - 47.113).abs() < 5e-4);
}

fn dir_contents(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

#[test]
fn reruns_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        let out = run(&["table", "1a", "--out", d.path().to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        let out = run(&[
            "optimize",
            "--class-d",
            "cross:0..2",
            "--class-f",
            "sin:1..4",
            "--out",
            d.path().to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    let (fa, fb) = (dir_contents(a.path()), dir_contents(b.path()));
    assert!(fa.len() >= 4);
    assert_eq!(fa, fb);
}

#[test]
fn table_writes_reference_comparison() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["table", "1bis", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let names: Vec<String> = dir_contents(dir.path()).into_iter().map(|f| f.0).collect();
    assert_eq!(
        names,
        ["table_1bis.csv", "table_1bis.json", "table_1bis_diff.csv"]
    );
    let csv = fs::read_to_string(dir.path().join("table_1bis.csv")).unwrap();
    assert!(csv.lines().count() >= 3);
    let strict = run(&["table", "1bis", "--strict"]);
    assert_eq!(strict.status.code(), Some(0));
}

#[test]
fn strict_table_failure_has_its_own_exit_code() {
    let out = run(&["table", "2", "--strict"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn geometry_export() {
    let v = json(&["geometry", "--reinforcement", "cross:2", "--format", "json"]);
    let area = v["area"].as_f64().unwrap();
    let w = json(&["geometry", "--reinforcement", "cross:4", "--format", "json"]);
    assert!((w["area"].as_f64().unwrap() - area).abs() < 1e-12 * area);
}
