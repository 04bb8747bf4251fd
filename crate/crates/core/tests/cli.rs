use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ckint(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ckint"))
        .args(args)
        .output()
        .expect("ckint runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn csv_rows(path: &Path) -> Vec<Vec<f64>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect()
}

#[test]
fn spaces_lists_nine_planes() {
    let out = ckint(&["spaces"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 10);

    let rows = stdout_json(&ckint(&["spaces", "--format", "json"]));
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 9);
    let by_name = |n: &str| rows.iter().find(|r| r["name"] == n).unwrap().clone();
    let g = by_name("galilei");
    assert_eq!((g["kappa1"].as_i64(), g["kappa2"].as_i64()), (Some(0), Some(0)));
    assert_eq!(g["degenerate"], true);
    assert_eq!(by_name("minkowski")["default_sign"].as_f64(), Some(-1.0));
}

#[test]
fn galilei_free_flow_keeps_q2_fixed() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("g.csv");
    let out = ckint(&[
        "simulate", "--space", "galilei", "--family", "free", "--q", "1,2", "--p", "0.5,-0.3", "--steps", "2000",
        "--out", csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = csv_rows(&csv);
    assert_eq!(rows.len(), 2001);
    assert!(rows.iter().all(|r| r[2] == 2.0));
    assert!(rows.last().unwrap()[1] != 1.0);
}

#[test]
fn euclidean_free_sidecar_reports_the_conic() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("e.csv");
    let out = ckint(&[
        "simulate", "--space", "euclidean", "--family", "free", "--b1", "1", "--b2", "1", "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let side = read_json(&dir.path().join("e.json"));
    assert!(side["conic"]["residual"].as_f64().unwrap() < 1e-6);
    assert!(side["energy_drift"].as_f64().unwrap() < 1e-6);
    assert_eq!(side["samples"], 10_001);
    assert_eq!(side["space"], "euclidean");
}

#[test]
fn simulate_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let out = ckint(&[
            "simulate", "--space", "anti-de-sitter", "--family", "kc", "--variant", "superintegrable", "--z", "0.2",
            "--q", "0.4,1.1", "--p", "0.1,-0.2", "--b1", "0.1", "--b2", "0.2", "--steps", "500", "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        std::fs::read(path).unwrap()
    };
    assert_eq!(run("a.csv"), run("b.csv"));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"space": "galilei", "steps": 4, "format": "json"}"#).unwrap();
    let doc = stdout_json(&ckint(&["simulate", "--config", cfg.to_str().unwrap(), "--steps", "2"]));
    assert_eq!(doc["summary"]["space"], "galilei");
    assert_eq!(doc["times"].as_array().unwrap().len(), 3);
}

#[test]
fn galilei_smorodinsky_winternitz_split() {
    let (b2, beta0, r, pr) = (0.7, 0.3, 1.5, 0.4);
    let split = |family: &str| {
        stdout_json(&ckint(&[
            "split", "--space", "galilei", "--coords", "polar", "--family", family, "--b2", "0.7", "--beta0", "0.3",
            "--r", "1.5", "--theta", "0.6", "--pr", "0.4", "--ptheta", "0.2", "--steps", "100",
        ]))
    };
    let sw = split("sw");
    let expected = 0.5 * (pr * pr + 4.0 * b2 / (r * r)) + beta0 * r * r;
    assert!((sw["base"]["value"].as_f64().unwrap() - expected).abs() < 1e-12);
    assert!(sw["base"]["drift"].as_f64().unwrap() < 1e-8);

    let kc = split("kc");
    assert_eq!(sw["fiber"]["value"], kc["fiber"]["value"]);
    assert_eq!(sw["fiber"]["states"], kc["fiber"]["states"]);
}

#[test]
fn split_refuses_non_degenerate_spaces() {
    let out = ckint(&["split", "--space", "euclidean"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("simulate"));
}

#[test]
fn usage_and_domain_errors_exit_2() {
    assert_eq!(ckint(&["simulate", "--space", "nowhere"]).status.code(), Some(2));
    assert_eq!(ckint(&["simulate", "--space", "sphere", "--kappa1", "0", "--kappa2", "0"]).status.code(), Some(2));
    assert_eq!(ckint(&["simulate", "--kappa1", "3", "--kappa2", "0"]).status.code(), Some(2));
    assert_eq!(ckint(&["simulate", "--bogus"]).status.code(), Some(2));
    // q1 = 0 sits on the barrier b1/q1²
    let out = ckint(&["simulate", "--q", "0,1", "--steps", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_passes_and_repeats() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let out = ckint(&["verify", "--suite", "split", "--samples", "20", "--seed", "3", "--out", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        std::fs::read(path).unwrap()
    };
    let a = run("a.json");
    assert_eq!(a, run("b.json"));
    let report: Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(report["pass"], true);
}

#[test]
fn geometry_marks_degenerate_curvature() {
    let doc = stdout_json(&ckint(&["geometry", "--space", "newton-plus", "--r", "0.5,1.0"]));
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows[0]["curvature"].is_null());
    assert!(rows[0]["note"].is_string());
    let doc = stdout_json(&ckint(&["geometry", "--space", "sphere"]));
    assert_eq!(doc["rows"].as_array().unwrap().len(), 10);
    assert!(doc["rows"][4]["curvature"].as_f64().unwrap() < 0.0);
}
