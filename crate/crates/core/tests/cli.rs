use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quadinter")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

#[test]
fn classgroup_of_minus_23() {
    let v = json(&["classgroup", "--D", "-23"]);
    let g = &v["result"]["group"];
    assert_eq!(g["h"], 3);
    let classes: Vec<(i64, i64, i64)> = g["classes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| (f["a"].as_i64().unwrap(), f["b"].as_i64().unwrap(), f["c"].as_i64().unwrap()))
        .collect();
    assert_eq!(classes.len(), 3);
    for f in [(1, 1, 6), (2, 1, 3), (2, -1, 3)] {
        assert!(classes.contains(&f), "{classes:?}");
    }
    assert_eq!(v["seed"], 1);
}

#[test]
fn repnum_splits_zero() {
    let v = json(&["repnum", "--D", "-23", "--m", "2"]);
    let r = &v["result"];
    assert_eq!(r["total"], 0);
    assert!((r["eisenstein"].as_f64().unwrap() - 4.0 / 3.0).abs() < 1e-10);
    assert!((r["cuspidal"].as_f64().unwrap() + 4.0 / 3.0).abs() < 1e-10);
}

#[test]
fn delta_detects_nonzero() {
    let v = json(&["delta", "--Q", "5", "--m", "7"]);
    let val = v["result"]["rows"][0]["value"].as_f64().unwrap();
    assert!(val.abs() < 1e-6);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(run(&["classgroup", "--D", "-12"]).status.code(), Some(2));
    assert_eq!(run(&["repnum", "--D", "-23"]).status.code(), Some(2));
    let out = run(&["expsum", "--q1", "49", "--q2", "49", "--mvec", "1,2,3,4", "--budget", "1000"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));
    assert_eq!(run(&["count", "--model", "/nonexistent/model.json", "--B", "10"]).status.code(), Some(2));
}

#[test]
fn output_is_reproducible() {
    let args = ["sigint", "--model", "toy", "--samples", "100000", "--seed", "9"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn csv_output() {
    let out = run(&["count", "--B", "20", "--samples", "100000", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("B,lhs,S_trunc,J,main_term,ratio,twisted_max_ratio"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row.len(), 7);
    assert_eq!(row[0], "20");
}

#[test]
fn expsum_and_laws() {
    let v = json(&["expsum", "--model", "toy", "--q1", "1", "--q2", "3", "--D", "-4", "--k", "1", "--mvec", "0,0"]);
    assert!((v["result"]["re"].as_f64().unwrap() - 6.0).abs() < 1e-9);
    let out = run(&["verify-laws", "--p", "5", "--c", "1", "--mvec", "1,2,3,1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn density_reports() {
    let v = json(&["density", "--p", "5", "--ell", "1"]);
    assert_eq!(v["result"]["two_path"]["agree"], true);
    let v = json(&["density", "--model", "ternary", "--P", "10"]);
    assert_eq!(v["result"]["series"]["certified"], true);
    // r = 2: the local densities diverge
    assert_eq!(run(&["density", "--model", "toy", "--P", "10"]).status.code(), Some(2));
}
