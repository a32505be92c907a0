use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn zicount(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zicount")).args(args).output().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn simulate_then_fit() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("zidl.txt");
    let out = zicount(&[
        "simulate", "--model", "ZIDL", "--mu", "2.5", "--sigma", "1.2", "--p", "0.15",
        "--n", "4000", "--seed", "5", "--out", path(&data),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let truth = read_json(&dir.path().join("zidl.txt.truth.json"));
    assert_eq!(truth["p"], 0.15);
    assert_eq!(truth["model"], "ZIDL");

    let again = dir.path().join("again.txt");
    zicount(&[
        "simulate", "--model", "ZIDL", "--mu", "2.5", "--sigma", "1.2", "--p", "0.15",
        "--n", "4000", "--seed", "5", "--out", path(&again),
    ]);
    assert_eq!(std::fs::read(&data).unwrap(), std::fs::read(&again).unwrap());

    let json = dir.path().join("fit.json");
    let out = zicount(&["fit", "--input", path(&data), "--family", "dln", "--zero-inflated", "--out", path(&json)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = read_json(&json);
    let rows = v["results"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    let (base, zi) = (&rows[0], &rows[1]);
    assert_eq!(base["model"], "DLN");
    assert_eq!(zi["model"], "ZIDL");
    assert!(zi["loglik"].as_f64().unwrap() > base["loglik"].as_f64().unwrap());
    assert!(zi["ks"].as_f64().unwrap() < base["ks"].as_f64().unwrap());
    assert!((zi["p"].as_f64().unwrap() - 0.15).abs() < 0.03);
    assert!((zi["params"]["mu"].as_f64().unwrap() - 2.5).abs() < 0.1);
    let table = String::from_utf8(out.stdout).unwrap();
    assert!(table.contains("ZIDL"));
}

#[test]
fn malformed_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("bad.txt");
    std::fs::write(&data, "3\nseven\n").unwrap();
    let out = zicount(&["fit", "--input", path(&data), "--family", "hooked"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let out = zicount(&["fit", "--input", path(&dir.path().join("missing.txt")), "--family", "dln"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn degenerate_data_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("fives.txt");
    std::fs::write(&data, "4\n".repeat(50)).unwrap();
    let out = zicount(&["fit", "--input", path(&data), "--family", "dln"]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["results"][0]["converged"], false);
}

#[test]
fn no_zeros_gives_identical_rows() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("cited.txt");
    std::fs::write(&data, "1\n2\n2\n3\n5\n8\n13\n4\n6\n1\n").unwrap();
    let out = zicount(&["fit", "--input", path(&data), "--family", "hooked", "--zero-inflated"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let (base, zi) = (&v["results"][0], &v["results"][1]);
    assert_eq!(base["loglik"], zi["loglik"]);
    assert_eq!(base["params"], zi["params"]);
    assert_eq!(zi["k"], 0);
}

#[test]
fn curves_end_at_one_and_reject_unshifted_models() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d.txt");
    std::fs::write(&data, "0\n0\n0\n1\n2\n2\n5\n9\n30\n").unwrap();
    let json = dir.path().join("fit.json");
    zicount(&["fit", "--input", path(&data), "--family", "dln", "--out", path(&json)]);
    let csv = dir.path().join("curve.csv");
    let out = zicount(&["curves", "--input", path(&data), "--model-file", path(&json), "--out", path(&csv)]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    let last = text.lines().last().unwrap();
    assert!(last.starts_with("31,1,"), "{last}");

    let mut v = read_json(&json);
    v["results"][0]["shifted"] = Value::Bool(false);
    std::fs::write(&json, v.to_string()).unwrap();
    let out = zicount(&["curves", "--input", path(&data), "--model-file", path(&json)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unshifted"));
}

#[test]
fn filter_command() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("j.csv");
    let mut text = String::from("journal,citations\n");
    for i in 0..117 {
        text.push_str(&format!("Magazine,{}\n", if i < 110 { 0 } else { 2 }));
    }
    for i in 0..47 {
        text.push_str(&format!("Ethno,{}\n", 1 + i % 5));
    }
    std::fs::write(&data, text).unwrap();
    let kept = dir.path().join("kept.csv");
    let report = dir.path().join("report.json");
    let out = zicount(&[
        "filter", "--input", path(&data), "--format", "csv", "--threshold", "90",
        "--out", path(&kept), "--report", path(&report),
    ]);
    assert!(out.status.success());
    let r = read_json(&report);
    assert_eq!(r["removed"][0]["journal"], "Magazine");
    assert_eq!(r["removed"][0]["uncited"], 110);
    assert_eq!(std::fs::read_to_string(&kept).unwrap().lines().count(), 48);

    let plain = dir.path().join("p.txt");
    std::fs::write(&plain, "1\n2\n").unwrap();
    let out = zicount(&["filter", "--input", path(&plain), "--threshold", "90", "--out", path(&kept)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_rejects_out_of_range_params() {
    let dir = tempfile::tempdir().unwrap();
    let out = zicount(&[
        "simulate", "--model", "Hooked", "--alpha", "0.8", "--b", "3", "--n", "10",
        "--out", path(&dir.path().join("x.txt")),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("alpha"));
}
