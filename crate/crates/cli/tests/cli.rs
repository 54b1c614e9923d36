use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn spinv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinv")).args(args).output().expect("spawn spinv")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json output")
}

fn state_file(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "core", "data", "states", name].iter().collect();
    p.to_string_lossy().into_owned()
}

#[test]
fn enumerate_counts() {
    for (n, patterns, total) in [("3", 4, 144), ("4", 13, 1768), ("5", 40, 21120)] {
        let v = json(&spinv(&["enumerate", "--parties", n, "--degree", "4", "--counts-only"]));
        assert_eq!(v["patterns"], patterns);
        assert_eq!(v["total"], total);
    }
    let v = json(&spinv(&["enumerate", "--parties", "3", "--degree", "4", "--counts-only", "--equivalence", "automorphism"]));
    assert_eq!(v["total"], 118);
}

#[test]
fn odd_degree_two_descriptors_are_flagged_zero() {
    let v = json(&spinv(&["enumerate", "--parties", "3", "--degree", "2"]));
    let descs = v["descriptors"].as_array().unwrap();
    assert!(!descs.is_empty());
    assert!(descs.iter().all(|d| d["identically_zero"] == true));
}

#[test]
fn evaluate_on_state_file() {
    let v = json(&spinv(&["evaluate", "I_3a", "I_2a", "--state", &state_file("ghz3_01.json")]));
    let vals = v["values"].as_array().unwrap();
    assert!((vals[0]["magnitude"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!(vals[1]["magnitude"].as_f64().unwrap() < 1e-12);
}

#[test]
fn product_state_gives_zero() {
    let v = json(&spinv(&["evaluate", "I_3a", "I_3b", "I_3c", "--state", &state_file("product3.json")]));
    for val in v["values"].as_array().unwrap() {
        assert!(val["magnitude"].as_f64().unwrap() < 1e-14);
    }
}

#[test]
fn evaluate_example_as_csv() {
    let out = spinv(&["--format", "csv", "evaluate", "H_a", "--example", "ghz4_01"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let row = rdr.records().next().unwrap().unwrap();
    assert_eq!(&row[0], "H_a");
    assert!((row[3].parse::<f64>().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn bad_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{").unwrap();
    assert_eq!(spinv(&["evaluate", "I_3a", "--state", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(spinv(&["evaluate", "I_3a", "--state", &state_file("ghz4_01.json")]).status.code(), Some(2));
    assert_eq!(spinv(&["evaluate", "Q_1", "--example", "ghz3_01"]).status.code(), Some(2));
    assert_eq!(spinv(&["reproduce", "nonsense"]).status.code(), Some(2));
    assert_eq!(spinv(&["enumerate", "--parties", "3", "--degree", "3"]).status.code(), Some(2));
}

#[test]
fn reproduce_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for p in [&a, &b] {
        let out = spinv(&["--seed", "3", "--out", p.to_str().unwrap(), "reproduce", "evolution"]);
        assert_eq!(out.status.code(), Some(0));
    }
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let v: Value = serde_json::from_slice(&ta).unwrap();
    assert_eq!(v["config"]["seed"], 3);
    assert!(v["rng_algorithm"].as_str().unwrap().contains("ChaCha20"));
}

#[test]
fn failing_suite_exits_one() {
    let out = spinv(&["--format", "text", "reproduce", "examples"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("ghz3_four_terms"));
}
