use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bspir(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bspir"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn simulate_is_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let one = dir.path().join("one.json");
    let four = dir.path().join("four.json");
    for (threads, path) in [("1", &one), ("4", &four)] {
        let out = bspir(&[
            "simulate",
            "--seed",
            "42",
            "--trials",
            "1000",
            "--threads",
            threads,
            "--output",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let a = fs::read(&one).unwrap();
    assert_eq!(a, fs::read(&four).unwrap());

    let report: Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(report["trials"], 7000);
    assert_eq!(report["successes"], 7000);
    assert_eq!(report["rate"], serde_json::json!({"den": 9, "num": 1}));
    assert_eq!(report["per_strategy"].as_array().unwrap().len(), 7);
}

#[test]
fn golden_passes_and_reports_mismatches() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("golden.json");
    let out = bspir(&["golden", "--output", path.to_str().unwrap()]);
    assert!(out.status.success());
    let record = read_json(&path);
    assert_eq!(record["passed"], true);
    assert_eq!(record["ambiguity_errors"], 0);
    assert_eq!(record["coincidences"].as_array().unwrap().len(), 11);

    let out = bspir(&["golden", "--alphas", "2,1,3,4,5,6,7,8,9"]);
    assert_eq!(out.status.code(), Some(1));
    let record: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(record["checks"][0]["passed"], false);
    assert!(record["checks"][0]["mismatches"][0].as_str().unwrap().starts_with("entry ("));
}

#[test]
fn golden_rejects_colliding_points() {
    let out = bspir(&["golden", "--fs", "9"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("evaluation point 9"));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    fs::write(
        &config,
        r#"{"n": 13, "b": 3, "k": 1, "seed": 7, "trials": 5, "strategy": "leak_mask", "byz_set": [1, 5, 9]}"#,
    )
    .unwrap();
    let out = bspir(&["simulate", "--config", config.to_str().unwrap(), "--trials", "12", "--fast"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["params"]["n"], 13);
    assert_eq!(report["seed"], 7);
    assert_eq!(report["trials"], 12);
    assert_eq!(report["fast"], true);
    assert_eq!(report["rate"], serde_json::json!({"den": 13, "num": 1}));
    assert_eq!(report["per_strategy"][0]["strategy"], "leak_mask");
    assert_eq!(report["per_strategy"][0]["byz_located"], 12);
}

#[test]
fn invalid_inputs_exit_with_error() {
    for args in [
        &["simulate", "--byz-set", "1,2,3"][..],
        &["simulate", "--byz-set", "0"],
        &["simulate", "--n", "8", "--b", "2"],
        &["simulate", "--q", "12"],
    ] {
        let out = bspir(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
    let out = bspir(&["simulate", "--strategy", "teleport"]);
    assert!(!out.status.success());
}

#[test]
fn verify_privacy_detects_removed_query_noise() {
    let out = bspir(&["verify-privacy", "--k", "1", "--strategy", "echo_query"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    // Needs K = 2: with one message there is no index to leak.
    let out = bspir(&["verify-privacy", "--strategy", "echo_query", "--mutation", "no-query-noise"]);
    assert_eq!(out.status.code(), Some(1));
    let record: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(record["passed"], false);
    let query = &record["reports"][0];
    assert_eq!(query["check"], "query_privacy");
    assert_eq!(query["status"], "failed");
}
