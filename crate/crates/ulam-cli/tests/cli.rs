//! Exit-code contract and output determinism of the binary.

use std::process::Command;

fn run(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_ulam"))
        .args(args)
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

#[test]
fn identical_config_gives_byte_identical_json() {
    for args in [
        vec!["count", "--n", "4", "--seed", "7"],
        vec!["enumerate", "--n", "3", "--seed", "9"],
        vec!["eigencheck", "--seed", "3"],
        vec!["report", "--seed", "2", "--tilde", "--intersections"],
    ] {
        let (c1, out1) = run(&args);
        let (c2, out2) = run(&args);
        assert_eq!(c1, 0, "{args:?}");
        assert_eq!(c1, c2);
        assert!(!out1.is_empty());
        assert_eq!(out1, out2, "{args:?} output must be byte-identical");
    }
}

#[test]
fn enumerate_degree_one_has_single_trivial_record() {
    let (code, out) = run(&["enumerate", "--n", "1"]);
    assert_eq!(code, 0);
    let doc: serde_json::Value = serde_json::from_slice(&out).unwrap();
    let records = doc["solution_set"]["records"].as_array().unwrap();
    assert_eq!(records.len(), 1);
    let entry = &records[0]["point"][0];
    assert!(entry[0].as_f64().unwrap().abs() < 1e-10);
    assert!(entry[1].as_f64().unwrap().abs() < 1e-10);
}

#[test]
fn enumerate_degree_four_reports_the_double_cluster() {
    let (code, out) = run(&["enumerate", "--n", "4", "--seed", "3"]);
    assert_eq!(code, 0);
    let doc: serde_json::Value = serde_json::from_slice(&out).unwrap();
    let records = doc["solution_set"]["records"].as_array().unwrap();
    assert_eq!(records.len(), 23);
    let doubles = records
        .iter()
        .filter(|r| r["cluster_size"].as_u64() == Some(2))
        .count();
    assert_eq!(doubles, 1);
}

#[test]
fn enumerate_csv_has_one_row_per_record() {
    let (code, out) = run(&["enumerate", "--n", "3", "--format", "csv"]);
    assert_eq!(code, 0);
    let text = String::from_utf8(out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1 + 6);
    assert!(lines[0].starts_with("index,re_1,im_1"));
}

#[test]
fn verify_passes_for_small_degrees() {
    for n in ["2", "3", "4"] {
        let (code, out) = run(&["verify", "--n", n]);
        assert_eq!(code, 0, "verify --n {n}");
        let doc: serde_json::Value = serde_json::from_slice(&out).unwrap();
        assert_eq!(doc["pass"].as_bool(), Some(true));
    }
}

#[test]
fn flow_rejects_inadmissible_points() {
    // index 2 of the sorted degree-3 set is the repeated-component point
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().to_str().unwrap();
    let (code, _) = run(&["flow", "--n", "3", "--point-index", "2", "--out", out_dir]);
    assert_eq!(code, 3);
    let (code, _) = run(&["flow", "--n", "3", "--point-index", "64", "--out", out_dir]);
    assert_eq!(code, 3);
}

#[test]
fn flow_writes_trajectory_and_stability_files() {
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().to_str().unwrap();
    let (code, out) = run(&[
        "flow", "--n", "2", "--point-index", "1", "--radius", "0.02", "--trials", "3", "--t-end",
        "10", "--out", out_dir,
    ]);
    assert_eq!(code, 0);
    let doc: serde_json::Value = serde_json::from_slice(&out).unwrap();
    assert_eq!(doc["stability"]["converged"], doc["stability"]["trials"]);
    let csv = tmp.path().join("flow_n2_p1_trajectory.csv");
    let stability = tmp.path().join("flow_n2_p1_stability.json");
    assert!(csv.is_file());
    assert!(stability.is_file());
    let header = std::fs::read_to_string(csv).unwrap();
    assert!(header.starts_with("t,re_1,im_1,re_2,im_2"));
}

#[test]
fn report_markdown_contains_the_count_table() {
    let (code, out) = run(&["report", "--tilde", "--intersections", "--format", "markdown"]);
    assert_eq!(code, 0);
    let text = String::from_utf8(out).unwrap();
    assert!(text.contains("| 4 | 23 | 18 | 1 | ok |"));
    assert!(text.contains("| 5 | 119 | 96 | 0 | ok |"));
}

#[test]
fn eigencheck_presets_all_pass() {
    for preset in ["wide", "fine"] {
        let (code, out) = run(&["eigencheck", "--grid", preset]);
        assert_eq!(code, 0, "preset {preset}");
        let doc: serde_json::Value = serde_json::from_slice(&out).unwrap();
        assert_eq!(doc["report"]["pass"].as_bool(), Some(true));
        assert_eq!(doc["report"]["spot_check_failures"].as_u64(), Some(0));
    }
}
