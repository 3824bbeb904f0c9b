use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn dressage(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dressage"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_report(args: &[&str]) -> (i32, Value) {
    let mut full = args.to_vec();
    full.extend(["--json", "-"]);
    let out = dressage(&full);
    let value = serde_json::from_slice(&out.stdout).expect("json on stdout");
    (out.status.code().unwrap(), value)
}

fn check<'a>(report: &'a Value, name: &str) -> &'a Value {
    report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == name)
        .unwrap_or_else(|| panic!("no check {name} in {report}"))
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn degenerate_extent_is_a_dimension_error() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("k.txt");
    let out = dressage(&["make-kernel", "--dims", "1,4", "--kind", "coulomb", "--out", path_str(&out_path)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("DimensionError"));
    assert!(!out_path.exists());
}

#[test]
fn path_kernel_echoes_sink_offset_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let k = dir.path().join("string.txt");
    let (code, report) = json_report(&[
        "make-kernel", "--dims", "6,6,6", "--kind", "path", "--path", "+x,+x,-y", "--out", path_str(&k),
    ]);
    assert_eq!(code, 0);
    assert_eq!(report["values"]["sink_offset"], serde_json::json!([-2, 1, 0]));
    assert!(k.exists());
    assert!(dir.path().join("string.txt.json").exists());

    let (code, report) = json_report(&["check-kernel", "--kernel", path_str(&k)]);
    assert_eq!(code, 0);
    assert_eq!(report["pass"], true);
}

#[test]
fn gauge_test_needs_a_transform() {
    let out = dressage(&["gauge-test", "--dims", "4,4,4", "--kind", "coulomb", "--transforms", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gauge_test_from_kernel_file() {
    let dir = tempfile::tempdir().unwrap();
    let k = dir.path().join("coulomb.txt");
    let made = dressage(&["make-kernel", "--dims", "6,6,6", "--kind", "coulomb", "--out", path_str(&k)]);
    assert!(made.status.success());
    let (code, report) = json_report(&[
        "gauge-test", "--dims", "6,6,6", "--kernel", path_str(&k), "--transforms", "8", "--charge", "-1", "--offset", "0.9",
    ]);
    assert_eq!(code, 0, "{report}");
    assert!(check(&report, "dressed.max_local_deviation")["measured"].as_f64().unwrap() <= 1e-10);
}

#[test]
fn neutral_string_pair_is_invariant() {
    let (code, report) = json_report(&[
        "gauge-test", "--dims", "6,6,6", "--kind", "path", "--path", "+x,+y,+y", "--neutral-pair", "--transforms", "6", "--offset", "1.1",
    ]);
    assert_eq!(code, 0, "{report}");
    assert_eq!(report["pass"], true);
}

#[test]
fn efield_writes_profile_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("profile.csv");
    let (code, report) = json_report(&["efield", "--dims", "12,12,12", "--kind", "coulomb", "--out", path_str(&csv)]);
    assert_eq!(code, 0, "{report}");
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r,mean_E,count,continuum_E,rel_dev"));
    let first: Vec<f64> = lines
        .next()
        .unwrap()
        .split(',')
        .map(|t| t.parse().unwrap())
        .collect();
    assert_eq!(first.len(), 5);
    assert_eq!(first[0], 1.0);
    // six axis neighbours plus twelve at sqrt(2)
    assert_eq!(first[2], 18.0);
}

#[test]
fn efield_csv_needs_three_dimensions() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("profile.csv");
    let out = dressage(&["efield", "--dims", "8,8", "--kind", "coulomb", "--out", path_str(&csv)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bell_pair_has_one_bit_of_entropy() {
    let (code, report) = json_report(&["entangle-demo", "--dims", "4,4,4", "--bell"]);
    assert_eq!(code, 0);
    let s = report["values"]["entropy"].as_f64().unwrap();
    assert!((s - std::f64::consts::LN_2).abs() <= 1e-10);
}

#[test]
fn product_amplitudes_have_no_entropy() {
    let (code, report) = json_report(&["entangle-demo", "--dims", "4,4,4", "--amplitudes", "0.6,0,0.8,0"]);
    assert_eq!(code, 0);
    assert!(report["values"]["entropy"].as_f64().unwrap().abs() <= 1e-10);
}

#[test]
fn overlap_is_gauge_stable() {
    let (code, report) = json_report(&["overlap", "--dims", "6,6,6", "--transforms", "5"]);
    assert_eq!(code, 0, "{report}");
}

#[test]
fn unknown_kind_is_rejected() {
    let out = dressage(&["make-kernel", "--dims", "4,4", "--kind", "yukawa"]);
    assert_eq!(out.status.code(), Some(2));
}
