use std::path::Path;
use std::process::{Command, Output};

fn mpsrg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mpsrg")).args(args).output().expect("binary runs")
}

fn sweep_to(path: &Path, jobs: &str) -> Output {
    mpsrg(&[
        "--jobs", jobs, "sweep", "--model", "model1", "--g-min", "-2", "--g-max", "2", "--steps", "21", "--L", "2,4,inf", "--seed", "7",
        "--out", path.to_str().unwrap(),
    ])
}

#[test]
fn sweep_is_deterministic_across_pool_widths() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    assert!(sweep_to(&a, "1").status.success());
    assert!(sweep_to(&b, "4").status.success());
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let text = String::from_utf8(ta).unwrap();
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("g,L,per_block,closed_form,abs_diff"));
    assert_eq!(lines.count(), 21 * 3);
    for line in text.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        if cols[0] == "0" || cols[0] == "1" {
            assert!(cols[2].parse::<f64>().unwrap().abs() < 1e-9, "{line}");
        }
    }
}

#[test]
fn fidelity_table() {
    let out = mpsrg(&["fidelity", "--model", "model2", "--g-min", "-2", "--g-max", "2", "--steps", "5"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(text.lines().next(), Some("g1,g2,f_numeric,f_closed_form,abs_diff"));
    assert_eq!(rows.len(), 25);
    for r in &rows {
        assert!(r[4] < 1e-8, "{r:?}");
        if r[0] == r[1] {
            assert_eq!(r[2], 0.0);
        }
    }
}

#[test]
fn log_base_two_converts_display() {
    let out = mpsrg(&["sweep", "--model", "cluster", "--steps", "2", "--L", "2", "--log-base", "2"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().skip(1).all(|l| l.split(',').nth(2) == Some("1")), "{text}");
}

#[test]
fn ansatz_table_header() {
    let out = mpsrg(&["ansatz-compare", "--model", "model2", "--n-sites", "4", "--g-min", "-1", "--g-max", "1", "--steps", "3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("g,E_identical,E_alternating,E_arbitrary"));
    for line in text.lines().skip(1) {
        let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert!((v[2] - v[3]).abs() < 1e-6, "{line}");
    }
}

#[test]
fn verify_reports_result_line() {
    let out = mpsrg(&["verify", "--model", "model1", "--g", "0.5", "--n-sites", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.trim_end().lines().last().unwrap().starts_with("RESULT: PASS gap="));
    let out = mpsrg(&["verify", "--model", "model2", "--g", "1.0", "--n-sites", "6"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(mpsrg(&["sweep", "--model", "model1", "--steps", "1"]).status.code(), Some(2));
    assert_eq!(mpsrg(&["sweep", "--model", "nope"]).status.code(), Some(2));
    assert_eq!(mpsrg(&["sweep", "--model", "model1", "--g-min", "1", "--g-max", "0"]).status.code(), Some(2));
    assert_eq!(mpsrg(&["sweep", "--model", "model1", "--L", "2,x"]).status.code(), Some(2));
    assert_eq!(mpsrg(&["fidelity", "--model", "aklt"]).status.code(), Some(2));
    assert_eq!(mpsrg(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn numeric_failure_exits_1_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("big.csv");
    // 2^30 amplitudes exceed the state budget
    let out = mpsrg(&[
        "ansatz-compare", "--model", "model1", "--n-sites", "30", "--steps", "2", "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!path.exists());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}
