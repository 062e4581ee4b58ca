use std::process::{Command, Output};

use psi_core::report;

fn psi_calc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_psi-calc"))
        .args(args)
        .env_remove("PSI_CALC_WORKERS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn fleck_record_json() {
    let out = psi_calc(&[
        "fleck", "--p", "3", "--a", "1", "--n", "5", "--r", "0", "--j", "0", "--format", "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let records = report::from_json(&stdout(&out)).unwrap();
    assert_eq!(records.len(), 1);
    let r = &records[0];
    assert_eq!(r.sum, 9.into());
    assert_eq!(r.valuation.finite(), Some(2));
    assert_eq!(r.bound, 2);
    assert!(r.tight);
}

#[test]
fn psi_text_output() {
    let out = psi_calc(&["psi", "--p", "2", "--expr", "pi^2", "--M", "16", "--N", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("2 + pi + O(pi^"), "{text}");
    assert!(text.lines().nth(1).unwrap().starts_with("profile: 0:8 1:8"));
}

#[test]
fn psi_json_output() {
    let out = psi_calc(&[
        "psi", "--p", "3", "--expr", "(1+pi)^6", "--M", "30", "--N", "6", "--format", "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(value["series"]
        .as_str()
        .unwrap()
        .starts_with("1 + 2*pi + pi^2 + O("));
    assert_eq!(value["coefficients"][1]["coefficient"], "2");
}

#[test]
fn psi_refuses_without_headroom() {
    let out = psi_calc(&["psi", "--p", "5", "--expr", "pi^-3", "--M", "12"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("need at least 13"));
}

#[test]
fn verify_exit_codes() {
    let ok = psi_calc(&[
        "verify", "--kind", "fleck", "--p", "2", "--a", "2", "--n-max", "30",
    ]);
    assert_eq!(ok.status.code(), Some(0));
    // the weak exponent does not hold mod p^2
    let bad = psi_calc(&[
        "verify", "--kind", "fleck", "--p", "2", "--a", "2", "--n-max", "10", "--bounds", "weak",
    ]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stdout(&bad).contains(" FAIL"));
    let config = psi_calc(&["verify", "--p", "6"]);
    assert_eq!(config.status.code(), Some(2));
}

#[test]
fn verify_report_round_trips() {
    let out = psi_calc(&[
        "verify", "--kind", "multi", "--p", "3", "--n-max", "8", "--j-max", "2", "--format", "json",
    ]);
    let text = stdout(&out);
    let records = report::from_json(&text).unwrap();
    assert!(!records.is_empty());
    assert_eq!(report::to_json(&records).unwrap(), text);

    let out = psi_calc(&[
        "verify", "--kind", "multi", "--p", "3", "--n-max", "8", "--j-max", "2", "--format", "csv",
    ]);
    let csv = stdout(&out);
    assert_eq!(report::from_csv(&csv).unwrap(), records);
}

#[test]
fn timing_stays_off_stdout() {
    let a = psi_calc(&["verify", "--p", "3", "--n-max", "12", "--format", "csv"]);
    let b = psi_calc(&["verify", "--p", "3", "--n-max", "12", "--format", "csv"]);
    assert_eq!(a.stdout, b.stdout);
    assert!(!stdout(&a).contains("timing"));
    assert!(String::from_utf8_lossy(&a.stderr).contains("timing sum:fleck"));
}

#[test]
fn env_overrides_workers() {
    let run = |workers: &str| {
        Command::new(env!("CARGO_BIN_EXE_psi-calc"))
            .args([
                "fleck",
                "--p",
                "5",
                "--a",
                "2",
                "--n",
                "0..=30",
                "--r",
                "-3..25",
                "--j",
                "0..=3",
                "--format",
                "csv",
                "--workers",
                "2",
            ])
            .env("PSI_CALC_WORKERS", workers)
            .output()
            .unwrap()
    };
    let one = run("1");
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, run("7").stdout);
    assert_eq!(run("many").status.code(), Some(2));
}

#[test]
fn scan_lists_only_tight() {
    let out = psi_calc(&[
        "scan", "--kind", "fleck", "--p", "2", "--n-max", "10", "--j-max", "1", "--format", "json",
    ]);
    let records = report::from_json(&stdout(&out)).unwrap();
    assert!(records.iter().all(|r| r.tight));
    assert!(records
        .iter()
        .any(|r| r.n == 7 && r.r == 0 && r.j == 1 && r.bound == 4));
}

#[test]
fn fixed_family() {
    let out = psi_calc(&[
        "fixed", "--p", "3", "--units", "1,2,4", "--M", "40", "--N", "10",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "1: fixed\n2: fixed\n4: fixed\n");
    let out = psi_calc(&[
        "fixed", "--p", "3", "--expr", "1 + pi", "--M", "20", "--N", "6",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn writes_report_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.csv");
    let out = psi_calc(&[
        "fleck",
        "--p",
        "2",
        "--n",
        "7",
        "--j",
        "1",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(path).unwrap();
    assert_eq!(text.lines().nth(1), Some("2,1,7,0,1,-112,4,4,fleck,true"));
}
