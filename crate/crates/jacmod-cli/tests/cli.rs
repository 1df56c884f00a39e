//! Contracts of the command-line surface: row counts, exit codes, report
//! round trips, determinism.

use std::path::Path;
use std::process::Command;

fn jacmod() -> Command {
    Command::new(env!("CARGO_BIN_EXE_jacmod"))
}

#[test]
fn modulus_row_count_contract() {
    let out = jacmod()
        .args([
            "modulus", "--func", "catalog:runge", "--k", "2", "--r", "0", "--alpha", "0",
            "--beta", "0", "--p", "2", "--t", "0.01:0.1:log8", "--tol", "1e-4",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.trim().lines().collect();
    assert_eq!(lines.len(), 9, "header + 8 rows: {text}");
    assert!(lines[0].starts_with("t,omega,omega_star,err"));
}

#[test]
fn modulus_of_linear_function_is_zero() {
    let out = jacmod()
        .args([
            "modulus", "--func", "catalog:x_pow_r", "--k", "1", "--r", "1", "--p", "inf",
            "--alpha", "0", "--beta", "0", "--t", "0.5",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let row = text.trim().lines().nth(1).unwrap();
    let omega: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
    assert_eq!(omega, 0.0, "{row}");
}

#[test]
fn divergence_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "modulus", "--func", "catalog:ce_unbounded", "--k", "2", "--r", "0", "--alpha", "0",
        "--beta", "-0.25", "--p", "1", "--t", "0.5",
    ];
    let out = jacmod().args(args).current_dir(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(3), "divergence without opt-in");
    let out = jacmod()
        .args(args)
        .arg("--allow-divergent")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().nth(1).unwrap().ends_with("true"), "{text}");
    assert!(
        dir.path().join("modulus_trace.csv").exists(),
        "growth trace file"
    );
}

#[test]
fn usage_errors_exit_2() {
    let out = jacmod()
        .args(["modulus", "--func", "catalog:nope", "--t", "0.1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = jacmod()
        .args(["modulus", "--func", "catalog:exp", "--t", "0.5:0.1:log4"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = jacmod().args(["report", "--report", "/nonexistent.json"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn functionals_columns_and_k_below_r() {
    let out = jacmod()
        .args([
            "functionals", "--func", "catalog:exp", "--k", "2", "--r", "0", "--alpha",
            "0.25", "--beta", "0", "--p", "2", "--n", "8,16,32", "--tol", "1e-4",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rows = text.trim().lines();
    assert_eq!(rows.next().unwrap(), "n,t,kfunctional,realization,e_n");
    for row in rows {
        let cols: Vec<f64> = row.split(',').map(|v| v.parse().unwrap()).collect();
        let (k, r) = (cols[2], cols[3]);
        assert!(k <= r * (1.0 + 1e-9), "K ≤ R violated: {row}");
    }
}

#[test]
fn functionals_zero_for_low_degree_polynomial() {
    // Degree ≤ k+r-1 polynomial: the K column vanishes.
    let out = jacmod()
        .args([
            "functionals", "--func", "catalog:x_pow_r", "--k", "2", "--r", "1", "--alpha",
            "0", "--beta", "0", "--p", "2", "--n", "8,16", "--tol", "1e-4",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for row in text.trim().lines().skip(1) {
        let k: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
        assert!(k < 1e-10, "{row}");
    }
}

#[test]
fn bestapprox_json_output() {
    let out = jacmod()
        .args([
            "bestapprox", "--func", "catalog:runge", "--n", "6", "--alpha", "0", "--beta",
            "0", "--p", "inf",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["error"].as_f64().unwrap() > 0.0);
    assert_eq!(v["status"], "optimal");
    assert!(v["minimizer"]["coefficients"].as_array().unwrap().len() == 6);
}

#[test]
fn verify_report_and_csv_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let report_path = dir.path().join("report.json");
    let out = jacmod()
        .args([
            "verify", "--suite", "weights,minimax", "--out",
            report_path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{:?}", out);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("PASS weight-comparisons"));
    // JSON → CSV conversion preserves the records.
    let csv_dir = dir.path().join("csv");
    let out = jacmod()
        .args([
            "report", "--report", report_path.to_str().unwrap(), "--format", "csv", "--out",
            csv_dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    for file in ["predicates.csv", "cells.csv", "series_summary.csv"] {
        assert!(csv_dir.join(file).exists(), "{file}");
    }
    let preds = std::fs::read_to_string(csv_dir.join("predicates.csv")).unwrap();
    assert!(preds.contains("weight-comparisons"));
    assert!(preds.contains("minimax-oracle"));
}

#[test]
fn verify_reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |path: &Path| {
        let out = jacmod()
            .args([
                "verify", "--suite", "weights,counterexamples", "--out",
                path.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "{:?}", out);
        std::fs::read(path).unwrap()
    };
    let a = run(&dir.path().join("a.json"));
    let b = run(&dir.path().join("b.json"));
    assert_eq!(a, b, "byte-identical reports for identical config + seed");
}

#[test]
fn spec_json_files_load() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.json");
    std::fs::write(
        &path,
        r#"{"kind":"abs_power","params":{"gamma":2.5,"shift":0.1},"max_deriv":8}"#,
    )
    .unwrap();
    let out = jacmod()
        .args([
            "modulus", "--func", path.to_str().unwrap(), "--k", "1", "--r", "0", "--p", "2",
            "--t", "0.1", "--tol", "1e-4",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{out:?}");
}
