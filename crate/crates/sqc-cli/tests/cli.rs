//! End-to-end checks of the command-line interface: exit codes, report
//! files, and run-to-run determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sqc-lab"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn tmp(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("sqc-cli-test-{}-{name}", std::process::id()));
    p
}

#[test]
fn list_text_and_json() {
    let out = run(&["list"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("radial_jump"));
    assert!(text.contains("modulus: 2"));
    assert!(text.contains("lsc-not-usc"));

    let out = run(&["list", "--format", "json"]);
    let parsed: serde_json::Value =
        serde_json::from_slice(&out.stdout).expect("list --format json emits valid JSON");
    assert!(parsed.as_array().unwrap().len() >= 10);

    let out = run(&["list", "--filter", "discontinuous"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(!text.contains("quadratic_norm"));
    assert!(text.contains("countable_jumps"));
}

#[test]
fn verify_exit_codes() {
    let report = tmp("verify-quadratic.json");
    let out = run(&[
        "verify",
        "--fn",
        "quadratic_norm",
        "--n",
        "2",
        "--gamma",
        "2",
        "--count",
        "5000",
        "--seed",
        "7",
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let summary = String::from_utf8(out.stdout).unwrap();
    assert!(summary.contains("violations=0"));
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(doc["schema"], 1);
    assert_eq!(doc["run"]["seed"], 7);
    assert_eq!(doc["report"]["violation_count"], 0);
    std::fs::remove_file(&report).ok();

    for fixture in ["constant5", "neg_quadratic"] {
        let report = tmp(&format!("verify-{fixture}.json"));
        let out = run(&[
            "verify",
            "--fn",
            fixture,
            "--gamma",
            "2",
            "--count",
            "1000",
            "--out",
            report.to_str().unwrap(),
        ]);
        assert_eq!(
            out.status.code(),
            Some(1),
            "{fixture} must report violations"
        );
        std::fs::remove_file(&report).ok();
    }

    let report = tmp("verify-split3.json");
    let out = run(&[
        "verify",
        "--fn",
        "radial_split",
        "--n",
        "3",
        "--rho",
        "1",
        "--beta",
        "0.5",
        "--gamma",
        "2",
        "--count",
        "2000",
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    std::fs::remove_file(&report).ok();

    // bad inputs exit 2
    let out = run(&["verify", "--fn", "no_such_function", "--count", "1000"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["verify", "--fn", "quadratic_norm", "--count", "10"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["verify", "--fn", "max_root_quadratic", "--count", "1000"]);
    assert_eq!(out.status.code(), Some(2), "missing gamma must be rejected");

    // unwritable output path exits 3
    let out = run(&[
        "verify",
        "--fn",
        "quadratic_norm",
        "--count",
        "1000",
        "--out",
        "/nonexistent-dir/report.json",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn verify_csv_lists_one_row_per_violation() {
    let csv = tmp("verify.csv");
    let out = run(&[
        "verify",
        "--fn",
        "constant5",
        "--gamma",
        "2",
        "--count",
        "500",
        "--format",
        "csv",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let body = std::fs::read_to_string(&csv).unwrap();
    assert!(body.starts_with("index,t,x,y,lhs,rhs,margin\n"));
    assert_eq!(body.lines().count(), 1 + 500);
    assert!(!body.contains('\r'), "CSV must use LF line endings");
    std::fs::remove_file(&csv).ok();
}

#[test]
fn export_of_the_quadratic_is_a_parabola() {
    let out = run(&[
        "export",
        "--fn",
        "quadratic_norm",
        "--n",
        "1",
        "--grid",
        "100",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let values: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(values.len(), 101);
    // strictly decreasing to the vertex, then strictly increasing
    let vertex = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .unwrap()
        .0;
    assert!(values[..vertex].windows(2).all(|w| w[0] > w[1]));
    assert!(values[vertex..].windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn verify_reports_are_reproducible() {
    let strip_wall_time = |path: &PathBuf| -> serde_json::Value {
        let mut doc: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
        doc["report"]["wall_time_ms"] = serde_json::Value::from(0.0);
        doc
    };
    let args = |out: &str| {
        vec![
            "verify".to_string(),
            "--fn".into(),
            "radial_split".into(),
            "--rho".into(),
            "1".into(),
            "--beta".into(),
            "0.5".into(),
            "--count".into(),
            "5000".into(),
            "--seed".into(),
            "7".into(),
            "--out".into(),
            out.into(),
        ]
    };
    let a = tmp("repro-a.json");
    let b = tmp("repro-b.json");
    assert!(bin()
        .args(args(a.to_str().unwrap()))
        .output()
        .unwrap()
        .status
        .success());
    assert!(bin()
        .args(args(b.to_str().unwrap()))
        .output()
        .unwrap()
        .status
        .success());
    let da = strip_wall_time(&a);
    let db = strip_wall_time(&b);
    assert_eq!(
        serde_json::to_string(&da).unwrap(),
        serde_json::to_string(&db).unwrap()
    );
    std::fs::remove_file(&a).ok();
    std::fs::remove_file(&b).ok();
}

#[test]
fn seed_falls_back_to_environment() {
    let report_a = tmp("env-seed-a.json");
    let report_b = tmp("env-seed-b.json");
    for (path, seed) in [(&report_a, "11"), (&report_b, "11")] {
        let out = bin()
            .env("SQC_LAB_SEED", seed)
            .args([
                "verify",
                "--fn",
                "quadratic_norm",
                "--count",
                "1000",
                "--out",
                path.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert!(out.status.success());
    }
    let read = |p: &PathBuf| -> serde_json::Value {
        let mut d: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap();
        d["report"]["wall_time_ms"] = serde_json::Value::from(0.0);
        d
    };
    let da = read(&report_a);
    assert_eq!(da["run"]["seed"], 11);
    assert_eq!(
        serde_json::to_string(&da).unwrap(),
        serde_json::to_string(&read(&report_b)).unwrap()
    );
    std::fs::remove_file(&report_a).ok();
    std::fs::remove_file(&report_b).ok();
}

#[test]
fn probe_matches_declared_metadata() {
    let out = run(&[
        "probe",
        "--fn",
        "radial_jump",
        "--variant",
        "lower",
        "--rho",
        "1",
        "--beta",
        "1",
        "--at",
        "sphere:8",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        text.matches("lsc-not-usc (declared lsc-not-usc)").count(),
        8
    );

    let out = run(&["probe", "--fn", "point_drop", "--alpha", "1", "--at", "0,0"]);
    assert_eq!(out.status.code(), Some(0));

    let out = run(&["probe", "--fn", "quadratic_norm", "--at", "0.3,0.4"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("continuous (declared continuous)"));

    // a probe point outside the domain is bad input
    let out = run(&["probe", "--fn", "endpoint_jump", "--at", "7"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn probe_csv_has_one_row_per_point() {
    let csv = tmp("probe.csv");
    let out = run(&[
        "probe",
        "--fn",
        "radial_split",
        "--at",
        "sphere:4",
        "--format",
        "csv",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let body = std::fs::read_to_string(&csv).unwrap();
    // header + 4 points per declared record (two records for the split)
    assert_eq!(body.lines().count(), 1 + 8);
    assert!(body.starts_with("point,f_value,liminf_est,limsup_est,classification"));
    std::fs::remove_file(&csv).ok();
}

#[test]
fn modulus_reports_estimates() {
    let out = run(&[
        "modulus",
        "--fn",
        "quadratic_norm",
        "--n",
        "2",
        "--count",
        "50000",
        "--seed",
        "7",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let line = text.lines().next().unwrap();
    let value: f64 = line
        .split("gamma_hat=")
        .nth(1)
        .unwrap()
        .split_whitespace()
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!((2.0 - 1e-6..2.5).contains(&value), "gamma_hat {value}");

    let out = run(&[
        "modulus",
        "--fn",
        "affine_pullback",
        "--inner",
        "quadratic_norm",
        "--A",
        "2 0;0 2",
        "--count",
        "50000",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("gamma_hat=0.5000"), "{text}");

    let out = run(&[
        "modulus",
        "--fn",
        "max_root_quadratic",
        "--k",
        "1",
        "--count",
        "20000",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("empirical estimate only"));
}

#[test]
fn export_grids() {
    let csv = tmp("export-1d.csv");
    let out = run(&[
        "export",
        "--fn",
        "countable_jumps",
        "--grid",
        "1000",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let body = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(body.lines().count(), 1 + 1001);
    assert!(body.starts_with("x,value,branch,region\n"));
    // the staircase jumps at 1/2 show up as distinct branch values
    assert!(body.contains("stair"));
    std::fs::remove_file(&csv).ok();

    let csv = tmp("export-2d.csv");
    let out = run(&[
        "export",
        "--fn",
        "radial_jump",
        "--variant",
        "lower",
        "--grid",
        "50x50",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let body = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(body.lines().count(), 1 + 51 * 51);
    assert!(body.contains(",core,") && body.contains(",outer,"));
    std::fs::remove_file(&csv).ok();

    // dimension 3 is bad input
    let out = run(&[
        "export",
        "--fn",
        "quadratic_norm",
        "--n",
        "3",
        "--grid",
        "10x10",
    ]);
    assert_eq!(out.status.code(), Some(2));
    // oversized grids are bad input
    let out = run(&["export", "--fn", "quadratic_norm", "--grid", "2000x2000"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn restricted_functions_export_infinite_values() {
    let out = run(&[
        "export",
        "--fn",
        "restricted_radial_jump",
        "--half-width",
        "1.5",
        "--grid",
        "20x20",
        "--range",
        "-2,2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("inf"));
    assert!(text.contains("outside"));
}
