//! End-to-end command-line tests: exit-code contract, report determinism
//! under different worker counts (acceptance criterion 12), and the frozen
//! CSV schema.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_xiscope")
}

fn tmp(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("xiscope-cli-{}-{name}", std::process::id()))
}

fn run(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(bin());
    cmd.args(args);
    match threads {
        Some(n) => {
            cmd.env("XISCOPE_THREADS", n);
        }
        None => {
            cmd.env_remove("XISCOPE_THREADS");
        }
    }
    cmd.output().expect("spawn xiscope")
}

#[test]
fn exit_zero_on_clean_fixture_scan() {
    let out_path = tmp("clean.json");
    let out = run(
        &[
            "scan",
            "--fixture-epsilon",
            "0.01",
            "--beta",
            "0.2",
            "--t-min",
            "5.5",
            "--t-max",
            "7.5",
            "--digits",
            "30",
            "--grid-factor",
            "40",
            "--checks",
            "all",
            "--lagarias-step",
            "0.05",
            "--lemma1-samples",
            "10",
            "--out",
            out_path.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(&out_path).unwrap()).unwrap();
    assert_eq!(report["intervals"].as_array().unwrap().len(), 1);
    assert_eq!(report["intervals"][0]["verdict"], "single_peak_ok");
    // mu = eps + (cosh 0.2 - 1) = 0.0300668 to closed form
    let mu: f64 = report["intervals"][0]["mu"].as_str().unwrap().parse().unwrap();
    assert!((mu - 0.030066755619075846).abs() < 1e-6, "mu = {mu}");
    std::fs::remove_file(&out_path).ok();
}

#[test]
fn exit_one_on_reversed_range() {
    let out = run(&["scan", "--t-min", "60", "--t-max", "5"], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("t_min"));
}

#[test]
fn exit_one_on_unknown_check_name() {
    let out = run(&["verify", "--checks", "r1,frobnicate"], None);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("frobnicate") && err.contains("jacobi") && err.contains("zero-count"));
}

#[test]
fn exit_one_on_strip_violation() {
    let out = run(&["oracle", "--beta", "0.6", "--t", "10"], None);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn exit_two_on_corrupted_fixture() {
    let out_path = tmp("corrupt.json");
    let out = run(
        &[
            "scan",
            "--fixture-epsilon",
            "0.01",
            "--fixture-corrupt",
            "--beta",
            "0.2",
            "--t-min",
            "5.5",
            "--t-max",
            "7.5",
            "--digits",
            "30",
            "--grid-factor",
            "40",
            "--checks",
            "lagarias",
            "--lagarias-step",
            "0.05",
            "--out",
            out_path.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(out.status.code(), Some(2), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(&out_path).unwrap()).unwrap();
    let kinds: Vec<&str> = report["failures"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| f["kind"].as_str().unwrap())
        .collect();
    assert!(kinds.contains(&"sign_anomaly"), "kinds: {kinds:?}");
    assert!(kinds.contains(&"lagarias_nonpositive"), "kinds: {kinds:?}");
    std::fs::remove_file(&out_path).ok();
}

/// Acceptance criterion 12: identical configuration but different
/// XISCOPE_THREADS values produce byte-identical JSON, on both routes.
#[test]
fn acceptance_12_report_determinism() {
    // fixture route
    let a = tmp("det-a.json");
    let b = tmp("det-b.json");
    let fixture_args = |out: &PathBuf| {
        vec![
            "scan".to_string(),
            "--fixture-epsilon".into(),
            "0.01".into(),
            "--beta".into(),
            "0.2,0.35".into(),
            "--t-min".into(),
            "5.5".into(),
            "--t-max".into(),
            "7.5".into(),
            "--digits".into(),
            "30".into(),
            "--grid-factor".into(),
            "40".into(),
            "--checks".into(),
            "all".into(),
            "--lagarias-step".into(),
            "0.05".into(),
            "--lemma1-samples".into(),
            "10".into(),
            "--out".into(),
            out.to_str().unwrap().to_string(),
        ]
    };
    let run_owned = |args: Vec<String>, threads: &str| {
        let out = Command::new(bin())
            .args(&args)
            .env("XISCOPE_THREADS", threads)
            .output()
            .expect("spawn");
        assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    };
    run_owned(fixture_args(&a), "1");
    run_owned(fixture_args(&b), "4");
    let bytes_a = std::fs::read(&a).unwrap();
    let bytes_b = std::fs::read(&b).unwrap();
    assert!(!bytes_a.is_empty() && bytes_a == bytes_b, "fixture reports differ across thread counts");

    // kernel route on a small window covering one interval
    let ka = tmp("det-ka.json");
    let kb = tmp("det-kb.json");
    let kernel_args = |out: &PathBuf| {
        vec![
            "scan".to_string(),
            "--beta".into(),
            "0.3".into(),
            "--t-min".into(),
            "12".into(),
            "--t-max".into(),
            "23".into(),
            "--digits".into(),
            "auto".into(),
            "--out".into(),
            out.to_str().unwrap().to_string(),
        ]
    };
    run_owned(kernel_args(&ka), "1");
    run_owned(kernel_args(&kb), "2");
    let bytes_ka = std::fs::read(&ka).unwrap();
    let bytes_kb = std::fs::read(&kb).unwrap();
    println!(
        "acceptance 12 (determinism): {} -- fixture {} bytes, kernel {} bytes",
        if bytes_ka == bytes_kb { "PASS" } else { "FAIL" },
        bytes_a.len(),
        bytes_ka.len()
    );
    assert!(!bytes_ka.is_empty() && bytes_ka == bytes_kb, "kernel reports differ across thread counts");
    for p in [a, b, ka, kb] {
        std::fs::remove_file(&p).ok();
    }
}

#[test]
fn curves_schema_and_critical_line() {
    let out_path = tmp("curves.csv");
    let out = run(
        &[
            "curves",
            "--beta",
            "0,0.2",
            "--t-min",
            "5.5",
            "--t-max",
            "7.5",
            "--samples",
            "9",
            "--fixture-epsilon",
            "0.01",
            "--out",
            out_path.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&out_path).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,beta,u_scaled,v_scaled,abs_u_scaled,abs_v_over_beta_scaled,norm_scaled"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 18); // 9 samples x 2 betas
    for row in &rows {
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols.len(), 7);
        let beta: f64 = cols[1].parse().unwrap();
        let v: f64 = cols[3].parse().unwrap();
        if beta == 0.0 {
            assert_eq!(v, 0.0, "v must vanish on the critical line: {row}");
        }
    }
    std::fs::remove_file(&out_path).ok();
}

#[test]
fn curves_fixture_parallel_shift_at_peak() {
    // u(2 pi, beta) - u(2 pi, 0) = cosh(beta) - 1 exactly at the extremum
    let out_path = tmp("shift.csv");
    let two_pi = 2.0 * std::f64::consts::PI;
    let lo = format!("{}", two_pi - 0.5);
    let hi = format!("{}", two_pi + 0.5);
    let out = run(
        &[
            "curves",
            "--beta",
            "0,0.2",
            "--t-min",
            &lo,
            "--t-max",
            &hi,
            "--samples",
            "5",
            "--fixture-epsilon",
            "0.01",
            "--out",
            out_path.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&out_path).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    // row 2 of each beta block is t = 2 pi (the middle sample)
    let u0 = rows[2][2];
    let u2 = rows[5 + 2][2];
    let d = 0.2f64.cosh() - 1.0;
    assert!(((u2 - u0) - d).abs() < 1e-12, "shift {} vs {}", u2 - u0, d);
    std::fs::remove_file(&out_path).ok();
}

#[test]
fn invalid_thread_env_is_usage_error() {
    let out = run(&["fixture"], Some("zero"));
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("XISCOPE_THREADS"));
}
