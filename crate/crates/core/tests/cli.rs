//! The `pllid` binary end to end: outputs, determinism, report structure,
//! cross-command consistency, and the exit-code contract.

mod common;

use std::fmt::Write as _;
use std::path::Path;
use std::process::{Command, Output};

use common::settled_y;
use pll_ident::series::TimeSeries;

fn pllid(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pllid"))
        .args(args)
        .output()
        .expect("binary must launch")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("process must exit normally")
}

/// Writes a `t,value` record CSV at full precision.
fn write_record(path: &Path, series: &TimeSeries) {
    let mut text = String::from("t,value\n");
    for (i, v) in series.values.iter().enumerate() {
        let _ = writeln!(text, "{:.16e},{:.16e}", series.time_at(i), v);
    }
    std::fs::write(path, text).unwrap();
}

/// A settled 1b record with a known offset removed (y = η + b).
fn offset_record(n_bursts: f64, b: f64) -> TimeSeries {
    let y = settled_y("1b", n_bursts);
    TimeSeries::new(y.t0, y.dt, y.values.iter().map(|v| v - b).collect())
}

// ── simulate ────────────────────────────────────────────────────────────────

#[test]
fn simulate_writes_the_kept_samples_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let args = |out: &Path| {
        vec![
            "simulate".to_string(),
            "--config".into(),
            "1b".into(),
            "--steps".into(),
            "30000".into(),
            "--transient".into(),
            "10000".into(),
            "--out".into(),
            out.display().to_string(),
        ]
    };
    let run_a = pllid(&args(&a).iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(code(&run_a), 0, "stderr: {}", stderr(&run_a));
    let text = std::fs::read_to_string(&a).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,phi,y,z"));
    assert_eq!(lines.count(), 20_000, "steps minus transient samples");

    let run_b = pllid(&args(&b).iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(code(&run_b), 0);
    assert_eq!(
        std::fs::read(&a).unwrap(),
        std::fs::read(&b).unwrap(),
        "repeat runs must be byte-identical"
    );
}

#[test]
fn simulate_reports_divergence_with_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let run = pllid(&[
        "simulate",
        "--config",
        "1b",
        "--dt",
        "50",
        "--steps",
        "5000",
        "--out",
        &out.display().to_string(),
    ]);
    assert_eq!(code(&run), 3, "stderr: {}", stderr(&run));
    assert!(stderr(&run).contains("numerical"), "stderr: {}", stderr(&run));
}

// ── expected ────────────────────────────────────────────────────────────────

#[test]
fn expected_prints_all_regimes_and_writes_reference_values() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("expected.csv");
    let run = pllid(&["expected", "--out", &out.display().to_string()]);
    assert_eq!(code(&run), 0, "stderr: {}", stderr(&run));
    let text = stdout(&run);
    for name in ["1b", "2c", "3d", "4", "5e", "6", "Cf"] {
        assert!(text.contains(name), "table is missing regime {name}");
    }

    let csv = std::fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("regime,t_renorm,eps1,eps2,gamma,neg_beta0,beta1")
    );
    let row_1b: Vec<&str> = lines
        .find(|l| l.starts_with("1b,"))
        .expect("1b row present")
        .split(',')
        .collect();
    let t_renorm: f64 = row_1b[1].parse().unwrap();
    let eps1: f64 = row_1b[2].parse().unwrap();
    let gamma: f64 = row_1b[4].parse().unwrap();
    let neg_beta0: f64 = row_1b[5].parse().unwrap();
    let beta1: f64 = row_1b[6].parse().unwrap();
    assert!((t_renorm - 5960.0).abs() <= 0.5);
    assert!((eps1 - 4.77).abs() / 4.77 < 0.01);
    assert!(gamma < 0.0, "detuning is signed");
    assert!((neg_beta0 - 0.31457540).abs() < 1e-6);
    assert!((beta1 - (-1.36418543e-3)).abs() < 1e-8);
}

// ── fit ─────────────────────────────────────────────────────────────────────

#[test]
fn fit_report_carries_the_estimate_and_repeats_identically() {
    let dir = tempfile::tempdir().unwrap();
    let rec = dir.path().join("record.csv");
    write_record(&rec, &offset_record(2.0, 0.8));
    let report_path = dir.path().join("report.json");
    let f4_path = dir.path().join("report.f4.csv");

    let args: Vec<String> = vec![
        "fit".into(),
        rec.display().to_string(),
        "--config".into(),
        "1b".into(),
        "--b-trial".into(),
        "0.8".into(),
        "--time-unit".into(),
        "slow".into(),
        "--out".into(),
        report_path.display().to_string(),
    ];
    let argv: Vec<&str> = args.iter().map(String::as_str).collect();
    let run = pllid(&argv);
    assert_eq!(code(&run), 0, "stderr: {}", stderr(&run));

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(report["regime"], "1b");
    assert_eq!(report["estimated"]["valid"], true);
    assert_eq!(report["estimated"]["method"], "integrated");
    let beta0 = report["estimated"]["beta"][0].as_f64().unwrap();
    let expected_beta0 = report["expected"]["beta0"].as_f64().unwrap();
    assert!((expected_beta0 - (-0.31457540)).abs() < 1e-6);
    assert!((beta0 - expected_beta0).abs() / expected_beta0.abs() < 0.02);
    assert!(report["relative_errors"]["beta0"].as_f64().unwrap() < 0.02);
    assert_eq!(report["chosen_b"].as_f64().unwrap(), 0.8);
    let sha = report["provenance"]["config_sha256"].as_str().unwrap();
    assert_eq!(sha.len(), 64);
    assert!(sha.chars().all(|c| c.is_ascii_hexdigit()));
    assert_eq!(
        report["provenance"]["tool_version"].as_str().unwrap(),
        env!("CARGO_PKG_VERSION")
    );

    let f4 = std::fs::read_to_string(&f4_path).unwrap();
    assert!(f4.starts_with("psi,f4\n"));
    assert!(f4.lines().count() > 100_000, "graph covers the record");

    let first_report = std::fs::read(&report_path).unwrap();
    let first_f4 = std::fs::read(&f4_path).unwrap();
    let rerun = pllid(&argv);
    assert_eq!(code(&rerun), 0);
    assert_eq!(std::fs::read(&report_path).unwrap(), first_report);
    assert_eq!(std::fs::read(&f4_path).unwrap(), first_f4);
}

#[test]
fn fit_scan_mode_agrees_with_the_scan_command() {
    // `fit --b-trial scan` on the default grid must pick the same shift the
    // standalone scan reports, then fit at it.
    let dir = tempfile::tempdir().unwrap();
    let rec = dir.path().join("record.csv");
    write_record(&rec, &offset_record(2.0, 0.8));
    let scan_csv = dir.path().join("scan.csv");
    let report_path = dir.path().join("report.json");

    let scan_run = pllid(&[
        "scan",
        &rec.display().to_string(),
        "--config",
        "1b",
        "--time-unit",
        "slow",
        "--out",
        &scan_csv.display().to_string(),
    ]);
    assert_eq!(code(&scan_run), 0, "stderr: {}", stderr(&scan_run));
    let summary: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("scan.summary.json")).unwrap(),
    )
    .unwrap();
    let chosen = summary["chosen_b"].as_f64().expect("scan must choose");

    let fit_run = pllid(&[
        "fit",
        &rec.display().to_string(),
        "--config",
        "1b",
        "--b-trial",
        "scan",
        "--time-unit",
        "slow",
        "--out",
        &report_path.display().to_string(),
    ]);
    assert_eq!(code(&fit_run), 0, "stderr: {}", stderr(&fit_run));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(report["chosen_b"].as_f64().unwrap(), chosen);
    assert_eq!(report["provenance"]["b_trial"], "scan");
    assert_eq!(report["provenance"]["grid"]["n_points"], 200);
    // The chooser's stable answer for this record sits near b + 0.095.
    assert!(
        (0.87..=0.92).contains(&chosen),
        "chosen shift {chosen} left its measured band"
    );
}

#[test]
fn fit_flag_contract_is_enforced() {
    let dir = tempfile::tempdir().unwrap();
    let rec = dir.path().join("record.csv");
    write_record(&rec, &offset_record(1.0, 0.0));
    let out = dir.path().join("r.json");
    let out_s = out.display().to_string();
    let rec_s = rec.display().to_string();

    // Integrated without a trial shift.
    let r1 = pllid(&["fit", &rec_s, "--config", "1b", "--out", &out_s]);
    assert_eq!(code(&r1), 2);
    assert!(stderr(&r1).contains("--b-trial"));

    // Legacy with a trial shift.
    let r2 = pllid(&[
        "fit", &rec_s, "--config", "1b", "--method", "legacy", "--b-trial", "0", "--out", &out_s,
    ]);
    assert_eq!(code(&r2), 2);

    // Integrated with a legacy-only floor.
    let r3 = pllid(&[
        "fit", &rec_s, "--config", "1b", "--b-trial", "0", "--y-floor", "0.1", "--out", &out_s,
    ]);
    assert_eq!(code(&r3), 2);

    // Partial grid flags.
    let r4 = pllid(&[
        "fit", &rec_s, "--config", "1b", "--b-trial", "scan", "--grid-min", "0", "--out", &out_s,
    ]);
    assert_eq!(code(&r4), 2);
}

#[test]
fn degenerate_fit_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let rec = dir.path().join("tiny.csv");
    write_record(&rec, &TimeSeries::new(0.0, 0.1, vec![0.1, -0.2, 0.3, -0.1]));
    let out = dir.path().join("r.json");
    let run = pllid(&[
        "fit",
        &rec.display().to_string(),
        "--config",
        "1b",
        "--b-trial",
        "0",
        "--time-unit",
        "slow",
        "--out",
        &out.display().to_string(),
    ]);
    assert_eq!(code(&run), 4, "stderr: {}", stderr(&run));
    assert!(stderr(&run).contains("degenerate"), "stderr: {}", stderr(&run));
}

// ── scan ────────────────────────────────────────────────────────────────────

#[test]
fn scan_writes_curves_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let rec = dir.path().join("record.csv");
    write_record(&rec, &offset_record(1.0, 0.8));
    let out = dir.path().join("curve.csv");
    let run = pllid(&[
        "scan",
        &rec.display().to_string(),
        "--config",
        "1b",
        "--time-unit",
        "slow",
        "--grid-min",
        "0.7",
        "--grid-max",
        "0.9",
        "--grid-step",
        "0.01",
        "--out",
        &out.display().to_string(),
    ]);
    assert_eq!(code(&run), 0, "stderr: {}", stderr(&run));

    let csv = std::fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("b_trial,L,abs_beta1,beta0,monotonic"));
    assert_eq!(lines.count(), 21);

    let summary: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("curve.summary.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(summary["regime"], "1b");
    assert_eq!(summary["n_points"], 21);
    assert_eq!(summary["n_failed"], 0);
    let l_min = summary["l_min"].as_f64().unwrap();
    let l_median = summary["l_median"].as_f64().unwrap();
    assert!(l_min > 0.0 && l_min <= l_median);
}

// ── spikes ──────────────────────────────────────────────────────────────────

#[test]
fn spikes_counts_a_synthetic_train() {
    let dir = tempfile::tempdir().unwrap();
    let rec = dir.path().join("train.csv");
    let mut values = vec![0.0; 1200];
    // Three bursts: spikes at t = 10 and 12, at 50 and 52, and at 90.
    for spike_at in [100, 120, 500, 520, 900] {
        values[spike_at] = 1.0;
    }
    write_record(&rec, &TimeSeries::new(0.0, 0.1, values));
    let out = dir.path().join("counts.csv");
    let run = pllid(&[
        "spikes",
        &rec.display().to_string(),
        "--spike-threshold",
        "0.5",
        "--burst-gap",
        "20",
        "--out",
        &out.display().to_string(),
    ]);
    assert_eq!(code(&run), 0, "stderr: {}", stderr(&run));
    let text = stdout(&run);
    assert!(text.contains("bursts: 3"), "stdout: {text}");
    assert!(text.contains("spikes: 5"), "stdout: {text}");
    assert!(text.contains("per burst: 2 2 1"), "stdout: {text}");
    assert_eq!(
        std::fs::read_to_string(&out).unwrap(),
        "burst,count\n1,2\n2,2\n3,1\n"
    );
}

// ── failure modes and help ──────────────────────────────────────────────────

#[test]
fn missing_config_exits_2_and_names_the_file() {
    let run = pllid(&[
        "simulate",
        "--config",
        "no_such_regime.cfg",
        "--out",
        "/tmp/never_written.csv",
    ]);
    assert_eq!(code(&run), 2);
    assert!(stderr(&run).contains("no_such_regime.cfg"));
}

#[test]
fn malformed_csv_exits_2_and_names_the_row() {
    let dir = tempfile::tempdir().unwrap();
    let rec = dir.path().join("broken.csv");
    let mut text = String::from("t,value\n");
    for i in 0..30 {
        if i == 16 {
            text.push_str("1.6,oops\n"); // data row 17
        } else {
            let _ = writeln!(text, "{:.1},0.0", i as f64 * 0.1);
        }
    }
    std::fs::write(&rec, text).unwrap();
    let run = pllid(&[
        "fit",
        &rec.display().to_string(),
        "--config",
        "1b",
        "--b-trial",
        "0",
        "--out",
        "/tmp/never_written.json",
    ]);
    assert_eq!(code(&run), 2);
    let err = stderr(&run);
    assert!(err.contains("row 17"), "stderr: {err}");
    assert!(err.contains("oops"), "stderr: {err}");
}

#[test]
fn help_lists_every_command() {
    let run = pllid(&["--help"]);
    assert_eq!(code(&run), 0);
    let text = stdout(&run);
    for cmd in ["simulate", "expected", "fit", "scan", "spikes"] {
        assert!(text.contains(cmd), "help is missing {cmd}");
    }
}
