//! End-to-end checks of the command-line surface: subcommands, exit codes,
//! output shapes, and byte-level determinism.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn gtsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gtsim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn temp_path(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("gtsim_cli_{}_{name}", std::process::id()))
}

#[test]
fn version_prints_toolkit_and_schema() {
    let out = gtsim(&["--version"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("gtsim"), "{text}");
    assert!(text.contains("csv schema 1"), "{text}");
}

#[test]
fn unknown_subcommand_exits_2_with_usage() {
    let out = gtsim(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.to_lowercase().contains("usage"), "{err}");

    let out = gtsim(&["bounds", "--n", "100", "--k", "10", "--p", "0.1", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bounds_prints_one_csv_row() {
    let out = gtsim(&[
        "bounds",
        "--n",
        "1000",
        "--k",
        "20",
        "--p",
        "0.05",
        "--q1",
        "0.01",
        "--q2",
        "0.001",
        "--samples",
        "2000",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1, "expected exactly one CSV row: {text:?}");
    let fields: Vec<&str> = lines[0].split(',').collect();
    assert_eq!(fields.len(), 10);
    assert_eq!(fields[0], "1000");
    // Header goes to stdout only on request.
    let with_header = gtsim(&[
        "bounds",
        "--n",
        "1000",
        "--k",
        "20",
        "--p",
        "0.05",
        "--q1",
        "0.01",
        "--q2",
        "0.001",
        "--samples",
        "2000",
        "--header",
    ]);
    let text = stdout(&with_header);
    assert!(text.starts_with("n,k,p,q1,q2,"), "{text}");
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn bounds_rejects_bad_params_with_exit_2() {
    let out = gtsim(&["bounds", "--n", "1000", "--k", "30", "--p", "0.05"]);
    assert_eq!(out.status.code(), Some(2));
    let out = gtsim(&["bounds", "--n", "100", "--k", "10", "--p", "1.5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_with_no_seeds_reports_one_test() {
    for alg in ["graph-aware", "binary-splitting"] {
        let out = gtsim(&[
            "simulate", "--n", "16", "--k", "4", "--p", "0", "--alg", alg,
        ]);
        assert!(out.status.success());
        let text = stdout(&out);
        assert!(text.contains("tests used: 1"), "{text}");
        assert!(text.contains("exact recovery: true"), "{text}");
    }
}

#[test]
fn simulate_transcript_dump_shape() {
    let out = gtsim(&[
        "simulate",
        "--n",
        "16",
        "--k",
        "4",
        "--p",
        "0.3",
        "--q1",
        "0.5",
        "--seed",
        "5",
        "--alg",
        "binary-splitting",
        "--transcript",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    // Transcript lines: `t subset-size csv-of-ids outcome`.
    let first = text
        .lines()
        .find(|l| l.starts_with("1 "))
        .expect("transcript present");
    let fields: Vec<&str> = first.split_whitespace().collect();
    assert_eq!(fields.len(), 4);
    assert_eq!(fields[1], "16");
}

#[test]
fn regimes_reports_classification() {
    let out = gtsim(&[
        "regimes", "--n", "1000000", "--k", "10", "--p", "0.00001", "--q1", "0.5",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("improvement factor: 5.0000"), "{text}");
}

#[test]
fn experiment_runs_are_byte_identical() {
    let config_path = temp_path("fig5.cfg");
    let out_a = temp_path("sweep_a.csv");
    let out_b = temp_path("sweep_b.csv");
    fs::write(
        &config_path,
        "n = 100\nk = 10\np_grid = 0, 0.03, 0.08\nq1 = 0.05\nq2 = 0.002\ntrials = 8\nmc_samples = 2000\n",
    )
    .unwrap();

    let run = |out: &PathBuf| {
        let status = gtsim(&[
            "experiment",
            "--config",
            config_path.to_str().unwrap(),
            "--seed",
            "7",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(status.status.success(), "{:?}", status);
        fs::read(out).unwrap()
    };
    let bytes_a = run(&out_a);
    let bytes_b = run(&out_b);
    assert_eq!(bytes_a, bytes_b);
    assert!(bytes_a.starts_with(b"p,alg,mean_tests,"));

    // Without --out the CSV lands on stdout.
    let out = gtsim(&[
        "experiment",
        "--config",
        config_path.to_str().unwrap(),
        "--seed",
        "7",
    ]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).as_bytes(), &bytes_a[..]);

    for p in [&config_path, &out_a, &out_b] {
        let _ = fs::remove_file(p);
    }
}

#[test]
fn experiment_config_errors_exit_2() {
    let config_path = temp_path("bad.cfg");
    fs::write(
        &config_path,
        "n = 100\nk = 30\np_grid = 0.1\nq1 = 0\nq2 = 0\n",
    )
    .unwrap();
    let out = gtsim(&["experiment", "--config", config_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("k:"), "{err}");
    let _ = fs::remove_file(&config_path);

    let out = gtsim(&["experiment", "--config", "/nonexistent/path.cfg"]);
    assert_eq!(out.status.code(), Some(1));
}
