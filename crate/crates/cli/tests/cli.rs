//! End-to-end tests of the `lhvsim` binary: reproducibility of emitted
//! artifacts, error signalling, and a small-scale accuracy smoke test.

use std::path::Path;
use std::process::{Command, Output};

fn lhvsim() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lhvsim"))
}

fn run_ok(args: &[&str], dir: &Path) -> Output {
    let out = lhvsim().args(args).current_dir(dir).output().unwrap();
    assert!(
        out.status.success(),
        "command {args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

#[test]
fn equal_seeds_give_byte_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "run-random", "--d", "2", "--n", "4", "--n-ini", "2000", "--seed", "11",
    ];
    run_ok(&[&args[..], &["--out", "a"]].concat(), dir.path());
    run_ok(&[&args[..], &["--out", "b"]].concat(), dir.path());
    let a = std::fs::read(dir.path().join("a/report.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b/report.csv")).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b);

    // a different seed must change the report
    run_ok(
        &["run-random", "--d", "2", "--n", "4", "--n-ini", "2000", "--seed", "12", "--out", "c"],
        dir.path(),
    );
    let c = std::fs::read(dir.path().join("c/report.csv")).unwrap();
    assert_ne!(a, c);
}

#[test]
fn thread_count_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "run-random", "--d", "2", "--n", "4", "--n-ini", "2000", "--seed", "3",
    ];
    run_ok(&[&args[..], &["--out", "par"]].concat(), dir.path());
    run_ok(
        &[&args[..], &["--threads", "1", "--out", "ser"]].concat(),
        dir.path(),
    );
    assert_eq!(
        std::fs::read(dir.path().join("par/report.csv")).unwrap(),
        std::fs::read(dir.path().join("ser/report.csv")).unwrap()
    );
}

#[test]
fn unknown_protocol_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = lhvsim()
        .args(["run-random", "--protocol", "p9"])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn prtq_requires_d2() {
    let dir = tempfile::tempdir().unwrap();
    let out = lhvsim()
        .args(["run-random", "--protocol", "prtq", "--d", "3"])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_is_read_and_flags_override_it() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("study.cfg"),
        "# small study\nd = 2\nn = 3\nn-ini = 1500\nseed = 5\n",
    )
    .unwrap();
    run_ok(
        &["run-random", "--config", "study.cfg", "--out", "file"],
        dir.path(),
    );
    let manifest =
        std::fs::read_to_string(dir.path().join("file/manifest.json")).unwrap();
    assert!(manifest.contains("\"n\": 3"));
    assert!(manifest.contains("\"seed\": 5"));

    run_ok(
        &["run-random", "--config", "study.cfg", "--n", "2", "--out", "flag"],
        dir.path(),
    );
    let manifest =
        std::fs::read_to_string(dir.path().join("flag/manifest.json")).unwrap();
    assert!(manifest.contains("\"n\": 2"));
}

#[test]
fn d2_defaults_hit_small_delta() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(
        &[
            "run-random", "--d", "2", "--n", "8", "--n-ini", "40000", "--seed", "1",
            "--out", "d2",
        ],
        dir.path(),
    );
    let csv = std::fs::read_to_string(dir.path().join("d2/report.csv")).unwrap();
    let aggregate = csv
        .lines()
        .find(|l| l.split(',').nth(3) == Some("-1"))
        .expect("aggregate row present");
    let fields: Vec<&str> = aggregate.split(',').collect();
    let mean_delta: f64 = fields[7].parse().unwrap();
    let accept: f64 = fields[6].parse().unwrap();
    assert!(mean_delta < 0.01, "mean delta {mean_delta}");
    assert!((accept - 0.5).abs() < 0.01, "acceptance {accept}");
}

#[test]
fn sweep_accepts_fractional_cutoffs() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(
        &[
            "sweep-delta", "--d", "2", "--cutoffs", "11/24,0.5", "--n", "2",
            "--n-ini", "1000", "--seed", "2", "--out", "sw",
        ],
        dir.path(),
    );
    let csv = std::fs::read_to_string(dir.path().join("sw/report.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3); // header + two cutoffs
}

#[test]
fn calibrate_reports_scale_ratio() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_ok(
        &[
            "calibrate-m", "--d", "2", "--alpha", "10", "--n", "50000",
            "--seed", "4", "--out", "cal",
        ],
        dir.path(),
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("ratio"), "stdout: {stdout}");
    let csv = std::fs::read_to_string(dir.path().join("cal/report.csv")).unwrap();
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    let ratio: f64 = row[5].parse().unwrap();
    assert!((ratio - 10.0).abs() < 1.0, "ratio {ratio}");
}
