use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use richardson_cli::run::{is_partial, PARTIAL_MARKER};
use richardson_cli::{parse_config, run_experiment, RunOptions};

fn richardson(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_richardson")).args(args).output().unwrap()
}

fn out_arg(dir: &Path) -> String {
    format!("--out={}", dir.display())
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn survival_csv_schema() {
    let tmp = tempfile::tempdir().unwrap();
    let out = richardson(&[
        "survival",
        "cfg=hyperplane:W=32",
        "lambda2=1.0",
        "R=4,8,16",
        "--reps",
        "50",
        "--seed",
        "7",
        &out_arg(tmp.path()),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = read(tmp.path(), "survival.csv");
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("R,survived,reps,p_hat,ci_lo,ci_hi"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 3);
    let survived: Vec<u64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(survived.windows(2).all(|w| w[0] >= w[1]));
    assert!(rows.iter().all(|r| r[2] == "50"));
    for name in ["config.txt", "per_rep.csv", "summary.json", "manifest.json"] {
        assert!(tmp.path().join(name).exists(), "{name}");
    }
    assert!(!is_partial(tmp.path()));
    let summary: serde_json::Value = serde_json::from_str(&read(tmp.path(), "summary.json")).unwrap();
    assert_eq!(summary["config"]["M"], "32");
    assert_eq!(summary["truncation"]["cfg"], "hyperplane:W=32");
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for (dir, threads) in [(a.path(), "1"), (b.path(), "3")] {
        let out = richardson(&["mu", "n=16", "--reps", "40", "--threads", threads, &out_arg(dir)]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for name in ["per_rep.csv", "summary.csv"] {
        assert_eq!(read(a.path(), name), read(b.path(), name), "{name}");
    }
    assert_eq!(read(a.path(), "summary.csv").lines().next(), Some("quantity,mean,ci_lo,ci_hi,n"));
    assert_eq!(read(a.path(), "per_rep.csv").lines().next(), Some("rep,quantity,value"));
    let manifest: serde_json::Value = serde_json::from_str(&read(a.path(), "manifest.json")).unwrap();
    assert!(manifest["timestamp"].is_string());
    assert!(manifest["build"].as_str().unwrap().starts_with(env!("CARGO_PKG_VERSION")));
}

#[test]
fn manifest_config_reproduces_the_run() {
    let first = tempfile::tempdir().unwrap();
    let second = tempfile::tempdir().unwrap();
    let out = richardson(&["descent", "b=2", "W=16", "--reps", "30", &out_arg(first.path())]);
    assert!(out.status.success());
    let manifest: serde_json::Value = serde_json::from_str(&read(first.path(), "manifest.json")).unwrap();
    let config = second.path().join("config.txt");
    fs::write(&config, manifest["config_text"].as_str().unwrap()).unwrap();
    let out = richardson(&["descent", "--config", config.to_str().unwrap(), &out_arg(second.path())]);
    assert!(out.status.success());
    assert_eq!(read(first.path(), "per_rep.csv"), read(second.path(), "per_rep.csv"));
}

#[test]
fn zero_reps_fails_before_running() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("never");
    let out = richardson(&["mu", "--reps", "0", &out_arg(&dir)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("reps must be at least"));
    assert!(!dir.exists());
}

#[test]
fn config_errors_carry_positions() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("bad.conf");
    fs::write(&config, "# survival\ncfg=halfaxis:L=64\nR=128\n").unwrap();
    let out = richardson(&["survival", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3, column 1") && err.contains("M=2R"), "{err}");
    let out = richardson(&["survival", "cfg=hyperplane:W=64", "R=16", "lambda2=-1"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("lambda > 0"));
}

#[test]
fn horizon_hits_exit_nonzero() {
    let tmp = tempfile::tempdir().unwrap();
    let out = richardson(&[
        "survival",
        "cfg=hyperplane:W=32",
        "R=16",
        "horizon_factor=0.01",
        "--reps",
        "10",
        &out_arg(tmp.path()),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("safety horizon"));
    let summary: serde_json::Value = serde_json::from_str(&read(tmp.path(), "summary.json")).unwrap();
    assert!(summary["horizon_hits"].as_u64().unwrap() > 0);
}

#[test]
fn simulate_emits_the_event_log() {
    let tmp = tempfile::tempdir().unwrap();
    let out = richardson(&["simulate", "cfg=halfaxis:L=6", "M=6", "--lambda2", "1.5", "--emit-events", &out_arg(tmp.path())]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let events = read(tmp.path(), "events.csv");
    let mut lines = events.lines();
    assert_eq!(lines.next(), Some("time,x1,x2,type"));
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    assert_eq!(rows.len(), 13 * 13);
    let times: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert!(times.windows(2).all(|w| w[0] <= w[1]));
    assert!(read(tmp.path(), "outcome.csv").contains("termination,exhausted"));
}

#[test]
fn unwritable_output_is_an_error_and_failures_leave_the_marker() {
    let tmp = tempfile::tempdir().unwrap();
    let file = tmp.path().join("plain-file");
    fs::write(&file, "").unwrap();
    let cfg = parse_config(&format!("kind=mu n=4 reps=4 out={}", file.join("sub").display())).unwrap();
    assert!(run_experiment(&cfg, &RunOptions::default()).is_err());

    // the box sized from mu=5 is too small for t=40
    let dir = tmp.path().join("shape");
    let cfg = parse_config(&format!("kind=shape t=40 mu=5 reps=2 out={}", dir.display())).unwrap();
    assert!(run_experiment(&cfg, &RunOptions::default()).is_err());
    assert!(dir.join(PARTIAL_MARKER).exists());
}
