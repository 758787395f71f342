//! Black-box checks of the binary: exit codes, determinism, replay.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tfbm"))
}

fn tmpdir(tag: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("tfbm-cli-test-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn simulate_is_deterministic() {
    let d = tmpdir("det");
    let args = |out: &str| {
        vec![
            "simulate".to_string(),
            "--kind=tfbm1".into(),
            "--hurst=0.3".into(),
            "--lambda=0.3".into(),
            "--n=50".into(),
            "--m=10".into(),
            "--seed=42".into(),
            format!("--out={}", d.join(out).display()),
        ]
    };
    assert!(bin().args(args("a")).output().unwrap().status.success());
    assert!(bin().args(args("b")).output().unwrap().status.success());
    let a = std::fs::read(d.join("a/simulate.csv")).unwrap();
    let b = std::fs::read(d.join("b/simulate.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn replay_reproduces_csv() {
    let d = tmpdir("replay");
    let out = d.join("run");
    let st = run(&[
        "simulate",
        "--kind=tfbm3",
        "--hurst=0.7",
        "--lambda=0.5",
        "--n=40",
        "--m=5",
        "--seed=9",
        &format!("--out={}", out.display()),
    ]);
    assert!(st.status.success(), "{}", stderr(&st));
    let original = std::fs::read(out.join("simulate.csv")).unwrap();
    std::fs::remove_file(out.join("simulate.csv")).unwrap();
    let st = run(&[&format!("--replay={}", out.join("manifest.json").display())]);
    assert!(st.status.success(), "{}", stderr(&st));
    let replayed = std::fs::read(out.join("simulate.csv")).unwrap();
    assert_eq!(original, replayed);
}

#[test]
fn tfbm3_low_hurst_is_a_usage_error() {
    let st = run(&["simulate", "--kind=tfbm3", "--hurst=0.4", "--lambda=1", "--n=10", "--m=2"]);
    assert_eq!(st.status.code(), Some(2));
    assert!(stderr(&st).contains("H"), "message should name the Hurst constraint");
}

#[test]
fn dma_lag_one_is_a_usage_error() {
    let d = tmpdir("dma1");
    let st = run(&[
        "simulate",
        "--kind=fbm",
        "--hurst=0.5",
        "--n=30",
        "--m=2",
        &format!("--out={}", d.display()),
    ]);
    assert!(st.status.success(), "{}", stderr(&st));
    let st = run(&[
        "test",
        &format!("--input={}", d.join("simulate.csv").display()),
        "--kind=fbm",
        "--hurst=0.5",
        "--stat=dma",
        "--tau=1",
        "--null-draws=100",
        &format!("--out={}", d.display()),
    ]);
    assert_eq!(st.status.code(), Some(2), "{}", stderr(&st));
}

#[test]
fn malformed_csv_is_a_usage_error() {
    let d = tmpdir("badcsv");
    std::fs::write(d.join("bad.csv"), "1.0,2.0\n3.0,oops\n").unwrap();
    let st = run(&[
        "test",
        &format!("--input={}", d.join("bad.csv").display()),
        "--kind=fbm",
        "--hurst=0.5",
        "--stat=tamsd",
        &format!("--out={}", d.display()),
    ]);
    assert_eq!(st.status.code(), Some(2));
}

#[test]
fn power_zero_replicates_is_a_usage_error() {
    let st = run(&[
        "power",
        "--kind=fbm",
        "--hurst=0.5",
        "--stat=dma",
        "--alt-hurst=0.6",
        "--n=30",
        "--m=0",
    ]);
    assert_eq!(st.status.code(), Some(2));
}

#[test]
fn qlines_bad_probs_is_a_usage_error() {
    let st = run(&[
        "qlines",
        "--kind=fbm",
        "--hurst=0.5",
        "--n=20",
        "--m=100",
        "--probs=0.5,1.5",
    ]);
    assert_eq!(st.status.code(), Some(2));
}

#[test]
fn qlines_default_probs_give_five_lines() {
    let d = tmpdir("qdef");
    let st = run(&[
        "qlines",
        "--kind=fbm",
        "--hurst=0.5",
        "--n=20",
        "--m=120",
        &format!("--out={}", d.display()),
    ]);
    assert!(st.status.success(), "{}", stderr(&st));
    let text = std::fs::read_to_string(d.join("qlines.csv")).unwrap();
    let mut probs: Vec<&str> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').nth(1).unwrap())
        .collect();
    probs.sort();
    probs.dedup();
    assert_eq!(probs.len(), 5);
}

#[test]
fn acvf_summary_announces_increments() {
    let d = tmpdir("acvf");
    let st = run(&[
        "simulate",
        "--kind=fbm",
        "--hurst=0.5",
        "--n=30",
        "--m=3",
        &format!("--out={}", d.display()),
    ]);
    assert!(st.status.success());
    let st = run(&[
        "test",
        &format!("--input={}", d.join("simulate.csv").display()),
        "--kind=fbm",
        "--hurst=0.5",
        "--stat=acvf",
        "--null-draws=200",
        &format!("--out={}", d.display()),
    ]);
    assert!(st.status.success(), "{}", stderr(&st));
    assert!(String::from_utf8_lossy(&st.stdout).contains("first differences"));
}

#[test]
fn unknown_preset_lists_names() {
    let st = run(&["power", "--preset=nope"]);
    assert_eq!(st.status.code(), Some(2));
    assert!(stderr(&st).contains("paper-fig-tfbm1-H03-l03"));
}

#[test]
fn power_on_null_point_is_near_significance() {
    let d = tmpdir("size");
    let st = run(&[
        "power",
        "--kind=tfbm1",
        "--hurst=0.5",
        "--lambda=1",
        "--stat=dma",
        "--alt-hurst=0.5",
        "--n=60",
        "--m=400",
        "--null-draws=4000",
        "--seed=5",
        &format!("--out={}", d.display()),
    ]);
    assert!(st.status.success(), "{}", stderr(&st));
    let text = std::fs::read_to_string(d.join("power.csv")).unwrap();
    let row = text.lines().find(|l| !l.starts_with('#')).unwrap();
    let power: f64 = row.rsplit(',').next().unwrap().parse().unwrap();
    assert!(power > 0.0 && power < 0.12, "size at null was {power}");
}
