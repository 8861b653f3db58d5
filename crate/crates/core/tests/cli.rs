//! End-to-end runs of the `icd` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use icd::graph::{graph_equal, parse_dag, parse_pag};
use icd::oracle::true_pag;

fn icd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_icd")).args(args).output().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn usage_errors_exit_with_one() {
    for args in [
        &["frobnicate"][..],
        &["gen", "--nodes", "ten", "--out", "x"],
        &["discover", "--algo", "nope", "--dag", "x.dag"],
        &["bench-oracle", "--format", "xml", "--out", "x"],
        &["discover"],
    ] {
        let out = icd(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn help_and_version_exit_with_zero() {
    assert_eq!(icd(&["--help"]).status.code(), Some(0));
    assert_eq!(icd(&["--version"]).status.code(), Some(0));
}

#[test]
fn runtime_failures_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.dag");
    assert_eq!(icd(&["discover", "--dag", path(&missing)]).status.code(), Some(2));
    let stem = dir.path().join("g");
    assert_eq!(icd(&["gen", "--nodes", "1", "--out", path(&stem)]).status.code(), Some(2));
}

#[test]
fn generated_instance_is_recovered_by_both_algorithms() {
    let dir = tempfile::tempdir().unwrap();
    let stem = dir.path().join("inst");
    let out = icd(&["gen", "--nodes", "10", "--rho", "2", "--seed", "5", "--out", path(&stem)]);
    assert_eq!(out.status.code(), Some(0));
    let dag_file = dir.path().join("inst.dag");
    let dag = parse_dag(&fs::read_to_string(&dag_file).unwrap()).unwrap();
    let truth = true_pag(&dag).unwrap();
    let stored = parse_pag(&fs::read_to_string(dir.path().join("inst.pag")).unwrap()).unwrap();
    assert!(graph_equal(&stored, &truth).unwrap());
    assert!(!dir.path().join("inst.csv").exists());

    let learned = dir.path().join("learned");
    let out = icd(&["discover", "--dag", path(&dag_file), "--algo", "both", "--out", path(&learned)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["icd.pag", "fci.pag"] {
        let g = parse_pag(&fs::read_to_string(learned.join(name)).unwrap()).unwrap();
        assert!(graph_equal(&g, &truth).unwrap(), "{name}");
    }

    let out = icd(&["discover", "--dag", path(&dag_file)]);
    let printed = parse_pag(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert!(graph_equal(&printed, &truth).unwrap());
}

#[test]
fn data_discovery_writes_an_audit_trail() {
    let dir = tempfile::tempdir().unwrap();
    let stem = dir.path().join("inst");
    let gen = icd(&["gen", "--nodes", "8", "--samples", "500", "--seed", "3", "--out", path(&stem)]);
    assert_eq!(gen.status.code(), Some(0));
    let audit = dir.path().join("audit.csv");
    let out = icd(&[
        "discover",
        "--data",
        path(&dir.path().join("inst.csv")),
        "--alpha",
        "0.05",
        "--audit",
        path(&audit),
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(json.is_object());
    let rows = fs::read_to_string(&audit).unwrap();
    assert!(rows.lines().count() > 1);
}

#[test]
fn benchmark_then_report() {
    let dir = tempfile::tempdir().unwrap();
    let results = dir.path().join("results");
    let out = icd(&[
        "bench-oracle",
        "--nodes",
        "6,7",
        "--graphs",
        "3",
        "--seed",
        "9",
        "--jobs",
        "2",
        "--out",
        path(&results),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let runs = fs::read_to_string(results.join("runs.csv")).unwrap();
    assert_eq!(runs.lines().count(), 1 + 2 * 3 * 2);

    let report = dir.path().join("report");
    let out = icd(&["report", path(&results), "--out", path(&report)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["summary.csv", "comparison.csv", "ecdf.csv", "histogram.csv"] {
        assert!(report.join(f).exists(), "{f}");
    }
}

#[test]
fn report_on_an_empty_directory_fails_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report");
    let out = icd(&["report", path(dir.path()), "--out", path(&report)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!report.exists() || fs::read_dir(&report).unwrap().next().is_none());
}
