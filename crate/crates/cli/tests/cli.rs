use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_sunada-lab");

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str], config: &Path, out: &Path) -> i32 {
    let status = Command::new(BIN)
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
        .status;
    status.code().expect("exit code")
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn group_check_passes_on_the_gassmann_pair() {
    let out = tempfile::tempdir().unwrap();
    assert_eq!(run(&["group-check"], &configs().join("gassmann.json"), out.path()), 0);
    let report = json(&out.path().join("report.json"));
    assert_eq!(report["status"], "pass");
    assert_eq!(report["command"], "group-check");
    assert!(out.path().join("group_check.json").exists());
    assert!(out.path().join("summary.txt").exists());
}

#[test]
fn spectrum_files_have_fixed_header_and_metadata() {
    let out = tempfile::tempdir().unwrap();
    assert_eq!(run(&["spectrum"], &configs().join("pants.json"), out.path()), 0);
    let csv = std::fs::read_to_string(out.path().join("spectrum.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("length,multiplicity,primitive,word,monodromy_class"));
    let doc = json(&out.path().join("spectrum.json"));
    assert_eq!(doc["metadata"]["complete"], true);
    assert_eq!(doc["metadata"]["cutoff"], 4.0);
    assert_eq!(doc["records"].as_array().unwrap().len(), csv.lines().count() - 1);
    let first: f64 = doc["entries"][0]["length"].as_f64().unwrap();
    assert!((first - 1.0).abs() < 1e-9);
}

#[test]
fn exhausted_budget_exits_with_incomplete() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        r#"{"group": {"type": "cyclic", "n": 1},
            "surface": {"kind": "pants", "lengths": [1.0, 1.2, 1.4]},
            "spectrum": {"cutoff": 4.0, "node_budget": 10}}"#,
    );
    assert_eq!(run(&["spectrum"], &cfg, &dir.path().join("out")), 2);
    let report = json(&dir.path().join("out/report.json"));
    assert_eq!(report["status"], "incomplete");
}

#[test]
fn non_gassmann_pair_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        r#"{"group": {"type": "holomorph_z8"},
            "subgroups": ["H1", ["(1,0)", "(1,2)", "(1,4)", "(1,6)"]]}"#,
    );
    assert_eq!(run(&["certificate"], &cfg, &dir.path().join("out")), 1);
    assert_eq!(json(&dir.path().join("out/report.json"))["status"], "fail");
}

#[test]
fn config_errors_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let bad_template = write_config(
        dir.path(),
        "a.json",
        r#"{"group": {"type": "cyclic", "n": 3}, "template": {"delta": 0.9, "epsilon": 0.8}}"#,
    );
    assert_eq!(run(&["build"], &bad_template, &out), 3);
    let unknown_field = write_config(dir.path(), "b.json", r#"{"group": {"type": "cyclic", "n": 3}, "colour": 1}"#);
    assert_eq!(run(&["build"], &unknown_field, &out), 3);
    assert_eq!(run(&["build"], &dir.path().join("missing.json"), &out), 3);
    assert_eq!(run(&["build", "--threads", "0"], &configs().join("z3_cayley.json"), &out), 3);
    assert!(!out.join("report.json").exists());
}

#[test]
fn comparing_a_file_with_itself_gives_an_empty_diff() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["spectrum"], &configs().join("pants.json"), dir.path()), 0);
    let cfg = write_config(
        dir.path(),
        "cmp.json",
        r#"{"group": {"type": "cyclic", "n": 1},
            "compare": {"first": "spectrum.json", "second": "spectrum.json"}}"#,
    );
    let out = dir.path().join("cmp");
    assert_eq!(run(&["compare"], &cfg, &out), 0);
    let diff = json(&out.join("diff.json"));
    assert!(diff.as_object().unwrap().values().all(|v| v.as_array().is_some_and(Vec::is_empty)));
}

#[test]
fn seed_override_changes_the_surface_and_hash() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("z3_cayley.json");
    let (a, b, c) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("c"));
    assert_eq!(run(&["build", "--seed", "5"], &cfg, &a), 0);
    assert_eq!(run(&["build", "--seed", "5"], &cfg, &b), 0);
    assert_eq!(run(&["build", "--seed", "6"], &cfg, &c), 0);
    let read = |d: &Path| std::fs::read(d.join("surface.json")).unwrap();
    assert_eq!(read(&a), read(&b));
    assert_ne!(read(&a), read(&c));
    let hash = |d: &Path| json(&d.join("report.json"))["config_hash"].clone();
    assert_eq!(hash(&a), hash(&b));
    assert_ne!(hash(&a), hash(&c));
}

#[test]
fn snap_accepts_converging_sequences() {
    let out = tempfile::tempdir().unwrap();
    assert_eq!(run(&["snap"], &configs().join("snap.json"), out.path()), 0);
    let doc = json(&out.path().join("snap.json"));
    assert_eq!(doc["report"]["consistent"], true);
    assert_eq!(doc["epsilon"], 1.0);
}
