mod common;

use std::path::Path;

use common::{read, run_in};
use depminer_cli::EXIT_PROJECT;
use depminer_testkit::{fixture, fixtures};

fn write_manifest(dir: &Path, entries: &[(String, String, &str)]) -> std::path::PathBuf {
    let entries: Vec<_> = entries
        .iter()
        .map(|(root, out, g)| serde_json::json!({"root": root, "out": out, "granularity": g}))
        .collect();
    let path = dir.join("manifest.json");
    std::fs::write(&path, serde_json::json!({ "entries": entries }).to_string()).unwrap();
    path
}

fn fixture_entries() -> Vec<(String, String, &'static str)> {
    fixtures()
        .map(|name| {
            let g = if name.starts_with("py") {
                "file"
            } else {
                "token"
            };
            (
                fixture(name).display().to_string(),
                format!("batch/{name}.json"),
                g,
            )
        })
        .collect()
}

#[test]
fn batch_outputs_equal_single_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let entries = fixture_entries();
    let manifest = write_manifest(tmp.path(), &entries);
    let batch = run_in(tmp.path(), &["batch", manifest.to_str().unwrap()]);
    assert!(batch.status.success(), "{}", common::stderr(&batch));
    for (root, out, g) in &entries {
        let single = tmp.path().join("single.json");
        let run = run_in(
            tmp.path(),
            &[
                "mine",
                root,
                "--out",
                single.to_str().unwrap(),
                "--granularity",
                g,
            ],
        );
        assert!(run.status.success());
        assert!(
            read(&tmp.path().join(out)) == read(&single),
            "{root}: batch output differs"
        );
    }
}

#[test]
fn invalid_root_fails_only_its_entry() {
    let tmp = tempfile::tempdir().unwrap();
    let mut entries = fixture_entries();
    entries.insert(
        2,
        (
            "does/not/exist".into(),
            "batch/missing.json".into(),
            "token",
        ),
    );
    let manifest = write_manifest(tmp.path(), &entries);
    let batch = run_in(tmp.path(), &["batch", manifest.to_str().unwrap()]);
    assert_eq!(batch.status.code(), Some(EXIT_PROJECT));
    assert!(!tmp.path().join("batch/missing.json").exists());
    for (_, out, _) in entries.iter().filter(|e| e.0 != "does/not/exist") {
        assert!(tmp.path().join(out).is_file(), "{out} missing");
    }
}

#[test]
fn duplicate_out_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let root = fixture("py_shop").display().to_string();
    let other = fixture("py_graphs").display().to_string();
    let manifest = write_manifest(
        tmp.path(),
        &[
            (root, "same.json".into(), "token"),
            (other, "same.json".into(), "token"),
        ],
    );
    let batch = run_in(tmp.path(), &["batch", manifest.to_str().unwrap()]);
    assert_eq!(batch.status.code(), Some(1));
    assert!(!tmp.path().join("same.json").exists());
}

#[test]
fn malformed_manifest_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = tmp.path().join("m.json");
    std::fs::write(&manifest, r#"{"entries": [{"root": "x"}]}"#).unwrap();
    let batch = run_in(tmp.path(), &["batch", manifest.to_str().unwrap()]);
    assert_eq!(batch.status.code(), Some(1));
}
