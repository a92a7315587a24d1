mod common;

use common::{read, run_in, stderr};
use depminer_testkit::{fixture, fixtures_dir};

#[test]
fn help_and_version_exit_zero() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(run_in(tmp.path(), &["--help"]).status.code(), Some(0));
    assert_eq!(run_in(tmp.path(), &["--version"]).status.code(), Some(0));
}

#[test]
fn bad_arguments_exit_one() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o.json");
    let out = out.to_str().unwrap();
    let root = fixture("py_shop");
    let root = root.to_str().unwrap();
    for args in [
        vec!["frobnicate"],
        vec!["mine", root],
        vec!["mine", root, "--out", out, "--granularity", "module"],
        vec!["mine", root, "--out", out, "--jobs", "0"],
        vec!["mine", root, "--out", out, "--lang", "cobol"],
        vec!["mine", root, "--out", out, "--emit-dot", "g.dot"],
        vec!["mine", root, "--out", out, "--scope", "missing-scope.json"],
    ] {
        let run = run_in(tmp.path(), &args);
        assert_eq!(run.status.code(), Some(1), "{args:?}: {}", stderr(&run));
        assert!(!tmp.path().join("o.json").exists(), "{args:?} wrote output");
    }
}

#[test]
fn missing_root_exits_two_without_output() {
    let tmp = tempfile::tempdir().unwrap();
    let run = run_in(tmp.path(), &["mine", "nowhere", "--out", "o.json"]);
    assert_eq!(run.status.code(), Some(2));
    assert!(!tmp.path().join("o.json").exists());
}

#[test]
fn summary_line_goes_to_stderr() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("nested/dir/o.json");
    let run = run_in(
        &fixtures_dir(),
        &["mine", "py_shop", "--out", out.to_str().unwrap()],
    );
    assert!(run.status.success());
    let err = stderr(&run);
    assert!(err.starts_with("depminer: py_shop: 10 files, "), "{err}");
    assert!(err.contains("index built"));
    assert!(run.stdout.is_empty());
    assert!(out.is_file());
}

#[test]
fn absolute_paths_use_the_canonical_root() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o.json");
    let run = run_in(
        &fixtures_dir(),
        &[
            "mine",
            "java_shapes",
            "--out",
            out.to_str().unwrap(),
            "--absolute-paths",
        ],
    );
    assert!(run.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&read(&out)).unwrap();
    let root = fixture("java_shapes").canonicalize().unwrap();
    let root = root.to_str().unwrap();
    assert_eq!(doc["projectRoot"], root);
    let path = doc["dependencies"][0]["from"]["location"]["path"]
        .as_str()
        .unwrap();
    assert!(path.starts_with(root), "{path}");
}

#[test]
fn language_filter_skips_other_languages() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o.json");
    let run = run_in(
        &fixtures_dir(),
        &[
            "mine",
            "java_shapes",
            "--out",
            out.to_str().unwrap(),
            "--lang",
            "python-subset",
        ],
    );
    assert!(run.status.success(), "{}", stderr(&run));
    let doc: serde_json::Value = serde_json::from_slice(&read(&out)).unwrap();
    assert!(doc["dependencies"].as_array().unwrap().is_empty());
}
