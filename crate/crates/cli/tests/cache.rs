mod common;

use std::path::Path;

use common::{assert_ok, read, run_in, stderr};
use depminer_core::aggregate::{lift, TreeMap};
use depminer_core::frontend::Registry;
use depminer_core::model::Granularity;
use depminer_core::output::parse_json;
use depminer_core::scope::AnalysisScope;
use depminer_testkit::copy_fixture;
use depminer_testkit::oracle::Oracle;

fn mine(project: &Path, cache: &Path, out: &Path) -> String {
    let run = run_in(
        project.parent().unwrap(),
        &[
            "mine",
            project.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--index-cache",
            cache.to_str().unwrap(),
        ],
    );
    assert_ok(&run);
    stderr(&run)
}

/// Checks a token-level output file against the brute-force oracle.
fn assert_matches_oracle(project: &Path, out: &Path) {
    let registry = Registry::standard();
    let oracle = Oracle::load(project, &registry, AnalysisScope::default());
    let (records, unresolved) = oracle.resolve();
    let mut trees = TreeMap::new(&registry);
    for tree in oracle.trees() {
        trees.insert(tree.clone());
    }
    let expected: Vec<_> = lift(&records, Granularity::Token, &trees)
        .unwrap()
        .edges
        .iter()
        .map(|e| e.to_record())
        .collect();
    let doc = parse_json(&read(out)).unwrap();
    assert_eq!(doc.dependencies, expected);
    assert_eq!(doc.unresolved, unresolved);
}

fn check(fixture: &str, touched: &str, appended: &str) {
    let tmp = tempfile::tempdir().unwrap();
    let project = tmp.path().join(fixture);
    let cache = tmp.path().join("cache");
    copy_fixture(fixture, &project);

    let first = tmp.path().join("first.json");
    assert!(mine(&project, &cache, &first).contains("index built"));
    let second = tmp.path().join("second.json");
    assert!(mine(&project, &cache, &second).contains("index cached"));
    assert!(
        read(&first) == read(&second),
        "{fixture}: cached run differs"
    );

    let path = project.join(touched);
    let mut text = std::fs::read_to_string(&path).unwrap();
    text.push_str(appended);
    std::fs::write(&path, text).unwrap();

    let third = tmp.path().join("third.json");
    let summary = mine(&project, &cache, &third);
    assert!(summary.contains("index updated (1 reindexed)"), "{summary}");
    assert!(read(&third) != read(&first));
    assert_matches_oracle(&project, &third);

    let fresh = tmp.path().join("fresh.json");
    let run = run_in(
        tmp.path(),
        &[
            "mine",
            project.to_str().unwrap(),
            "--out",
            fresh.to_str().unwrap(),
        ],
    );
    assert_ok(&run);
    assert!(
        read(&fresh) == read(&third),
        "{fixture}: updated run differs from a fresh run"
    );
}

#[test]
fn python_cache_is_reused_and_updated() {
    check(
        "py_shop",
        "shop/pricing.py",
        "\n\ndef surcharge(amount):\n    return gross(amount) + TAX_RATE\n",
    );
}

#[test]
fn java_cache_is_reused_and_updated() {
    check(
        "java_bank",
        "src/com/bank/util/Money.java",
        "\nclass Fees {\n    Money fee() { return Money.of(5); }\n}\n",
    );
}
