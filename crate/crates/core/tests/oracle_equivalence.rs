use std::time::Instant;

use depminer_core::frontend::Registry;
use depminer_core::pipeline::resolve_project;
use depminer_core::scope::AnalysisScope;
use depminer_testkit::oracle::Oracle;
use depminer_testkit::{fixture, fixtures};

#[test]
fn resolver_matches_brute_force_on_every_fixture() {
    let started = Instant::now();
    let registry = Registry::standard();
    for name in fixtures() {
        let root = fixture(name);
        let got = resolve_project(&root, &AnalysisScope::default(), 4).unwrap();
        let (records, unresolved) =
            Oracle::load(&root, &registry, AnalysisScope::default()).resolve();
        assert_eq!(got.records, records, "{name}: records differ");
        assert_eq!(got.unresolved, unresolved, "{name}: unresolved differ");
        assert!(!records.is_empty(), "{name}: fixture resolves nothing");
    }
    assert!(started.elapsed().as_secs() < 10);
}
