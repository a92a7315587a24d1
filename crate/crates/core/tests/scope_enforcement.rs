use std::collections::BTreeSet;

use rand::rngs::StdRng;
use rand::SeedableRng;

use depminer_core::frontend::Registry;
use depminer_core::model::CodeElement;
use depminer_core::pipeline::resolve_project;
use depminer_core::project::Project;
use depminer_core::resolver::Resolution;
use depminer_core::scope::{AnalysisScope, LineExclusion};
use depminer_testkit::generate::scope_pair;
use depminer_testkit::oracle::Oracle;
use depminer_testkit::{fixture, fixtures};

fn resolve(name: &str, scope: &AnalysisScope) -> Resolution {
    let root = fixture(name);
    let got = resolve_project(&root, scope, 4).unwrap();
    let registry = Registry::standard();
    let (records, unresolved) = Oracle::load(&root, &registry, scope.clone()).resolve();
    assert_eq!(got.records, records, "{name}: records differ from oracle");
    assert_eq!(
        got.unresolved, unresolved,
        "{name}: unresolved differ from oracle"
    );
    got
}

fn allowed(scope: &AnalysisScope, e: &CodeElement) -> bool {
    scope.includes_path(e.path())
        && !scope
            .exclude_lines()
            .iter()
            .any(|x| x.path == e.path() && e.location.intersects_lines(x.start_line, x.end_line))
}

fn assert_respects(name: &str, scope: &AnalysisScope, res: &Resolution) {
    for r in &res.records {
        assert!(
            allowed(scope, &r.from) && allowed(scope, &r.to),
            "{name}: {r:?} escapes the scope"
        );
    }
    for u in &res.unresolved {
        assert!(
            allowed(scope, &u.element),
            "{name}: {u:?} escapes the scope"
        );
    }
}

fn lines(path: &str, start: u32, end: u32) -> LineExclusion {
    LineExclusion {
        path: path.into(),
        start_line: start,
        end_line: end,
    }
}

#[test]
fn adversarial_scopes_are_enforced() {
    let cases: Vec<(&str, Vec<&str>, Vec<LineExclusion>)> = vec![
        ("py_shop", vec!["shop/util/**"], vec![]),
        (
            "py_shop",
            vec!["**/test_*.py"],
            vec![lines("shop/cart.py", 5, 12)],
        ),
        (
            "py_graphs",
            vec!["graphs/cycle_*.py"],
            vec![lines("graphs/search.py", 3, 8)],
        ),
        ("py_scripts", vec!["lib/**"], vec![lines("report.py", 2, 4)]),
        ("java_bank", vec!["src/com/bank/util/**"], vec![]),
        (
            "java_bank",
            vec![],
            vec![lines("src/com/bank/Bank.java", 11, 16)],
        ),
        ("java_shapes", vec!["**/*.java"], vec![]),
        (
            "java_shapes",
            vec!["shapes/C*.java"],
            vec![lines("App.java", 8, 10)],
        ),
        (
            "java_events",
            vec!["**/app/**"],
            vec![lines("src/main/java/events/Bus.java", 10, 20)],
        ),
    ];
    for (name, exclude, excluded_lines) in cases {
        let scope = AnalysisScope::new(
            vec!["**".into()],
            exclude.iter().map(|s| s.to_string()).collect(),
            excluded_lines,
        )
        .unwrap();
        let res = resolve(name, &scope);
        assert_respects(name, &scope, &res);
        let full = resolve(name, &AnalysisScope::default());
        assert!(
            res.records.len() < full.records.len(),
            "{name}: scope {exclude:?} excluded nothing"
        );
    }
}

fn pairs(res: &Resolution) -> BTreeSet<(CodeElement, CodeElement)> {
    res.records
        .iter()
        .map(|r| (r.from.clone(), r.to.clone()))
        .collect()
}

#[test]
fn removing_excludes_never_loses_records() {
    let registry = Registry::standard();
    let names: Vec<_> = fixtures().collect();
    let mut rng = StdRng::seed_from_u64(2024);
    let mut shrunk = 0;
    for i in 0..20 {
        let name = names[i % names.len()];
        let project = Project::open(&fixture(name), &registry).unwrap();
        let files: Vec<(String, u32)> = (0..project.files().len())
            .filter_map(|o| {
                let tree = project.tree(o)?;
                Some((tree.path.clone(), tree.line_count()))
            })
            .collect();
        let (wide, narrow) = scope_pair(&mut rng, &files);
        let wide_res = resolve(name, &wide);
        let narrow_res = resolve(name, &narrow);
        assert_respects(name, &narrow, &narrow_res);
        let missing: Vec<_> = pairs(&narrow_res)
            .difference(&pairs(&wide_res))
            .cloned()
            .collect();
        assert!(
            missing.is_empty(),
            "pair {i} on {name}: narrow-only records {missing:?}"
        );
        if pairs(&narrow_res).len() < pairs(&wide_res).len() {
            shrunk += 1;
        }
    }
    assert!(
        shrunk >= 5,
        "only {shrunk} pairs actually narrowed the result"
    );
}
