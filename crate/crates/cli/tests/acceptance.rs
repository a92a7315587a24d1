//! One pass/fail line per acceptance criterion, run end to end over the
//! fixture corpus.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::Instant;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use common::{read, run_in, stderr};
use depminer_core::aggregate::{lift, lift_element, TreeMap};
use depminer_core::frontend::Registry;
use depminer_core::index::{build_index, IndexError, TokenIndex};
use depminer_core::model::{CodeElement, Granularity};
use depminer_core::output::parse_json;
use depminer_core::pipeline::resolve_project;
use depminer_core::project::Project;
use depminer_core::resolver::Resolution;
use depminer_core::scope::{AnalysisScope, LineExclusion};
use depminer_testkit::generate::{random_records, scope_pair, synthetic_tree};
use depminer_testkit::oracle::{index_tuples, Oracle};
use depminer_testkit::{
    copy_fixture, fixture, fixtures, fixtures_dir, golden, JAVA_FIXTURES, PYTHON_FIXTURES,
};

type Check = Result<(), String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn sources(name: &str) -> Vec<(String, Vec<u8>)> {
    let registry = Registry::standard();
    let project = Project::open(&fixture(name), &registry).unwrap();
    (0..project.files().len())
        .filter_map(|o| {
            Some((
                project.files()[o].path.clone(),
                project.contents(o)?.to_vec(),
            ))
        })
        .collect()
}

fn mine(cwd: &Path, args: &[&str]) -> Result<String, String> {
    let out = run_in(cwd, args);
    ensure(out.status.success(), || {
        format!("{args:?} failed: {}", stderr(&out))
    })?;
    Ok(stderr(&out))
}

fn oracle_equivalence() -> Check {
    let started = Instant::now();
    let registry = Registry::standard();
    ensure(
        PYTHON_FIXTURES.len() >= 3 && JAVA_FIXTURES.len() >= 3,
        || "too few fixtures".into(),
    )?;
    for name in fixtures() {
        let root = fixture(name);
        let files = Project::open(&root, &registry).unwrap().files().len();
        ensure((5..=30).contains(&files), || {
            format!("{name} has {files} files")
        })?;
        let got =
            resolve_project(&root, &AnalysisScope::default(), 4).map_err(|e| e.to_string())?;
        let (records, unresolved) =
            Oracle::load(&root, &registry, AnalysisScope::default()).resolve();
        ensure(got.records == records, || format!("{name}: records differ"))?;
        ensure(got.unresolved == unresolved, || {
            format!("{name}: unresolved differ")
        })?;
    }
    let secs = started.elapsed().as_secs_f64();
    ensure(secs < 10.0, || format!("took {secs:.1} s"))
}

fn index_completeness() -> Check {
    let registry = Registry::standard();
    let mut rng = StdRng::seed_from_u64(11);
    for name in fixtures() {
        let mut files = sources(name);
        let index = build_index(&files, &registry).0;
        let expected =
            Oracle::load(&fixture(name), &registry, AnalysisScope::default()).index_entries();
        ensure(index_tuples(&index) == expected, || {
            format!("{name}: index differs from linear scan")
        })?;
        for _ in 0..3 {
            files.shuffle(&mut rng);
            let shuffled = build_index(&files, &registry).0;
            ensure(shuffled.serialize() == index.serialize(), || {
                format!("{name}: order-dependent index")
            })?;
        }
    }
    Ok(())
}

fn determinism() -> Check {
    let tmp = tempfile::tempdir().unwrap();
    let json = tmp.path().join("o.json");
    let dot = tmp.path().join("o.dot");
    let (json_s, dot_s) = (json.to_str().unwrap(), dot.to_str().unwrap());
    for name in fixtures() {
        let mut seen: Option<(Vec<u8>, Vec<u8>, Vec<u8>)> = None;
        for _ in 0..5 {
            for jobs in ["1", "8"] {
                mine(
                    &fixtures_dir(),
                    &["mine", name, "--out", json_s, "--jobs", jobs],
                )?;
                let token = read(&json);
                mine(
                    &fixtures_dir(),
                    &[
                        "mine",
                        name,
                        "--out",
                        json_s,
                        "--emit-dot",
                        dot_s,
                        "--granularity",
                        "file",
                        "--jobs",
                        jobs,
                    ],
                )?;
                let run = (token, read(&json), read(&dot));
                match &seen {
                    Some(first) => ensure(*first == run, || {
                        format!("{name}: --jobs {jobs} output differs")
                    })?,
                    None => seen = Some(run),
                }
            }
        }
    }
    Ok(())
}

fn aggregation_laws() -> Check {
    let registry = Registry::standard();
    let mut total = 0;
    for seed in 0..8 {
        let mut rng = StdRng::seed_from_u64(seed);
        let list: Vec<_> = ["a.py", "p/b.py", "p/c.py", "p/q/d.py"]
            .iter()
            .map(|p| synthetic_tree(&mut rng, p))
            .collect();
        let mut trees = TreeMap::new(&registry);
        for t in &list {
            trees.insert(t.clone());
        }
        let n = rng.gen_range(70..100);
        let mut records = random_records(&mut rng, &list, n);
        for r in &mut records {
            r.count = 1;
        }
        total += records.len();
        for g in Granularity::ALL {
            let lifted = lift(&records, g, &trees).map_err(|e| e.to_string())?;
            let sum: u64 = lifted.edges.iter().map(|e| u64::from(e.count)).sum();
            ensure(sum + lifted.suppressed == records.len() as u64, || {
                format!("seed {seed} {g}: counts")
            })?;
            for e in &lifted.edges {
                let witnessed = records.iter().any(|r| {
                    lift_element(&r.from, g, &trees).unwrap() == e.from
                        && lift_element(&r.to, g, &trees).unwrap() == e.to
                });
                ensure(witnessed, || {
                    format!("seed {seed} {g}: edge without witness")
                })?;
            }
        }
    }
    ensure(total >= 500, || format!("only {total} records"))
}

fn index_round_trip() -> Check {
    let registry = Registry::standard();
    for name in fixtures() {
        let bytes = build_index(&sources(name), &registry).0.serialize();
        let back = TokenIndex::deserialize(&bytes).map_err(|e| e.to_string())?;
        ensure(back.serialize() == bytes, || {
            format!("{name}: round trip differs")
        })?;
        let mut bad = bytes.clone();
        bad[..4].copy_from_slice(b"XXXX");
        ensure(
            TokenIndex::deserialize(&bad) == Err(IndexError::NotAnIndex),
            || format!("{name}: bad magic accepted"),
        )?;
        for cut in [9, bytes.len() / 2, bytes.len() - 1] {
            let truncated = TokenIndex::deserialize(&bytes[..cut]);
            ensure(matches!(truncated, Err(IndexError::Corrupt(_))), || {
                format!("{name}: cut at {cut} gave {truncated:?}")
            })?;
        }
    }
    Ok(())
}

fn allowed(scope: &AnalysisScope, e: &CodeElement) -> bool {
    scope.includes(e.path(), Some(&e.location))
}

fn scoped(name: &str, scope: &AnalysisScope) -> Result<Resolution, String> {
    let res = resolve_project(&fixture(name), scope, 4).map_err(|e| e.to_string())?;
    let clean = res
        .records
        .iter()
        .all(|r| allowed(scope, &r.from) && allowed(scope, &r.to))
        && res.unresolved.iter().all(|u| allowed(scope, &u.element));
    ensure(clean, || format!("{name}: output references excluded code"))?;
    Ok(res)
}

fn scope_enforcement() -> Check {
    let range = |path: &str, start, end| LineExclusion {
        path: path.into(),
        start_line: start,
        end_line: end,
    };
    let adversarial = [
        ("py_shop", vec!["shop/util/**".to_string()], vec![]),
        (
            "py_graphs",
            vec!["**/cycle_*.py".to_string()],
            vec![range("graphs/search.py", 3, 8)],
        ),
        (
            "java_bank",
            vec!["src/com/bank/util/**".to_string()],
            vec![],
        ),
        ("java_events", vec!["**/*.java".to_string()], vec![]),
        ("java_shapes", vec![], vec![range("App.java", 8, 10)]),
    ];
    for (name, exclude, lines) in adversarial {
        scoped(
            name,
            &AnalysisScope::new(vec!["**".into()], exclude, lines).map_err(|e| e.to_string())?,
        )?;
    }
    let registry = Registry::standard();
    let names: Vec<_> = fixtures().collect();
    let mut rng = StdRng::seed_from_u64(2024);
    for i in 0..20 {
        let name = names[i % names.len()];
        let project = Project::open(&fixture(name), &registry).unwrap();
        let files: Vec<_> = (0..project.files().len())
            .filter_map(|o| project.tree(o).map(|t| (t.path.clone(), t.line_count())))
            .collect();
        let (wide, narrow) = scope_pair(&mut rng, &files);
        let pairs = |r: &Resolution| -> BTreeSet<_> {
            r.records
                .iter()
                .map(|r| (r.from.clone(), r.to.clone()))
                .collect()
        };
        let wide = pairs(&scoped(name, &wide)?);
        let narrow = pairs(&scoped(name, &narrow)?);
        ensure(narrow.is_subset(&wide), || {
            format!("pair {i} on {name} is not monotonic")
        })?;
    }
    Ok(())
}

fn batch_equals_singles() -> Check {
    let tmp = tempfile::tempdir().unwrap();
    let mut entries = Vec::new();
    for name in fixtures() {
        entries.push(serde_json::json!({"root": fixture(name), "out": format!("out/{name}.json")}));
    }
    entries.push(serde_json::json!({"root": "missing-root", "out": "out/missing.json"}));
    let manifest = tmp.path().join("manifest.json");
    std::fs::write(
        &manifest,
        serde_json::json!({ "entries": entries }).to_string(),
    )
    .unwrap();
    let batch = run_in(tmp.path(), &["batch", manifest.to_str().unwrap()]);
    ensure(batch.status.code() == Some(2), || {
        format!("batch exited {:?}", batch.status.code())
    })?;
    ensure(!tmp.path().join("out/missing.json").exists(), || {
        "bad entry wrote output".into()
    })?;
    let single = tmp.path().join("single.json");
    for name in fixtures() {
        let root = fixture(name);
        mine(
            tmp.path(),
            &[
                "mine",
                root.to_str().unwrap(),
                "--out",
                single.to_str().unwrap(),
            ],
        )?;
        let produced = tmp.path().join(format!("out/{name}.json"));
        ensure(
            produced.is_file() && read(&produced) == read(&single),
            || format!("{name}: batch differs"),
        )?;
    }
    Ok(())
}

fn golden_outputs() -> Check {
    let started = Instant::now();
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o.json");
    for name in fixtures() {
        for g in Granularity::ALL {
            mine(
                &fixtures_dir(),
                &[
                    "mine",
                    name,
                    "--out",
                    out.to_str().unwrap(),
                    "--granularity",
                    g.as_str(),
                ],
            )?;
            let expected =
                std::fs::read(golden(name, g)).map_err(|e| format!("{name}/{g}: {e}"))?;
            ensure(read(&out) == expected, || {
                format!("{name}/{g} differs from golden")
            })?;
        }
    }
    let secs = started.elapsed().as_secs_f64();
    ensure(secs < 30.0, || format!("took {secs:.1} s"))
}

fn cache_correctness() -> Check {
    let tmp = tempfile::tempdir().unwrap();
    let project = tmp.path().join("proj");
    let cache = tmp.path().join("cache");
    copy_fixture("py_graphs", &project);
    let out = tmp.path().join("o.json");
    let args = [
        "mine",
        project.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--index-cache",
        cache.to_str().unwrap(),
    ];
    ensure(mine(tmp.path(), &args)?.contains("index built"), || {
        "first run did not build".into()
    })?;
    let first = read(&out);
    ensure(mine(tmp.path(), &args)?.contains("index cached"), || {
        "cache not reused".into()
    })?;
    ensure(read(&out) == first, || "cached run differs".into())?;

    let touched = project.join("graphs/paths.py");
    let mut text = std::fs::read_to_string(&touched).unwrap();
    text.push_str("\n\ndef longest(graph, a, b):\n    return shortest(graph, a, b)\n");
    std::fs::write(&touched, text).unwrap();
    let summary = mine(tmp.path(), &args)?;
    ensure(summary.contains("index updated (1 reindexed)"), || {
        format!("unexpected summary: {summary}")
    })?;

    let registry = Registry::standard();
    let oracle = Oracle::load(&project, &registry, AnalysisScope::default());
    let (records, unresolved) = oracle.resolve();
    let mut trees = TreeMap::new(&registry);
    for t in oracle.trees() {
        trees.insert(t.clone());
    }
    let expected: Vec<_> = lift(&records, Granularity::Token, &trees)
        .map_err(|e| e.to_string())?
        .edges
        .iter()
        .map(|e| e.to_record())
        .collect();
    let doc = parse_json(&read(&out)).map_err(|e| e.to_string())?;
    ensure(doc.dependencies == expected, || {
        "updated records differ from oracle".into()
    })?;
    ensure(doc.unresolved == unresolved, || {
        "updated unresolved differ from oracle".into()
    })?;
    let added = doc.dependencies.iter().any(|r| {
        r.from.path() == "graphs/paths.py"
            && r.from.location.start_line > 17
            && r.to.identifier.as_deref() == Some("shortest")
    });
    ensure(added, || "new call was not picked up".into())
}

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 9] = [
        ("oracle equivalence", oracle_equivalence),
        ("index completeness", index_completeness),
        ("determinism", determinism),
        ("aggregation laws", aggregation_laws),
        ("binary index round-trip", index_round_trip),
        ("scope enforcement", scope_enforcement),
        ("batch equals singles", batch_equals_singles),
        ("golden outputs", golden_outputs),
        ("cache correctness", cache_correctness),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome =
            catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(()) => println!("criterion {} ({name}): PASS", i + 1),
            Err(why) => {
                println!("criterion {} ({name}): FAIL: {why}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
