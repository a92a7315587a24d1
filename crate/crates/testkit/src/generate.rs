//! Random inputs: synthetic trees, token-level records over them, and nested
//! scope pairs.

use rand::seq::SliceRandom;
use rand::Rng;

use depminer_core::frontend::python::{self, LANGUAGE};
use depminer_core::frontend::{ParseResult, Span, SyntaxNode, FILE_KIND};
use depminer_core::model::{CodeElement, DependencyRecord};
use depminer_core::scope::{AnalysisScope, LineExclusion};

const NAMES: &[&str] = &["a", "b", "c", "run", "load", "Item", "x", "y"];

fn block(rng: &mut impl Rng, line: &mut u32, depth: u32) -> Vec<SyntaxNode> {
    let n = rng.gen_range(1..=4);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let name = *NAMES.choose(rng).expect("names");
        let roll = rng.gen_range(0..10);
        if depth < 3 && roll < 3 {
            let kind = if roll == 0 {
                python::CLASS
            } else {
                python::FUNCTION
            };
            let start = *line;
            *line += 1;
            let children = block(rng, line, depth + 1);
            let end = *line - 1;
            out.push(SyntaxNode::named(kind, Span::new(start, end), name).with_children(children));
        } else {
            let kind = match roll {
                3..=5 => python::VARIABLE,
                6 => python::CALL,
                _ => python::NAME_USAGE,
            };
            out.push(SyntaxNode::named(kind, Span::line(*line), name));
            *line += 1;
        }
    }
    out
}

/// A well-formed python-subset tree with nested functions and classes.
pub fn synthetic_tree(rng: &mut impl Rng, path: &str) -> ParseResult {
    let mut line = 1;
    let children = block(rng, &mut line, 0);
    let root = SyntaxNode::new(FILE_KIND, Span::new(1, line - 1)).with_children(children);
    ParseResult {
        path: path.to_string(),
        language: LANGUAGE,
        root,
        diagnostics: Vec::new(),
    }
}

fn elements(tree: &ParseResult, pick: impl Fn(&SyntaxNode) -> bool) -> Vec<CodeElement> {
    let mut out = Vec::new();
    tree.root.walk(&mut |n| {
        if pick(n) {
            out.push(tree.element(n));
        }
    });
    out
}

/// `count` records from random usages to random declarations across
/// `trees`. Trees without usages or declarations are skipped.
pub fn random_records(
    rng: &mut impl Rng,
    trees: &[ParseResult],
    count: usize,
) -> Vec<DependencyRecord> {
    let d = &python::DESCRIPTOR;
    let usages: Vec<CodeElement> = trees
        .iter()
        .flat_map(|t| elements(t, |n| d.is_usage(n.kind)))
        .collect();
    let decls: Vec<CodeElement> = trees
        .iter()
        .flat_map(|t| elements(t, |n| d.is_declaration(n.kind)))
        .collect();
    assert!(
        !usages.is_empty() && !decls.is_empty(),
        "trees need usages and declarations"
    );
    (0..count)
        .map(|_| {
            let from = usages.choose(rng).expect("usages").clone();
            let to = decls.choose(rng).expect("declarations").clone();
            let mut r = DependencyRecord::new(from, to, rng.gen_bool(0.2));
            r.count = rng.gen_range(1..=3);
            r
        })
        .collect()
}

/// A scope pair `(wide, narrow)` where `narrow` has every exclude of `wide`
/// plus more. `files` lists project paths with their line counts.
pub fn scope_pair(rng: &mut impl Rng, files: &[(String, u32)]) -> (AnalysisScope, AnalysisScope) {
    let mut dirs: Vec<String> = files
        .iter()
        .filter_map(|(p, _)| p.rsplit_once('/').map(|(d, _)| format!("{d}/**")))
        .collect();
    dirs.sort();
    dirs.dedup();
    let mut globs: Vec<String> = files.iter().map(|(p, _)| p.clone()).collect();
    globs.extend(dirs);
    globs.extend(["**/*.py", "**/*.java", "*.py", "*.java"].map(String::from));

    let random_exclusion =
        |rng: &mut dyn rand::RngCore| -> (Option<String>, Option<LineExclusion>) {
            if rng.gen_bool(0.4) {
                (globs.choose(rng).cloned(), None)
            } else {
                let (path, lines) = files.choose(rng).expect("files").clone();
                let lines = lines.max(1);
                let start = rng.gen_range(1..=lines);
                let end = rng.gen_range(start..=lines);
                (
                    None,
                    Some(LineExclusion {
                        path,
                        start_line: start,
                        end_line: end,
                    }),
                )
            }
        };

    let mut exclude = Vec::new();
    let mut lines = Vec::new();
    for _ in 0..rng.gen_range(0..=1) {
        let (g, l) = random_exclusion(rng);
        exclude.extend(g);
        lines.extend(l);
    }
    let wide =
        AnalysisScope::new(vec!["**".into()], exclude.clone(), lines.clone()).expect("valid scope");
    for _ in 0..rng.gen_range(1..=2) {
        let (g, l) = random_exclusion(rng);
        exclude.extend(g);
        lines.extend(l);
    }
    let narrow = AnalysisScope::new(vec!["**".into()], exclude, lines).expect("valid scope");
    (wide, narrow)
}
