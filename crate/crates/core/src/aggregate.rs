//! Granularity lifting: maps token-level records onto enclosing functions,
//! classes, files or directories and merges them into counted edges.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::frontend::{
    enclosing_unit_of, FrontEndDescriptor, FrontendError, ParseResult, Registry, DIRECTORY_KIND,
};
use crate::model::{
    endpoint_order, CodeElement, DependencyRecord, Granularity, LocationMarker, TypeSignature,
};
use crate::project::Project;

/// A dependency between two elements at some granularity.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AggregatedEdge {
    pub from: CodeElement,
    pub to: CodeElement,
    pub count: u32,
    pub ambiguous_count: u32,
}

impl AggregatedEdge {
    pub fn to_record(&self) -> DependencyRecord {
        DependencyRecord {
            from: self.from.clone(),
            to: self.to.clone(),
            count: self.count,
            ambiguous: self.ambiguous_count > 0,
        }
    }
}

impl Ord for AggregatedEdge {
    fn cmp(&self, other: &Self) -> Ordering {
        endpoint_order((&self.from, &self.to), (&other.from, &other.to))
            .then(self.count.cmp(&other.count))
            .then(self.ambiguous_count.cmp(&other.ambiguous_count))
    }
}

impl PartialOrd for AggregatedEdge {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Error)]
pub enum LiftError {
    #[error("no parsed tree for `{0}`")]
    MissingTree(String),
    #[error("no front-end for language `{0}`")]
    UnknownLanguage(String),
    #[error(transparent)]
    Frontend(#[from] FrontendError),
}

/// Parsed trees and descriptors for the files records point into.
pub trait TreeAccess {
    fn tree(&self, path: &str) -> Option<Arc<ParseResult>>;
    fn descriptor(&self, language: &str) -> Option<&'static FrontEndDescriptor>;
}

impl TreeAccess for Project<'_> {
    fn tree(&self, path: &str) -> Option<Arc<ParseResult>> {
        self.tree_for(path)
    }

    fn descriptor(&self, language: &str) -> Option<&'static FrontEndDescriptor> {
        self.registry().descriptor(language)
    }
}

/// An in-memory set of trees, keyed by path.
pub struct TreeMap<'r> {
    registry: &'r Registry,
    trees: BTreeMap<String, Arc<ParseResult>>,
}

impl<'r> TreeMap<'r> {
    pub fn new(registry: &'r Registry) -> Self {
        Self {
            registry,
            trees: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, tree: ParseResult) {
        self.trees.insert(tree.path.clone(), Arc::new(tree));
    }
}

impl TreeAccess for TreeMap<'_> {
    fn tree(&self, path: &str) -> Option<Arc<ParseResult>> {
        self.trees.get(path).cloned()
    }

    fn descriptor(&self, language: &str) -> Option<&'static FrontEndDescriptor> {
        self.registry.descriptor(language)
    }
}

/// Edges plus the record count dropped as self-edges.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lifted {
    pub edges: Vec<AggregatedEdge>,
    pub suppressed: u64,
}

/// The directory element of a file path; the root is `"."`.
pub fn directory_element(path: &str, language: &str) -> CodeElement {
    let dir = match path.rfind('/') {
        Some(i) => &path[..i],
        None => ".",
    };
    CodeElement::new(
        LocationMarker::empty(dir),
        TypeSignature::new(language, DIRECTORY_KIND),
        None,
    )
}

/// Maps `element` to its container at `granularity`.
pub fn lift_element(
    element: &CodeElement,
    granularity: Granularity,
    trees: &impl TreeAccess,
) -> Result<CodeElement, LiftError> {
    match granularity {
        Granularity::Token => Ok(element.clone()),
        Granularity::Directory if element.kind() == DIRECTORY_KIND => Ok(element.clone()),
        Granularity::Directory => Ok(directory_element(element.path(), element.language())),
        g => {
            let tree = trees
                .tree(element.path())
                .ok_or_else(|| LiftError::MissingTree(element.path().to_string()))?;
            if g == Granularity::File {
                return Ok(tree.file_element());
            }
            let descriptor = trees
                .descriptor(element.language())
                .ok_or_else(|| LiftError::UnknownLanguage(element.language().to_string()))?;
            Ok(enclosing_unit_of(&tree, element, g, descriptor)?)
        }
    }
}

/// Lifts token-level records to `granularity`.
///
/// Records whose endpoints coincide after lifting are dropped and counted in
/// `suppressed`; the rest are merged by `(from, to)` and sorted.
pub fn lift(
    records: &[DependencyRecord],
    granularity: Granularity,
    trees: &impl TreeAccess,
) -> Result<Lifted, LiftError> {
    let edges: Vec<AggregatedEdge> = records
        .iter()
        .map(|r| AggregatedEdge {
            from: r.from.clone(),
            to: r.to.clone(),
            count: r.count,
            ambiguous_count: if r.ambiguous { r.count } else { 0 },
        })
        .collect();
    lift_edges(&edges, granularity, trees)
}

/// Like [`lift`], for edges that may already be aggregated.
pub fn lift_edges(
    edges: &[AggregatedEdge],
    granularity: Granularity,
    trees: &impl TreeAccess,
) -> Result<Lifted, LiftError> {
    // Many records share endpoints, so lifting is memoized per element.
    let mut lifted: BTreeMap<&CodeElement, CodeElement> = BTreeMap::new();
    let mut merged: BTreeMap<(CodeElement, CodeElement), (u32, u32)> = BTreeMap::new();
    let mut suppressed = 0u64;
    for e in edges {
        for el in [&e.from, &e.to] {
            if !lifted.contains_key(el) {
                lifted.insert(el, lift_element(el, granularity, trees)?);
            }
        }
        let from = lifted[&e.from].clone();
        let to = lifted[&e.to].clone();
        if from == to {
            suppressed += u64::from(e.count);
            continue;
        }
        let slot = merged.entry((from, to)).or_default();
        slot.0 += e.count;
        slot.1 += e.ambiguous_count;
    }
    let mut edges: Vec<AggregatedEdge> = merged
        .into_iter()
        .map(|((from, to), (count, ambiguous_count))| AggregatedEdge {
            from,
            to,
            count,
            ambiguous_count,
        })
        .collect();
    edges.sort();
    Ok(Lifted { edges, suppressed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{FrontEnd, PythonFrontEnd};

    fn trees<'r>(files: &[(&str, &str)], reg: &'r Registry) -> TreeMap<'r> {
        let mut map = TreeMap::new(reg);
        for (p, c) in files {
            map.insert(PythonFrontEnd.parse(p, c));
        }
        map
    }

    fn el(path: &str, line: u32, kind: &str, id: &str) -> CodeElement {
        CodeElement::new(
            LocationMarker::new(path, line, line),
            TypeSignature::new("python-subset", kind),
            Some(id.to_string()),
        )
    }

    #[test]
    fn file_edge_between_two_files() {
        let reg = Registry::standard();
        let t = trees(
            &[
                ("src/a.py", "from b import g\ng()\n"),
                ("src/b.py", "def g():\n    pass\n"),
            ],
            &reg,
        );
        let r = DependencyRecord::new(
            el("src/a.py", 2, "call-expression", "g"),
            el("src/b.py", 1, "function-declaration", "g"),
            false,
        );
        let out = lift(&[r], Granularity::File, &t).unwrap();
        assert_eq!(out.edges.len(), 1);
        assert_eq!(out.edges[0].from.path(), "src/a.py");
        assert_eq!(out.edges[0].from.kind(), "file");
        assert_eq!(out.edges[0].to.path(), "src/b.py");
        assert_eq!(out.edges[0].count, 1);
        assert_eq!(out.suppressed, 0);
    }

    #[test]
    fn same_function_is_a_self_edge() {
        let reg = Registry::standard();
        let t = trees(&[("m.py", "def f():\n    x = 1\n    return x\n")], &reg);
        let r = DependencyRecord::new(
            el("m.py", 3, "name-usage", "x"),
            el("m.py", 2, "variable-declaration", "x"),
            false,
        );
        let out = lift(&[r], Granularity::Function, &t).unwrap();
        assert!(out.edges.is_empty());
        assert_eq!(out.suppressed, 1);
    }

    #[test]
    fn records_between_the_same_functions_merge() {
        let reg = Registry::standard();
        let src = "def g():\n    pass\n\ndef f():\n    g()\n    g()\n";
        let t = trees(&[("m.py", src)], &reg);
        let decl = CodeElement::new(
            LocationMarker::new("m.py", 1, 2),
            TypeSignature::new("python-subset", "function-declaration"),
            Some("g".into()),
        );
        let a = DependencyRecord::new(el("m.py", 5, "call-expression", "g"), decl.clone(), true);
        let b = DependencyRecord::new(el("m.py", 6, "call-expression", "g"), decl, false);
        let out = lift(&[a, b], Granularity::Function, &t).unwrap();
        assert_eq!(out.edges.len(), 1);
        assert_eq!(out.edges[0].count, 2);
        assert_eq!(out.edges[0].ambiguous_count, 1);
        assert_eq!(out.edges[0].from.identifier.as_deref(), Some("f"));
        assert!(out.edges[0].to_record().ambiguous);
    }

    #[test]
    fn directories_use_the_parent_or_dot() {
        assert_eq!(directory_element("a.py", "python-subset").path(), ".");
        assert_eq!(directory_element("x/y/a.py", "python-subset").path(), "x/y");
        assert!(directory_element("a.py", "python-subset")
            .location
            .is_empty());
    }

    #[test]
    fn lifting_twice_is_the_identity() {
        let reg = Registry::standard();
        let t = trees(
            &[
                ("a.py", "import b\nb.f()\n"),
                ("b.py", "def f():\n    pass\n"),
            ],
            &reg,
        );
        let r = DependencyRecord::new(
            el("a.py", 2, "attribute-usage", "f"),
            el("b.py", 1, "function-declaration", "f"),
            false,
        );
        for g in [
            Granularity::Function,
            Granularity::Class,
            Granularity::File,
            Granularity::Directory,
        ] {
            let once = lift(std::slice::from_ref(&r), g, &t).unwrap();
            let twice = lift_edges(&once.edges, g, &t).unwrap();
            assert_eq!(once.edges, twice.edges, "{g}");
        }
    }

    #[test]
    fn missing_tree_is_an_error() {
        let reg = Registry::standard();
        let t = TreeMap::new(&reg);
        let r = DependencyRecord::new(
            el("a.py", 1, "name-usage", "x"),
            el("b.py", 1, "variable-declaration", "x"),
            false,
        );
        assert!(matches!(
            lift(&[r], Granularity::File, &t),
            Err(LiftError::MissingTree(_))
        ));
    }
}
