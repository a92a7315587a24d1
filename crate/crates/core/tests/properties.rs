use std::cmp::Ordering;

use proptest::prelude::*;

use depminer_core::frontend::{ParseResult, Registry, Span, SyntaxNode};
use depminer_core::index::{build_index, TokenIndex};
use depminer_core::model::{
    canonical_order, CodeElement, DependencyRecord, Diagnostic, Granularity, LocationMarker,
    TypeSignature, UnresolvedReason, UnresolvedUsage,
};
use depminer_core::output::{emit_json, parse_json, OutputDocument};

const PY_LINES: &[&str] = &[
    "def f(a, b=1):",
    "class C(Base):",
    "x = y + 1",
    "return x",
    "import os",
    "from pkg.mod import name as alias",
    "for i in range(n):",
    "if a and not b:",
    "else:",
    "obj.attr.call(x, *args)",
    "lambda q: q * 2",
    "[v for v in items if v]",
    "global counter",
    "s = 'text # not a comment'",
    "pass",
    "",
    "# comment",
    "(unclosed = [1, 2",
    "@decorator",
    "while True: break",
    "try:",
    "except ValueError as e:",
    "with open(p) as fh:",
];

const JAVA_TOKENS: &[&str] = &[
    "class",
    "interface",
    "enum",
    "record",
    "A",
    "B",
    "f",
    "x",
    "{",
    "}",
    "(",
    ")",
    ";",
    "=",
    "new",
    "return",
    "void",
    "int",
    "String",
    "import",
    "package",
    "p.q",
    ".",
    ",",
    "public",
    "static",
    "@Ann",
    "\n",
    "\"s\"",
    "1",
    "<",
    ">",
    "extends",
    "implements",
    "this",
    "x.y()",
    "//c\n",
    "/*",
    "*/",
];

fn python_source() -> impl Strategy<Value = String> {
    prop::collection::vec((0usize..3, prop::sample::select(PY_LINES)), 0..25).prop_map(|lines| {
        lines
            .into_iter()
            .map(|(indent, text)| format!("{}{text}\n", "    ".repeat(indent)))
            .collect()
    })
}

fn java_source() -> impl Strategy<Value = String> {
    prop::collection::vec(prop::sample::select(JAVA_TOKENS), 0..80).prop_map(|toks| toks.join(" "))
}

fn check_node(node: &SyntaxNode, parent: Span) {
    if !node.span.is_empty() {
        assert!(node.span.start >= 1 && node.span.start <= node.span.end);
        assert!(parent.contains(node.span), "{node:?} escapes {parent:?}");
    }
    for child in &node.children {
        check_node(child, node.span);
    }
}

fn check_tree(tree: &ParseResult, src: &str) {
    let lines = src.lines().count() as u32;
    if lines == 0 {
        assert_eq!(tree.root.span, Span::EMPTY);
    } else {
        assert_eq!(tree.root.span, Span::new(1, lines));
    }
    for child in &tree.root.children {
        check_node(child, tree.root.span);
    }
    for d in &tree.diagnostics {
        assert!(d.line >= 1 && d.line <= lines.max(1));
    }
}

fn element() -> impl Strategy<Value = CodeElement> {
    (
        prop::sample::select(&["a.py", "b.py", "pkg/c.py"][..]),
        1u32..6,
        0u32..3,
        prop::sample::select(&["function-declaration", "call-expression", "name-usage"][..]),
        prop::option::of(prop::sample::select(&["f", "g", "x"][..])),
    )
        .prop_map(|(path, start, len, kind, id)| {
            CodeElement::new(
                LocationMarker::new(path, start, start + len),
                TypeSignature::new("python-subset", kind),
                id.map(String::from),
            )
        })
}

fn record() -> impl Strategy<Value = DependencyRecord> {
    (element(), element(), any::<bool>(), 1u32..4).prop_map(|(from, to, ambiguous, count)| {
        let mut r = DependencyRecord::new(from, to, ambiguous);
        r.count = count;
        r
    })
}

fn reason() -> impl Strategy<Value = UnresolvedReason> {
    prop::sample::select(vec![
        UnresolvedReason::NoDeclaration,
        UnresolvedReason::ExternalTarget,
        UnresolvedReason::ScopeExcludedTarget,
    ])
}

proptest! {
    #[test]
    fn python_trees_are_well_formed_and_pure(src in python_source()) {
        let registry = Registry::standard();
        let a = registry.parse_bytes("m.py", src.as_bytes()).unwrap();
        let b = registry.parse_bytes("m.py", src.as_bytes()).unwrap();
        prop_assert_eq!(&a, &b);
        check_tree(&a, &src);
    }

    #[test]
    fn java_trees_are_well_formed_and_pure(src in java_source()) {
        let registry = Registry::standard();
        let a = registry.parse_bytes("A.java", src.as_bytes()).unwrap();
        let b = registry.parse_bytes("A.java", src.as_bytes()).unwrap();
        prop_assert_eq!(&a, &b);
        check_tree(&a, &src);
    }

    #[test]
    fn canonical_order_is_total(a in record(), b in record(), c in record()) {
        prop_assert_eq!(canonical_order(&a, &b), canonical_order(&b, &a).reverse());
        prop_assert_eq!(canonical_order(&a, &b) == Ordering::Equal, a == b);
        if canonical_order(&a, &b) != Ordering::Greater && canonical_order(&b, &c) != Ordering::Greater {
            prop_assert_ne!(canonical_order(&a, &c), Ordering::Greater);
        }
    }

    #[test]
    fn json_round_trips(
        mut records in prop::collection::vec(record(), 0..12),
        unresolved in prop::collection::vec((element(), reason()), 0..6),
        lines in prop::collection::vec(1u32..50, 0..4),
    ) {
        records.sort_by(canonical_order);
        let mut doc = OutputDocument::new("proj", Granularity::Token);
        doc.dependencies = records;
        doc.unresolved = unresolved
            .into_iter()
            .map(|(element, reason)| UnresolvedUsage { element, reason })
            .collect();
        doc.diagnostics = lines.into_iter().map(|l| Diagnostic::new("a.py", l, "odd \"quote\"")).collect();
        let bytes = emit_json(&doc);
        prop_assert_eq!(&parse_json(&bytes).unwrap(), &doc);
        prop_assert_eq!(emit_json(&doc), bytes);
    }

    #[test]
    fn index_serialization_round_trips(sources in prop::collection::vec(python_source(), 0..5)) {
        let files: Vec<_> = sources
            .into_iter()
            .enumerate()
            .map(|(i, s)| (format!("d/f{i}.py"), s.into_bytes()))
            .collect();
        let (index, _) = build_index(&files, &Registry::standard());
        let bytes = index.serialize();
        let back = TokenIndex::deserialize(&bytes).unwrap();
        prop_assert_eq!(&back, &index);
        prop_assert_eq!(back.serialize(), bytes);
    }
}
