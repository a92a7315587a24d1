//! Pluggable language front-ends.
//!
//! A front-end turns one source file into a kind-labelled [`SyntaxNode`] tree
//! and describes, through its [`FrontEndDescriptor`], how those kinds behave:
//! which are declarations, which are usages, which open lexical scopes and
//! which count as functions or classes when lifting dependencies.
//!
//! The resolver never looks at language syntax directly; everything it needs
//! is carried by the tree and the descriptor.

use std::collections::BTreeMap;
use std::path::Path;

use thiserror::Error;

use crate::model::{CodeElement, Diagnostic, Granularity, LocationMarker, TypeSignature};

pub mod java;
pub mod python;

pub use java::JavaFrontEnd;
pub use python::PythonFrontEnd;

/// Kind of the root node of every tree.
pub const FILE_KIND: &str = "file";
/// Kind of the synthetic element standing for code outside any function/class.
pub const TOPLEVEL_KIND: &str = "module-toplevel";
/// Kind of the synthetic element used at directory granularity.
pub const DIRECTORY_KIND: &str = "directory";
/// Display name of the synthetic top-level element.
pub const TOPLEVEL_LABEL: &str = "<toplevel>";

/// Inclusive 1-based line range of a node. `(1, 0)` is the empty range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Span {
    pub start: u32,
    pub end: u32,
}

impl Span {
    pub const EMPTY: Span = Span { start: 1, end: 0 };

    pub fn new(start: u32, end: u32) -> Self {
        Self { start, end }
    }

    pub fn line(line: u32) -> Self {
        Self::new(line, line)
    }

    pub fn is_empty(self) -> bool {
        self.end < self.start
    }

    pub fn contains(self, inner: Span) -> bool {
        !self.is_empty() && !inner.is_empty() && self.start <= inner.start && inner.end <= self.end
    }

    pub fn contains_line(self, line: u32) -> bool {
        self.start <= line && line <= self.end
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntaxNode {
    pub kind: &'static str,
    pub span: Span,
    /// Declared or referenced simple name.
    pub identifier: Option<String>,
    /// Extra name context: the module of an import, the receiver chain of a
    /// member access, or the name of a package declaration.
    pub qualifier: Option<String>,
    pub children: Vec<SyntaxNode>,
}

impl SyntaxNode {
    pub fn new(kind: &'static str, span: Span) -> Self {
        Self {
            kind,
            span,
            identifier: None,
            qualifier: None,
            children: Vec::new(),
        }
    }

    pub fn named(kind: &'static str, span: Span, identifier: impl Into<String>) -> Self {
        Self {
            identifier: Some(identifier.into()),
            ..Self::new(kind, span)
        }
    }

    pub fn with_qualifier(mut self, qualifier: Option<String>) -> Self {
        self.qualifier = qualifier;
        self
    }

    pub fn with_children(mut self, children: Vec<SyntaxNode>) -> Self {
        self.children = children;
        self
    }

    /// Pre-order traversal.
    pub fn walk<'a>(&'a self, visit: &mut impl FnMut(&'a SyntaxNode)) {
        visit(self);
        for child in &self.children {
            child.walk(visit);
        }
    }

    pub fn node_count(&self) -> usize {
        let mut n = 0;
        self.walk(&mut |_| n += 1);
        n
    }

    /// Stable-sorts children by start line, recursively.
    pub(crate) fn normalize(&mut self) {
        self.children.sort_by_key(|c| c.span.start);
        for child in &mut self.children {
            child.normalize();
        }
    }
}

/// A parsed file. Parsing never fails; problems land in `diagnostics`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseResult {
    pub path: String,
    pub language: &'static str,
    pub root: SyntaxNode,
    pub diagnostics: Vec<Diagnostic>,
}

impl ParseResult {
    pub fn line_count(&self) -> u32 {
        if self.root.span.is_empty() {
            0
        } else {
            self.root.span.end
        }
    }

    pub fn location(&self, span: Span) -> LocationMarker {
        LocationMarker::new(self.path.clone(), span.start, span.end)
    }

    pub fn element(&self, node: &SyntaxNode) -> CodeElement {
        CodeElement::new(
            self.location(node.span),
            TypeSignature::new(self.language, node.kind),
            node.identifier.clone(),
        )
    }

    pub fn file_element(&self) -> CodeElement {
        self.element(&self.root)
    }

    pub fn toplevel_element(&self) -> CodeElement {
        CodeElement::new(
            self.location(self.root.span),
            TypeSignature::new(self.language, TOPLEVEL_KIND),
            None,
        )
    }
}

/// Line count and root span for `content`, following `str::lines`.
pub(crate) fn file_span(content: &str) -> Span {
    match content.lines().count() {
        0 => Span::EMPTY,
        n => Span::new(1, n as u32),
    }
}

/// Classification of a node kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeClass {
    Declaration,
    Usage,
    Other,
}

/// Static description of a front-end's vocabulary and scoping rules.
#[derive(Debug)]
pub struct FrontEndDescriptor {
    pub language: &'static str,
    pub extensions: &'static [&'static str],
    pub declaration_kinds: &'static [&'static str],
    pub usage_kinds: &'static [&'static str],
    /// Kinds that are neither declarations nor usages (containers, literals).
    pub other_kinds: &'static [&'static str],
    pub function_kinds: &'static [&'static str],
    pub class_kinds: &'static [&'static str],

    /// Kinds that open a lexical scope. The root `file` kind is always one.
    pub scope_kinds: &'static [&'static str],
    /// Scopes whose bindings are only visible from their own body, not from
    /// scopes nested inside them.
    pub opaque_scope_kinds: &'static [&'static str],
    /// A declaration is visible at file scope when every ancestor has one of
    /// these kinds.
    pub container_kinds: &'static [&'static str],
    /// Declaration kinds that may be resolution targets from other files.
    pub exported_kinds: &'static [&'static str],
    /// Declaration kinds that may legitimately repeat within one scope; all of
    /// them become candidates instead of the nearest one.
    pub overloadable_kinds: &'static [&'static str],
    /// Usage kinds that bind their identifier to a declaration in another
    /// module (`from m import x`, `import a.b.C`).
    pub import_kinds: &'static [&'static str],
    /// Declaration kinds that bind a whole module to a local name.
    pub module_import_kinds: &'static [&'static str],
    /// Declaration kind that renames an import (child of an import node).
    pub import_alias_kind: Option<&'static str>,
    /// Usage kinds that denote a member access when they carry a qualifier.
    pub member_kinds: &'static [&'static str],
    /// Whether member accesses fall back to project-wide lookup by name.
    pub global_member_lookup: bool,
    /// Usage kind used to resolve qualifier heads.
    pub name_usage_kind: &'static str,
    /// For each usage kind, the binding kinds (declarations or imports) it may
    /// resolve to.
    pub target_kinds: &'static [(&'static str, &'static [&'static str])],
    /// Names provided by the language runtime or standard library.
    pub builtins: &'static [&'static str],
}

impl FrontEndDescriptor {
    pub fn is_declaration(&self, kind: &str) -> bool {
        self.declaration_kinds.contains(&kind)
    }

    pub fn is_usage(&self, kind: &str) -> bool {
        self.usage_kinds.contains(&kind)
    }

    pub fn knows(&self, kind: &str) -> bool {
        self.is_declaration(kind) || self.is_usage(kind) || self.other_kinds.contains(&kind)
    }

    /// Kinds that count as a unit at `granularity` (only function and class
    /// granularity have unit kinds).
    pub fn unit_kinds(&self, granularity: Granularity) -> &'static [&'static str] {
        match granularity {
            Granularity::Function => self.function_kinds,
            Granularity::Class => self.class_kinds,
            _ => &[],
        }
    }

    pub fn targets_of(&self, usage_kind: &str) -> &'static [&'static str] {
        self.target_kinds
            .iter()
            .find(|(k, _)| *k == usage_kind)
            .map(|(_, t)| *t)
            .unwrap_or(&[])
    }

    pub fn is_scope(&self, kind: &str) -> bool {
        kind == FILE_KIND || self.scope_kinds.contains(&kind)
    }

    pub fn is_builtin(&self, name: &str) -> bool {
        self.builtins.contains(&name)
    }
}

/// Classifies `node` against the descriptor's vocabulary.
pub fn classify(node: &SyntaxNode, descriptor: &FrontEndDescriptor) -> NodeClass {
    if descriptor.is_declaration(node.kind) {
        NodeClass::Declaration
    } else if descriptor.is_usage(node.kind) {
        NodeClass::Usage
    } else {
        if !descriptor.other_kinds.contains(&node.kind) {
            log::warn!(
                "node kind `{}` is not in the {} vocabulary",
                node.kind,
                descriptor.language
            );
        }
        NodeClass::Other
    }
}

/// The declared or referenced name carried by `node`, if any.
pub fn extract_identifier(node: &SyntaxNode) -> Option<&str> {
    node.identifier.as_deref()
}

/// A language front-end.
pub trait FrontEnd: Send + Sync {
    fn descriptor(&self) -> &'static FrontEndDescriptor;

    /// Parses `content`. Pure in `(path, content)`; never fails.
    fn parse(&self, path: &str, content: &str) -> ParseResult;

    /// Project-relative paths that may hold the module named by an import, in
    /// priority order. `qualifier` is the module part of the import and `name`
    /// the imported simple name (empty for whole-module imports).
    fn module_candidates(&self, importer: &ParseResult, qualifier: &str, name: &str)
        -> Vec<String>;
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FrontendError {
    #[error("extension `.{extension}` is claimed by both `{first}` and `{second}`")]
    DuplicateExtension {
        extension: String,
        first: String,
        second: String,
    },
    #[error("duplicate front-end `{0}`")]
    DuplicateLanguage(String),
    #[error("{location:?} lies outside the file span of `{path}`")]
    OutsideFile {
        path: String,
        location: LocationMarker,
    },
    #[error("`{0}` granularity has no enclosing unit within a file")]
    NotAUnitGranularity(Granularity),
}

/// Registered front-ends keyed by language and extension.
pub struct Registry {
    frontends: Vec<Box<dyn FrontEnd>>,
    by_extension: BTreeMap<&'static str, usize>,
}

impl std::fmt::Debug for Registry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list()
            .entries(self.frontends.iter().map(|fe| fe.descriptor().language))
            .finish()
    }
}

impl Registry {
    pub fn new(frontends: Vec<Box<dyn FrontEnd>>) -> Result<Self, FrontendError> {
        let mut by_extension = BTreeMap::new();
        for (i, fe) in frontends.iter().enumerate() {
            let d = fe.descriptor();
            if frontends[..i]
                .iter()
                .any(|o| o.descriptor().language == d.language)
            {
                return Err(FrontendError::DuplicateLanguage(d.language.to_string()));
            }
            for ext in d.extensions {
                if let Some(prev) = by_extension.insert(*ext, i) {
                    return Err(FrontendError::DuplicateExtension {
                        extension: ext.to_string(),
                        first: frontends[prev].descriptor().language.to_string(),
                        second: d.language.to_string(),
                    });
                }
            }
        }
        Ok(Self {
            frontends,
            by_extension,
        })
    }

    /// The Python and Java subset front-ends.
    pub fn standard() -> Self {
        Self::new(vec![Box::new(PythonFrontEnd), Box::new(JavaFrontEnd)])
            .expect("built-in front-ends claim disjoint extensions")
    }

    /// Keeps only the front-end for `language`.
    pub fn restricted_to(self, language: &str) -> Option<Self> {
        let keep: Vec<_> = self
            .frontends
            .into_iter()
            .filter(|fe| fe.descriptor().language == language)
            .collect();
        if keep.is_empty() {
            None
        } else {
            Self::new(keep).ok()
        }
    }

    pub fn languages(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.frontends.iter().map(|fe| fe.descriptor().language)
    }

    pub fn get(&self, language: &str) -> Option<&dyn FrontEnd> {
        self.frontends
            .iter()
            .find(|fe| fe.descriptor().language == language)
            .map(|fe| fe.as_ref())
    }

    pub fn descriptor(&self, language: &str) -> Option<&'static FrontEndDescriptor> {
        self.get(language).map(|fe| fe.descriptor())
    }

    /// The language claiming `path`'s extension.
    pub fn detect_language(&self, path: &str) -> Option<&'static str> {
        let ext = Path::new(path).extension()?.to_str()?;
        self.by_extension
            .get(ext)
            .map(|&i| self.frontends[i].descriptor().language)
    }

    /// Parses raw bytes, replacing invalid UTF-8 and noting it.
    pub fn parse_bytes(&self, path: &str, bytes: &[u8]) -> Option<ParseResult> {
        let fe = self.get(self.detect_language(path)?)?;
        Some(parse_with(fe, path, bytes))
    }
}

pub fn parse_with(fe: &dyn FrontEnd, path: &str, bytes: &[u8]) -> ParseResult {
    let text = String::from_utf8_lossy(bytes);
    let mut result = fe.parse(path, &text);
    if let std::borrow::Cow::Owned(_) = text {
        result.diagnostics.insert(
            0,
            Diagnostic::new(path, 1, "invalid UTF-8 replaced with U+FFFD"),
        );
    }
    result
}

fn unit_element(
    tree: &ParseResult,
    chain: &[&SyntaxNode],
    granularity: Granularity,
    descriptor: &FrontEndDescriptor,
) -> Result<CodeElement, FrontendError> {
    match granularity {
        Granularity::File => Ok(tree.file_element()),
        Granularity::Function | Granularity::Class => {
            let kinds = descriptor.unit_kinds(granularity);
            Ok(chain
                .iter()
                .rev()
                .find(|n| kinds.contains(&n.kind))
                .map(|n| tree.element(n))
                .unwrap_or_else(|| tree.toplevel_element()))
        }
        g => Err(FrontendError::NotAUnitGranularity(g)),
    }
}

/// The innermost function/class/file unit containing `location`.
///
/// Falls back to the synthetic top-level element when no unit of the
/// requested kind encloses the location.
pub fn enclosing_unit(
    tree: &ParseResult,
    location: &LocationMarker,
    granularity: Granularity,
    descriptor: &FrontEndDescriptor,
) -> Result<CodeElement, FrontendError> {
    let root = tree.root.span;
    let inside = location.path == tree.path
        && (location.is_empty() && root.is_empty()
            || root.contains(Span::new(location.start_line, location.end_line)));
    if !inside {
        return Err(FrontendError::OutsideFile {
            path: tree.path.clone(),
            location: location.clone(),
        });
    }
    let mut chain = vec![&tree.root];
    let mut node = &tree.root;
    let target = Span::new(location.start_line, location.end_line);
    while let Some(child) = node.children.iter().find(|c| c.span.contains(target)) {
        chain.push(child);
        node = child;
    }
    unit_element(tree, &chain, granularity, descriptor)
}

/// Like [`enclosing_unit`], but first locates the node that `element` was
/// built from so units sharing a line are told apart.
pub fn enclosing_unit_of(
    tree: &ParseResult,
    element: &CodeElement,
    granularity: Granularity,
    descriptor: &FrontEndDescriptor,
) -> Result<CodeElement, FrontendError> {
    if let Some(chain) = find_node_chain(tree, element) {
        return unit_element(tree, &chain, granularity, descriptor);
    }
    enclosing_unit(tree, &element.location, granularity, descriptor)
}

/// Root-to-node chain for the first node (pre-order) matching `element`.
pub fn find_node_chain<'a>(
    tree: &'a ParseResult,
    element: &CodeElement,
) -> Option<Vec<&'a SyntaxNode>> {
    fn go<'a>(
        node: &'a SyntaxNode,
        element: &CodeElement,
        chain: &mut Vec<&'a SyntaxNode>,
    ) -> bool {
        chain.push(node);
        let loc = &element.location;
        if node.span.start == loc.start_line
            && node.span.end == loc.end_line
            && node.kind == element.signature.kind
            && node.identifier == element.identifier
        {
            return true;
        }
        for child in &node.children {
            if child.span.start <= loc.start_line && go(child, element, chain) {
                return true;
            }
        }
        chain.pop();
        false
    }
    if element.path() != tree.path || element.language() != tree.language {
        return None;
    }
    let mut chain = Vec::new();
    go(&tree.root, element, &mut chain).then_some(chain)
}
