//! Dependency data model: locations, signatures, elements, records and
//! granularities, plus the canonical ordering used for deterministic output.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// A file path plus an inclusive 1-based line range.
///
/// The empty range is encoded as `start_line = 1, end_line = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct LocationMarker {
    pub path: String,
    pub start_line: u32,
    pub end_line: u32,
}

impl LocationMarker {
    pub fn new(path: impl Into<String>, start_line: u32, end_line: u32) -> Self {
        Self {
            path: path.into(),
            start_line,
            end_line,
        }
    }

    /// The empty-range sentinel `(1, 0)` for `path`.
    pub fn empty(path: impl Into<String>) -> Self {
        Self::new(path, 1, 0)
    }

    pub fn is_empty(&self) -> bool {
        self.end_line < self.start_line
    }

    pub fn contains(&self, inner: &LocationMarker) -> bool {
        contains(self, inner)
    }

    /// True when the line range shares at least one line with `start..=end`.
    pub fn intersects_lines(&self, start: u32, end: u32) -> bool {
        !self.is_empty() && start <= end && self.start_line <= end && start <= self.end_line
    }
}

/// Whether `outer` encloses `inner`: same path and nested line ranges.
/// Empty ranges are contained in nothing and contain nothing.
pub fn contains(outer: &LocationMarker, inner: &LocationMarker) -> bool {
    if outer.is_empty() || inner.is_empty() || outer.path != inner.path {
        return false;
    }
    outer.start_line <= inner.start_line && inner.end_line <= outer.end_line
}

/// Front-end language plus node-kind label.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TypeSignature {
    pub language: String,
    pub kind: String,
}

impl TypeSignature {
    pub fn new(language: impl Into<String>, kind: impl Into<String>) -> Self {
        Self {
            language: language.into(),
            kind: kind.into(),
        }
    }
}

/// One endpoint of a dependency.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeElement {
    pub location: LocationMarker,
    pub signature: TypeSignature,
    pub identifier: Option<String>,
}

impl CodeElement {
    pub fn new(
        location: LocationMarker,
        signature: TypeSignature,
        identifier: Option<String>,
    ) -> Self {
        Self {
            location,
            signature,
            identifier,
        }
    }

    pub fn path(&self) -> &str {
        &self.location.path
    }

    pub fn language(&self) -> &str {
        &self.signature.language
    }

    pub fn kind(&self) -> &str {
        &self.signature.kind
    }
}

impl Ord for CodeElement {
    fn cmp(&self, other: &Self) -> Ordering {
        self.location
            .cmp(&other.location)
            .then_with(|| self.identifier.cmp(&other.identifier))
            .then_with(|| self.signature.kind.cmp(&other.signature.kind))
            .then_with(|| self.signature.language.cmp(&other.signature.language))
    }
}

impl PartialOrd for CodeElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A usage (`from`) linked to one of its declarations (`to`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DependencyRecord {
    pub from: CodeElement,
    pub to: CodeElement,
    pub count: u32,
    pub ambiguous: bool,
}

impl DependencyRecord {
    pub fn new(from: CodeElement, to: CodeElement, ambiguous: bool) -> Self {
        Self {
            from,
            to,
            count: 1,
            ambiguous,
        }
    }
}

/// Total order over records.
///
/// Primary key is `(from.path, from.startLine, from.endLine, to.path,
/// to.startLine, to.endLine, from.identifier, to.kind)`; the remaining fields
/// only break ties between records that agree on that tuple.
pub fn canonical_order(a: &DependencyRecord, b: &DependencyRecord) -> Ordering {
    endpoint_order((&a.from, &a.to), (&b.from, &b.to))
        .then(a.count.cmp(&b.count))
        .then(a.ambiguous.cmp(&b.ambiguous))
}

/// The endpoint part of [`canonical_order`], shared with aggregated edges.
pub fn endpoint_order(
    a: (&CodeElement, &CodeElement),
    b: (&CodeElement, &CodeElement),
) -> Ordering {
    let (fa, ta) = (&a.0.location, &a.1.location);
    let (fb, tb) = (&b.0.location, &b.1.location);
    fa.path
        .cmp(&fb.path)
        .then(fa.start_line.cmp(&fb.start_line))
        .then(fa.end_line.cmp(&fb.end_line))
        .then_with(|| ta.path.cmp(&tb.path))
        .then(ta.start_line.cmp(&tb.start_line))
        .then(ta.end_line.cmp(&tb.end_line))
        .then_with(|| a.0.identifier.cmp(&b.0.identifier))
        .then_with(|| a.1.signature.kind.cmp(&b.1.signature.kind))
        .then_with(|| a.0.cmp(b.0))
        .then_with(|| a.1.cmp(b.1))
}

impl Ord for DependencyRecord {
    fn cmp(&self, other: &Self) -> Ordering {
        canonical_order(self, other)
    }
}

impl PartialOrd for DependencyRecord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Analysis granularity, ordered from finest to coarsest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Granularity {
    Token,
    Function,
    Class,
    File,
    Directory,
}

impl Granularity {
    pub const ALL: [Granularity; 5] = [
        Granularity::Token,
        Granularity::Function,
        Granularity::Class,
        Granularity::File,
        Granularity::Directory,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Granularity::Token => "token",
            Granularity::Function => "function",
            Granularity::Class => "class",
            Granularity::File => "file",
            Granularity::Directory => "directory",
        }
    }
}

impl fmt::Display for Granularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown granularity `{0}` (expected token, function, class, file or directory)")]
pub struct ParseGranularityError(pub String);

impl FromStr for Granularity {
    type Err = ParseGranularityError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Granularity::ALL
            .into_iter()
            .find(|g| g.as_str() == s)
            .ok_or_else(|| ParseGranularityError(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UnresolvedReason {
    NoDeclaration,
    ExternalTarget,
    ScopeExcludedTarget,
}

/// A usage for which no in-scope declaration was found.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnresolvedUsage {
    pub element: CodeElement,
    pub reason: UnresolvedReason,
}

/// A non-fatal problem attached to a file and line.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Diagnostic {
    pub path: String,
    pub line: u32,
    pub message: String,
}

impl Diagnostic {
    pub fn new(path: impl Into<String>, line: u32, message: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}
