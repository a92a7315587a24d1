//! The JSON result document and the DOT graph export.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::aggregate::AggregatedEdge;
use crate::frontend::{DIRECTORY_KIND, FILE_KIND, TOPLEVEL_LABEL};
use crate::model::{CodeElement, DependencyRecord, Diagnostic, Granularity, UnresolvedUsage};

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_NAME: &str = "depminer";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToolInfo {
    pub name: String,
    pub version: String,
}

impl Default for ToolInfo {
    fn default() -> Self {
        Self {
            name: TOOL_NAME.to_string(),
            version: TOOL_VERSION.to_string(),
        }
    }
}

/// The result document. Field order is the serialized key order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct OutputDocument {
    pub schema_version: u32,
    pub project_root: String,
    pub granularity: Granularity,
    pub tool: ToolInfo,
    pub dependencies: Vec<DependencyRecord>,
    pub unresolved: Vec<UnresolvedUsage>,
    pub diagnostics: Vec<Diagnostic>,
}

impl OutputDocument {
    pub fn new(project_root: impl Into<String>, granularity: Granularity) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            project_root: project_root.into(),
            granularity,
            tool: ToolInfo::default(),
            dependencies: Vec::new(),
            unresolved: Vec::new(),
            diagnostics: Vec::new(),
        }
    }

    /// Rewrites every path as `root` joined with it.
    pub fn absolutize(&mut self, root: &Path) {
        for r in &mut self.dependencies {
            absolutize_element(&mut r.from, root);
            absolutize_element(&mut r.to, root);
        }
        for u in &mut self.unresolved {
            absolutize_element(&mut u.element, root);
        }
        for d in &mut self.diagnostics {
            d.path = absolute_path(root, &d.path);
        }
    }
}

#[derive(Debug, Error)]
pub enum OutputError {
    #[error("DOT export is not available at token granularity")]
    TokenGranularity,
    #[error("malformed result document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported schema version {0}")]
    SchemaVersion(u32),
}

/// `root` joined with a project-relative path; `"."` is the root itself.
pub fn absolute_path(root: &Path, path: &str) -> String {
    let root = root.to_string_lossy().replace('\\', "/");
    let root = root.trim_end_matches('/');
    match path {
        "." | "" => root.to_string(),
        p => format!("{root}/{p}"),
    }
}

pub fn absolutize_element(element: &mut CodeElement, root: &Path) {
    element.location.path = absolute_path(root, &element.location.path);
}

/// Two-space indented JSON with a trailing newline.
pub fn emit_json(doc: &OutputDocument) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(doc).expect("documents always serialize");
    out.push(b'\n');
    out
}

pub fn parse_json(bytes: &[u8]) -> Result<OutputDocument, OutputError> {
    let doc: OutputDocument = serde_json::from_slice(bytes)?;
    if doc.schema_version != SCHEMA_VERSION {
        return Err(OutputError::SchemaVersion(doc.schema_version));
    }
    Ok(doc)
}

/// Node label of an element in the DOT graph.
pub fn dot_label(element: &CodeElement) -> String {
    let path = element.path();
    match (element.kind(), element.identifier.as_deref()) {
        (FILE_KIND | DIRECTORY_KIND, _) => path.to_string(),
        (_, None) => format!("{path}::{TOPLEVEL_LABEL}"),
        (_, Some(name)) => format!("{path}::{name}@{}", element.location.start_line),
    }
}

fn quote(label: &str) -> String {
    let mut s = String::with_capacity(label.len() + 2);
    s.push('"');
    for c in label.chars() {
        match c {
            '"' => s.push_str("\\\""),
            '\\' => s.push_str("\\\\"),
            '\n' => s.push_str("\\n"),
            c => s.push(c),
        }
    }
    s.push('"');
    s
}

/// A `digraph` with one node per distinct label and one edge per label pair,
/// both sorted. Edges that share labels have their counts summed.
pub fn emit_dot(
    edges: &[AggregatedEdge],
    granularity: Granularity,
) -> Result<Vec<u8>, OutputError> {
    if granularity == Granularity::Token {
        return Err(OutputError::TokenGranularity);
    }
    let mut nodes = BTreeSet::new();
    let mut pairs: BTreeMap<(String, String), u64> = BTreeMap::new();
    for e in edges {
        let (from, to) = (dot_label(&e.from), dot_label(&e.to));
        nodes.insert(from.clone());
        nodes.insert(to.clone());
        *pairs.entry((from, to)).or_default() += u64::from(e.count);
    }
    let mut out = String::from("digraph dependencies {\n");
    for n in &nodes {
        writeln!(out, "  {};", quote(n)).expect("writing to a String");
    }
    for ((from, to), count) in &pairs {
        writeln!(
            out,
            "  {} -> {} [label=\"{count}\"];",
            quote(from),
            quote(to)
        )
        .expect("writing to a String");
    }
    out.push_str("}\n");
    Ok(out.into_bytes())
}
