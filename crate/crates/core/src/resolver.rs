//! Usage-to-declaration resolution.
//!
//! Each usage goes through up to three stages: lexical lookup in the usage's
//! own file (innermost scope outward, nearest preceding binding wins), import
//! chasing into the imported file, and a project-wide lookup through the
//! token index with bottom-up confirmation of every candidate. A hit in an
//! earlier stage suppresses the later ones.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;

use crate::frontend::{FrontEndDescriptor, ParseResult, Span, SyntaxNode};
use crate::index::{Occurrence, TokenIndex};
use crate::model::{
    CodeElement, DependencyRecord, Diagnostic, LocationMarker, TypeSignature, UnresolvedReason,
    UnresolvedUsage,
};
use crate::project::Project;
use crate::scope::AnalysisScope;

/// Maximum number of re-import hops followed from one import.
pub const MAX_IMPORT_DEPTH: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Resolved,
    Ambiguous,
    Unresolved,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolutionResult {
    pub usage: CodeElement,
    /// Sorted by canonical element order.
    pub candidates: Vec<CodeElement>,
    pub status: Status,
    pub reason: Option<UnresolvedReason>,
}

/// The dotted module a `from module import name` binding names when `name`
/// is itself a submodule, extended by `rest`.
pub fn submodule(module: &str, name: &str, rest: &[&str]) -> String {
    let mut full = module.to_string();
    if !full.is_empty() && !full.ends_with('.') {
        full.push('.');
    }
    full.push_str(name);
    for s in rest {
        full.push('.');
        full.push_str(s);
    }
    full
}

impl ResolutionResult {
    fn new(usage: CodeElement, outcome: Result<Vec<CodeElement>, UnresolvedReason>) -> Self {
        match outcome {
            Ok(mut candidates) if !candidates.is_empty() => {
                candidates.sort();
                candidates.dedup();
                let status = if candidates.len() == 1 {
                    Status::Resolved
                } else {
                    Status::Ambiguous
                };
                Self {
                    usage,
                    candidates,
                    status,
                    reason: None,
                }
            }
            Ok(_) => Self::unresolved(usage, UnresolvedReason::NoDeclaration),
            Err(reason) => Self::unresolved(usage, reason),
        }
    }

    fn unresolved(usage: CodeElement, reason: UnresolvedReason) -> Self {
        Self {
            usage,
            candidates: Vec::new(),
            status: Status::Unresolved,
            reason: Some(reason),
        }
    }
}

/// Every usage node of `tree`, depth-first in document order.
pub fn collect_usages(tree: &ParseResult, descriptor: &FrontEndDescriptor) -> Vec<CodeElement> {
    let mut out = Vec::new();
    tree.root.walk(&mut |n| {
        if descriptor.is_usage(n.kind) {
            out.push(tree.element(n));
        }
    });
    out
}

/// A pre-order copy of a tree with parent links and per-scope bindings.
struct Flat {
    path: String,
    language: &'static str,
    nodes: Vec<FlatNode>,
    bindings: HashMap<(u32, String), Vec<u32>>,
}

struct FlatNode {
    kind: &'static str,
    span: Span,
    identifier: Option<String>,
    qualifier: Option<String>,
    parent: Option<u32>,
    /// Nearest strict ancestor that opens a scope.
    owner: Option<u32>,
}

impl Flat {
    fn build(tree: &ParseResult, d: &FrontEndDescriptor) -> Self {
        let mut nodes = Vec::with_capacity(tree.root.node_count());
        fn go(
            n: &SyntaxNode,
            parent: Option<u32>,
            owner: Option<u32>,
            d: &FrontEndDescriptor,
            nodes: &mut Vec<FlatNode>,
        ) {
            let idx = nodes.len() as u32;
            nodes.push(FlatNode {
                kind: n.kind,
                span: n.span,
                identifier: n.identifier.clone(),
                qualifier: n.qualifier.clone(),
                parent,
                owner,
            });
            let scope = if d.is_scope(n.kind) { Some(idx) } else { owner };
            for c in &n.children {
                go(c, Some(idx), scope, d, nodes);
            }
        }
        go(&tree.root, None, None, d, &mut nodes);

        let mut aliased = vec![false; nodes.len()];
        for n in &nodes {
            if let (Some(p), Some(alias)) = (n.parent, d.import_alias_kind) {
                if n.kind == alias {
                    aliased[p as usize] = true;
                }
            }
        }

        let mut bindings: HashMap<(u32, String), Vec<u32>> = HashMap::new();
        for (i, n) in nodes.iter().enumerate() {
            let (Some(owner), Some(id)) = (n.owner, &n.identifier) else {
                continue;
            };
            let is_binding =
                d.is_declaration(n.kind) || (d.import_kinds.contains(&n.kind) && !aliased[i]);
            if is_binding {
                bindings
                    .entry((owner, id.clone()))
                    .or_default()
                    .push(i as u32);
            }
        }
        Self {
            path: tree.path.clone(),
            language: tree.language,
            nodes,
            bindings,
        }
    }

    fn node(&self, i: u32) -> &FlatNode {
        &self.nodes[i as usize]
    }

    fn element(&self, i: u32) -> CodeElement {
        let n = self.node(i);
        CodeElement::new(
            LocationMarker::new(self.path.clone(), n.span.start, n.span.end),
            TypeSignature::new(self.language, n.kind),
            n.identifier.clone(),
        )
    }

    /// First node (pre-order) that `element` was built from.
    fn find(&self, element: &CodeElement) -> Option<u32> {
        self.nodes
            .iter()
            .position(|n| {
                n.span.start == element.location.start_line
                    && n.span.end == element.location.end_line
                    && n.kind == element.kind()
                    && n.identifier == element.identifier
            })
            .map(|i| i as u32)
    }
}

/// Picks among same-scope bindings: every overloadable candidate, else the
/// last one before `position`, else the first one.
fn select(flat: &Flat, d: &FrontEndDescriptor, cands: Vec<u32>, position: u32) -> Vec<u32> {
    if cands
        .iter()
        .any(|&c| d.overloadable_kinds.contains(&flat.node(c).kind))
    {
        return cands;
    }
    let pick = cands
        .iter()
        .rev()
        .find(|&&c| c < position)
        .or(cands.first())
        .copied();
    pick.into_iter().collect()
}

/// Bindings of `name` visible from node `at`, innermost scope first.
fn lexical(flat: &Flat, d: &FrontEndDescriptor, at: u32, name: &str, targets: &[&str]) -> Vec<u32> {
    let mut scope = flat.node(at).owner;
    let mut innermost = true;
    while let Some(s) = scope {
        if innermost || !d.opaque_scope_kinds.contains(&flat.node(s).kind) {
            if let Some(list) = flat.bindings.get(&(s, name.to_string())) {
                let cands: Vec<u32> = list
                    .iter()
                    .copied()
                    .filter(|&b| targets.contains(&flat.node(b).kind))
                    .collect();
                if !cands.is_empty() {
                    return select(flat, d, cands, at);
                }
            }
        }
        innermost = false;
        scope = flat.node(s).owner;
    }
    Vec::new()
}

type Outcome = Result<Vec<CodeElement>, UnresolvedReason>;

/// Resolves usages against one project, index and scope. Safe to share
/// between threads; per-file lookup tables are built on first use.
pub struct Resolver<'a, 'r> {
    project: &'a Project<'r>,
    index: &'a TokenIndex,
    scope: &'a AnalysisScope,
    flats: Vec<OnceLock<Option<Arc<Flat>>>>,
    diagnostics: Mutex<Vec<Diagnostic>>,
}

impl<'a, 'r> Resolver<'a, 'r> {
    pub fn new(project: &'a Project<'r>, index: &'a TokenIndex, scope: &'a AnalysisScope) -> Self {
        Self {
            project,
            index,
            scope,
            flats: (0..project.files().len())
                .map(|_| OnceLock::new())
                .collect(),
            diagnostics: Mutex::new(Vec::new()),
        }
    }

    pub fn diagnostics(&self) -> Vec<Diagnostic> {
        self.diagnostics
            .lock()
            .expect("diagnostics poisoned")
            .clone()
    }

    fn diag(&self, d: Diagnostic) {
        self.diagnostics
            .lock()
            .expect("diagnostics poisoned")
            .push(d);
    }

    fn descriptor(&self, language: &str) -> &'static FrontEndDescriptor {
        self.project
            .registry()
            .descriptor(language)
            .expect("project languages are registered")
    }

    fn flat(&self, ordinal: usize) -> Option<Arc<Flat>> {
        self.flats[ordinal]
            .get_or_init(|| {
                let tree = self.project.tree(ordinal)?;
                Some(Arc::new(Flat::build(&tree, self.descriptor(tree.language))))
            })
            .clone()
    }

    /// Resolves `usage`, an element of `tree`.
    pub fn resolve_usage(&self, usage: &CodeElement, tree: &ParseResult) -> ResolutionResult {
        let located = self.project.ordinal(&tree.path).and_then(|o| {
            let flat = self.flat(o)?;
            let at = flat.find(usage)?;
            Some((o, flat, at))
        });
        let outcome = match located {
            Some((o, flat, at)) => self.resolve_at(o, &flat, at),
            None => Err(UnresolvedReason::NoDeclaration),
        };
        ResolutionResult::new(usage.clone(), self.filter_excluded(outcome))
    }

    /// Resolution results for every in-scope usage of file `ordinal`.
    pub fn resolve_file(&self, ordinal: usize) -> Vec<ResolutionResult> {
        let Some(flat) = self.flat(ordinal) else {
            return Vec::new();
        };
        let d = self.descriptor(flat.language);
        let mut out = Vec::new();
        for i in 0..flat.nodes.len() as u32 {
            if !d.is_usage(flat.node(i).kind) {
                continue;
            }
            let usage = flat.element(i);
            if !self.scope.includes(&flat.path, Some(&usage.location)) {
                continue;
            }
            let outcome = self.filter_excluded(self.resolve_at(ordinal, &flat, i));
            out.push(ResolutionResult::new(usage, outcome));
        }
        out
    }

    fn filter_excluded(&self, outcome: Outcome) -> Outcome {
        let cands = outcome?;
        let had_any = !cands.is_empty();
        let kept: Vec<_> = cands
            .into_iter()
            .filter(|c| self.scope.includes(c.path(), Some(&c.location)))
            .collect();
        if had_any && kept.is_empty() {
            Err(UnresolvedReason::ScopeExcludedTarget)
        } else {
            Ok(kept)
        }
    }

    fn resolve_at(&self, ordinal: usize, flat: &Flat, at: u32) -> Outcome {
        let d = self.descriptor(flat.language);
        let node = flat.node(at);
        let Some(name) = node.identifier.as_deref() else {
            return Err(UnresolvedReason::NoDeclaration);
        };
        if d.import_kinds.contains(&node.kind) {
            return self.chase(ordinal, flat, at, 0);
        }
        if d.member_kinds.contains(&node.kind) {
            if let Some(qualifier) = node.qualifier.as_deref() {
                if let Some(outcome) = self.member(ordinal, flat, at, qualifier) {
                    return outcome;
                }
                return if d.global_member_lookup {
                    self.global(flat.language, name, node.kind)
                } else {
                    Err(UnresolvedReason::NoDeclaration)
                };
            }
        }
        let found = lexical(flat, d, at, name, d.targets_of(node.kind));
        if !found.is_empty() {
            return self.bindings_outcome(ordinal, flat, found, 0);
        }
        self.global(flat.language, name, node.kind)
    }

    fn bindings_outcome(
        &self,
        ordinal: usize,
        flat: &Flat,
        found: Vec<u32>,
        depth: usize,
    ) -> Outcome {
        let d = self.descriptor(flat.language);
        if let [single] = found[..] {
            if d.import_kinds.contains(&flat.node(single).kind) {
                return self.chase(ordinal, flat, single, depth);
            }
        }
        Ok(found.into_iter().map(|b| flat.element(b)).collect())
    }

    /// The project file holding `module` as imported from file `ordinal`.
    fn module_file(
        &self,
        ordinal: usize,
        language: &str,
        module: &str,
        name: &str,
    ) -> Option<usize> {
        let tree = self.project.tree(ordinal)?;
        let fe = self.project.registry().get(language)?;
        fe.module_candidates(&tree, module, name)
            .into_iter()
            .filter_map(|p| self.project.ordinal(&p))
            .find(|&o| self.project.files()[o].language == language)
    }

    /// Follows the import node `imp` of file `ordinal` to the declaration it
    /// names in the imported file.
    fn chase(&self, ordinal: usize, flat: &Flat, imp: u32, depth: usize) -> Outcome {
        if depth > MAX_IMPORT_DEPTH {
            return Err(UnresolvedReason::NoDeclaration);
        }
        let node = flat.node(imp);
        let name = node.identifier.as_deref().unwrap_or_default();
        let module = node.qualifier.as_deref().unwrap_or_default();
        let Some(target) = self.module_file(ordinal, flat.language, module, name) else {
            return Err(UnresolvedReason::ExternalTarget);
        };
        self.lookup_in_file(target, name, node.kind, depth)
    }

    /// Declarations of `name` bound at file scope of `target`.
    fn lookup_in_file(&self, target: usize, name: &str, usage_kind: &str, depth: usize) -> Outcome {
        let path = &self.project.files()[target].path;
        if !self.scope.includes_path(path) {
            return Err(UnresolvedReason::ScopeExcludedTarget);
        }
        let Some(tflat) = self.flat(target) else {
            self.diag(Diagnostic::new(
                path.clone(),
                1,
                "imported file is unreadable",
            ));
            return Err(UnresolvedReason::NoDeclaration);
        };
        let d = self.descriptor(tflat.language);
        let targets = d.targets_of(usage_kind);
        let cands: Vec<u32> = tflat
            .bindings
            .get(&(0, name.to_string()))
            .map(|l| {
                l.iter()
                    .copied()
                    .filter(|&b| targets.contains(&tflat.node(b).kind))
                    .collect()
            })
            .unwrap_or_default();
        if cands.is_empty() {
            return Err(UnresolvedReason::NoDeclaration);
        }
        let found = select(&tflat, d, cands, u32::MAX);
        self.bindings_outcome(target, &tflat, found, depth + 1)
    }

    /// Member access `qualifier.name`. `None` means "not decided here".
    fn member(&self, ordinal: usize, flat: &Flat, at: u32, qualifier: &str) -> Option<Outcome> {
        let d = self.descriptor(flat.language);
        let segments: Vec<&str> = qualifier.split('.').collect();
        let pure_chain = segments.iter().all(|s| {
            !s.is_empty()
                && s.chars()
                    .all(|c| c.is_alphanumeric() || c == '_' || c == '$')
        });
        if !pure_chain {
            return None;
        }
        let head = segments[0];
        let node = flat.node(at);
        let name = node.identifier.as_deref()?;
        let bound = lexical(flat, d, at, head, d.targets_of(d.name_usage_kind));
        let Some(&b) = bound.last() else {
            return d
                .is_builtin(head)
                .then_some(Err(UnresolvedReason::ExternalTarget));
        };
        let binding = flat.node(b);
        if d.module_import_kinds.contains(&binding.kind) {
            let base = binding.qualifier.as_deref().unwrap_or(head);
            let mut full = base.to_string();
            for s in &segments[1..] {
                full.push('.');
                full.push_str(s);
            }
            return Some(match self.module_file(ordinal, flat.language, &full, "") {
                Some(target) => self.lookup_in_file(target, name, node.kind, 0),
                None if self.module_file(ordinal, flat.language, base, "").is_some() => {
                    Err(UnresolvedReason::NoDeclaration)
                }
                None => Err(UnresolvedReason::ExternalTarget),
            });
        }
        if d.import_kinds.contains(&binding.kind) {
            let module = binding.qualifier.as_deref().unwrap_or_default();
            let imported = binding.identifier.as_deref().unwrap_or_default();
            if !d.module_import_kinds.is_empty() {
                let full = submodule(module, imported, &segments[1..]);
                if let Some(target) = self.module_file(ordinal, flat.language, &full, "") {
                    return Some(self.lookup_in_file(target, name, node.kind, 0));
                }
            }
            if self
                .module_file(ordinal, flat.language, module, imported)
                .is_none()
            {
                return Some(Err(UnresolvedReason::ExternalTarget));
            }
        }
        None
    }

    /// Project-wide lookup through the index, confirming each declaration
    /// posting on the candidate file's tree.
    fn global(&self, language: &str, name: &str, usage_kind: &str) -> Outcome {
        let d = self.descriptor(language);
        let targets = d.targets_of(usage_kind);
        let mut out = Vec::new();
        for p in self.index.query(name) {
            if p.occurrence != Occurrence::Declaration {
                continue;
            }
            let path = self.index.file_path(p.file);
            let Some(ordinal) = self.project.ordinal(path) else {
                continue;
            };
            if self.project.files()[ordinal].language != language {
                continue;
            }
            let Some(flat) = self.flat(ordinal) else {
                self.diag(Diagnostic::new(
                    path,
                    p.line,
                    "candidate file is unreadable",
                ));
                continue;
            };
            for (i, n) in flat.nodes.iter().enumerate() {
                if n.span.start != p.line
                    || n.identifier.as_deref() != Some(name)
                    || !targets.contains(&n.kind)
                    || !d.exported_kinds.contains(&n.kind)
                {
                    continue;
                }
                let mut visible = true;
                let mut up = n.parent;
                while let Some(a) = up {
                    if !d.container_kinds.contains(&flat.node(a).kind) {
                        visible = false;
                        break;
                    }
                    up = flat.node(a).parent;
                }
                if visible {
                    out.push(flat.element(i as u32));
                }
            }
        }
        if out.is_empty() {
            return Err(if d.is_builtin(name) {
                UnresolvedReason::ExternalTarget
            } else {
                UnresolvedReason::NoDeclaration
            });
        }
        Ok(out)
    }
}

/// Token-level results of resolving every in-scope usage.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Resolution {
    pub records: Vec<DependencyRecord>,
    pub unresolved: Vec<UnresolvedUsage>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Resolves all usages of the files at `ordinals` (in parallel on the
/// current rayon pool). Records are unmerged (count 1) and sorted.
pub fn resolve_files(
    project: &Project<'_>,
    index: &TokenIndex,
    scope: &AnalysisScope,
    ordinals: &[usize],
) -> Resolution {
    let resolver = Resolver::new(project, index, scope);
    let per_file: Vec<Vec<ResolutionResult>> = ordinals
        .par_iter()
        .map(|&o| resolver.resolve_file(o))
        .collect();
    let mut records = Vec::new();
    let mut unresolved = Vec::new();
    for result in per_file.into_iter().flatten() {
        match result.status {
            Status::Unresolved => unresolved.push(UnresolvedUsage {
                element: result.usage,
                reason: result.reason.unwrap_or(UnresolvedReason::NoDeclaration),
            }),
            status => {
                let ambiguous = status == Status::Ambiguous;
                for to in result.candidates {
                    records.push(DependencyRecord::new(result.usage.clone(), to, ambiguous));
                }
            }
        }
    }
    records.sort();
    unresolved.sort();
    let mut diagnostics = resolver.diagnostics();
    diagnostics.sort();
    diagnostics.dedup();
    Resolution {
        records,
        unresolved,
        diagnostics,
    }
}
