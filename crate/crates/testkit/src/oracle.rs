//! Brute-force reference implementations.
//!
//! The resolver oracle never consults the token index: every lookup rescans
//! whole trees. The index oracle walks every tree and lists each identifier
//! occurrence. Both are quadratic and meant only for small fixtures.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use depminer_core::frontend::{
    classify, FrontEndDescriptor, NodeClass, ParseResult, Registry, SyntaxNode,
};
use depminer_core::index::{Occurrence, TokenIndex};
use depminer_core::model::{CodeElement, DependencyRecord, UnresolvedReason, UnresolvedUsage};
use depminer_core::project::enumerate_sources;
use depminer_core::scope::AnalysisScope;

const DEPTH_LIMIT: usize = 8;

/// One node in document order, with its root-to-parent ancestor chain.
struct Visit<'t> {
    node: &'t SyntaxNode,
    ancestors: Vec<&'t SyntaxNode>,
}

struct File {
    tree: ParseResult,
    language: &'static str,
}

/// Every project file, parsed once from disk.
pub struct Oracle<'r> {
    registry: &'r Registry,
    scope: AnalysisScope,
    files: BTreeMap<String, File>,
}

type Outcome = Result<Vec<CodeElement>, UnresolvedReason>;

fn visits(root: &SyntaxNode) -> Vec<Visit<'_>> {
    fn go<'t>(n: &'t SyntaxNode, stack: &mut Vec<&'t SyntaxNode>, out: &mut Vec<Visit<'t>>) {
        out.push(Visit {
            node: n,
            ancestors: stack.clone(),
        });
        stack.push(n);
        for c in &n.children {
            go(c, stack, out);
        }
        stack.pop();
    }
    let mut out = Vec::new();
    go(root, &mut Vec::new(), &mut out);
    out
}

fn same(a: &SyntaxNode, b: &SyntaxNode) -> bool {
    std::ptr::eq(a, b)
}

impl<'r> Oracle<'r> {
    pub fn load(root: &Path, registry: &'r Registry, scope: AnalysisScope) -> Self {
        let mut files = BTreeMap::new();
        for f in enumerate_sources(root, registry).expect("fixture root is enumerable") {
            let Ok(bytes) = std::fs::read(root.join(&f.path)) else {
                continue;
            };
            let tree = registry
                .parse_bytes(&f.path, &bytes)
                .expect("enumerated files are claimed");
            files.insert(
                f.path,
                File {
                    tree,
                    language: f.language,
                },
            );
        }
        Self {
            registry,
            scope,
            files,
        }
    }

    fn d(&self, language: &str) -> &'static FrontEndDescriptor {
        self.registry.descriptor(language).expect("known language")
    }

    /// Token-level records and unresolved usages, both sorted.
    pub fn resolve(&self) -> (Vec<DependencyRecord>, Vec<UnresolvedUsage>) {
        let mut records = Vec::new();
        let mut unresolved = Vec::new();
        for (path, file) in &self.files {
            if !self.scope.includes_path(path) {
                continue;
            }
            let d = self.d(file.language);
            let all = visits(&file.tree.root);
            for (i, v) in all.iter().enumerate() {
                if !d.usage_kinds.contains(&v.node.kind) {
                    continue;
                }
                let usage = file.tree.element(v.node);
                if !self.scope.includes(path, Some(&usage.location)) {
                    continue;
                }
                let outcome = self.filter_excluded(self.resolve_node(path, &all, i));
                match outcome {
                    Ok(mut cands) if !cands.is_empty() => {
                        cands.sort();
                        cands.dedup();
                        let ambiguous = cands.len() > 1;
                        for to in cands {
                            records.push(DependencyRecord::new(usage.clone(), to, ambiguous));
                        }
                    }
                    Ok(_) => unresolved.push(UnresolvedUsage {
                        element: usage,
                        reason: UnresolvedReason::NoDeclaration,
                    }),
                    Err(reason) => unresolved.push(UnresolvedUsage {
                        element: usage,
                        reason,
                    }),
                }
            }
        }
        records.sort();
        unresolved.sort();
        (records, unresolved)
    }

    fn filter_excluded(&self, outcome: Outcome) -> Outcome {
        let cands = outcome?;
        if cands.is_empty() {
            return Ok(cands);
        }
        let kept: Vec<_> = cands
            .into_iter()
            .filter(|c| self.scope.includes(c.path(), Some(&c.location)))
            .collect();
        if kept.is_empty() {
            Err(UnresolvedReason::ScopeExcludedTarget)
        } else {
            Ok(kept)
        }
    }

    fn is_binding(&self, d: &FrontEndDescriptor, n: &SyntaxNode) -> bool {
        if n.identifier.is_none() {
            return false;
        }
        if d.declaration_kinds.contains(&n.kind) {
            return true;
        }
        d.import_kinds.contains(&n.kind)
            && !n
                .children
                .iter()
                .any(|c| Some(c.kind) == d.import_alias_kind)
    }

    /// Nearest strict ancestor of `v` that opens a scope.
    fn owner<'t>(&self, d: &FrontEndDescriptor, v: &Visit<'t>) -> Option<&'t SyntaxNode> {
        v.ancestors
            .iter()
            .rev()
            .copied()
            .find(|a| d.is_scope(a.kind))
    }

    fn pick(
        &self,
        d: &FrontEndDescriptor,
        all: &[Visit<'_>],
        cands: Vec<usize>,
        before: usize,
    ) -> Vec<usize> {
        if cands
            .iter()
            .any(|&c| d.overloadable_kinds.contains(&all[c].node.kind))
        {
            return cands;
        }
        match cands.iter().filter(|&&c| c < before).max() {
            Some(&c) => vec![c],
            None => cands.into_iter().min().into_iter().collect(),
        }
    }

    /// Bindings of `name` owned by `scope`, restricted to `targets`.
    fn bound_in(
        &self,
        d: &FrontEndDescriptor,
        all: &[Visit<'_>],
        scope: &SyntaxNode,
        name: &str,
        targets: &[&str],
    ) -> Vec<usize> {
        (0..all.len())
            .filter(|&j| {
                let n = all[j].node;
                n.identifier.as_deref() == Some(name)
                    && targets.contains(&n.kind)
                    && self.is_binding(d, n)
                    && self.owner(d, &all[j]).is_some_and(|o| same(o, scope))
            })
            .collect()
    }

    fn lexical(
        &self,
        d: &FrontEndDescriptor,
        all: &[Visit<'_>],
        at: usize,
        name: &str,
        targets: &[&str],
    ) -> Vec<usize> {
        let scopes: Vec<&SyntaxNode> = all[at]
            .ancestors
            .iter()
            .rev()
            .copied()
            .filter(|a| d.is_scope(a.kind))
            .collect();
        for (k, s) in scopes.iter().enumerate() {
            if k > 0 && d.opaque_scope_kinds.contains(&s.kind) {
                continue;
            }
            let cands = self.bound_in(d, all, s, name, targets);
            if !cands.is_empty() {
                return self.pick(d, all, cands, at);
            }
        }
        Vec::new()
    }

    fn resolve_node(&self, path: &str, all: &[Visit<'_>], at: usize) -> Outcome {
        let file = &self.files[path];
        let d = self.d(file.language);
        let node = all[at].node;
        let Some(name) = node.identifier.as_deref() else {
            return Err(UnresolvedReason::NoDeclaration);
        };
        if d.import_kinds.contains(&node.kind) {
            return self.chase(path, node, 0);
        }
        if d.member_kinds.contains(&node.kind) {
            if let Some(q) = node.qualifier.as_deref() {
                if let Some(outcome) = self.member(path, all, at, q) {
                    return outcome;
                }
                if d.global_member_lookup {
                    return self.global(file.language, name, node.kind);
                }
                return Err(UnresolvedReason::NoDeclaration);
            }
        }
        let found = self.lexical(d, all, at, name, d.targets_of(node.kind));
        if found.is_empty() {
            return self.global(file.language, name, node.kind);
        }
        self.finish(path, all, found, 0)
    }

    fn finish(&self, path: &str, all: &[Visit<'_>], found: Vec<usize>, depth: usize) -> Outcome {
        let d = self.d(self.files[path].language);
        if found.len() == 1 && d.import_kinds.contains(&all[found[0]].node.kind) {
            return self.chase(path, all[found[0]].node, depth);
        }
        let tree = &self.files[path].tree;
        Ok(found
            .into_iter()
            .map(|j| tree.element(all[j].node))
            .collect())
    }

    fn module_file(&self, importer: &str, module: &str, name: &str) -> Option<&str> {
        let file = &self.files[importer];
        let fe = self.registry.get(file.language)?;
        fe.module_candidates(&file.tree, module, name)
            .into_iter()
            .find_map(|p| {
                let (k, f) = self.files.get_key_value(&p)?;
                (f.language == file.language).then_some(k.as_str())
            })
    }

    fn chase(&self, path: &str, import: &SyntaxNode, depth: usize) -> Outcome {
        if depth > DEPTH_LIMIT {
            return Err(UnresolvedReason::NoDeclaration);
        }
        let name = import.identifier.as_deref().unwrap_or("");
        let module = import.qualifier.as_deref().unwrap_or("");
        match self.module_file(path, module, name) {
            Some(target) => self.top_level(target, name, import.kind, depth),
            None => Err(UnresolvedReason::ExternalTarget),
        }
    }

    fn top_level(&self, target: &str, name: &str, usage_kind: &str, depth: usize) -> Outcome {
        if !self.scope.includes_path(target) {
            return Err(UnresolvedReason::ScopeExcludedTarget);
        }
        let file = &self.files[target];
        let d = self.d(file.language);
        let all = visits(&file.tree.root);
        let cands = self.bound_in(d, &all, &file.tree.root, name, d.targets_of(usage_kind));
        if cands.is_empty() {
            return Err(UnresolvedReason::NoDeclaration);
        }
        let found = self.pick(d, &all, cands, usize::MAX);
        self.finish(target, &all, found, depth + 1)
    }

    fn member(&self, path: &str, all: &[Visit<'_>], at: usize, qualifier: &str) -> Option<Outcome> {
        let d = self.d(self.files[path].language);
        let parts: Vec<&str> = qualifier.split('.').collect();
        let chain = parts.iter().all(|p| {
            !p.is_empty()
                && p.chars()
                    .all(|c| c.is_alphanumeric() || c == '_' || c == '$')
        });
        if !chain {
            return None;
        }
        let node = all[at].node;
        let name = node.identifier.as_deref()?;
        let head = parts[0];
        let bound = self.lexical(d, all, at, head, d.targets_of(d.name_usage_kind));
        let Some(&b) = bound.last() else {
            return if d.builtins.contains(&head) {
                Some(Err(UnresolvedReason::ExternalTarget))
            } else {
                None
            };
        };
        let binding = all[b].node;
        if d.module_import_kinds.contains(&binding.kind) {
            let base = binding.qualifier.as_deref().unwrap_or(head);
            let full = std::iter::once(base)
                .chain(parts[1..].iter().copied())
                .collect::<Vec<_>>()
                .join(".");
            let outcome = match self.module_file(path, &full, "") {
                Some(target) => self.top_level(target, name, node.kind, 0),
                None if self.module_file(path, base, "").is_some() => {
                    Err(UnresolvedReason::NoDeclaration)
                }
                None => Err(UnresolvedReason::ExternalTarget),
            };
            return Some(outcome);
        }
        if d.import_kinds.contains(&binding.kind) {
            let module = binding.qualifier.as_deref().unwrap_or("");
            let imported = binding.identifier.as_deref().unwrap_or("");
            if !d.module_import_kinds.is_empty() {
                let prefix = if module.is_empty() || module.ends_with('.') {
                    module.to_string()
                } else {
                    format!("{module}.")
                };
                let full = std::iter::once(imported)
                    .chain(parts[1..].iter().copied())
                    .collect::<Vec<_>>()
                    .join(".");
                if let Some(target) = self.module_file(path, &format!("{prefix}{full}"), "") {
                    return Some(self.top_level(target, name, node.kind, 0));
                }
            }
            if self.module_file(path, module, imported).is_none() {
                return Some(Err(UnresolvedReason::ExternalTarget));
            }
        }
        None
    }

    /// Every exported, file-scope-visible declaration of `name` in an
    /// in-scope file of `language`.
    fn global(&self, language: &str, name: &str, usage_kind: &str) -> Outcome {
        let d = self.d(language);
        let targets = d.targets_of(usage_kind);
        let mut out = Vec::new();
        for (path, file) in &self.files {
            if file.language != language || !self.scope.includes_path(path) {
                continue;
            }
            for v in visits(&file.tree.root) {
                let n = v.node;
                if n.identifier.as_deref() == Some(name)
                    && d.declaration_kinds.contains(&n.kind)
                    && targets.contains(&n.kind)
                    && d.exported_kinds.contains(&n.kind)
                    && v.ancestors
                        .iter()
                        .all(|a| d.container_kinds.contains(&a.kind))
                {
                    out.push(file.tree.element(n));
                }
            }
        }
        if out.is_empty() {
            Err(if d.builtins.contains(&name) {
                UnresolvedReason::ExternalTarget
            } else {
                UnresolvedReason::NoDeclaration
            })
        } else {
            Ok(out)
        }
    }

    /// `(token, path, line, occurrence)` for every identifier-bearing node of
    /// every in-scope file.
    pub fn index_entries(&self) -> BTreeSet<(String, String, u32, Occurrence)> {
        let mut out = BTreeSet::new();
        for (path, file) in &self.files {
            if !self.scope.includes_path(path) {
                continue;
            }
            let d = self.d(file.language);
            for v in visits(&file.tree.root) {
                if let Some(id) = &v.node.identifier {
                    let occ = match classify(v.node, d) {
                        NodeClass::Declaration => Occurrence::Declaration,
                        NodeClass::Usage => Occurrence::Usage,
                        NodeClass::Other => Occurrence::Other,
                    };
                    out.insert((id.clone(), path.clone(), v.node.span.start, occ));
                }
            }
        }
        out
    }

    pub fn trees(&self) -> impl Iterator<Item = &ParseResult> {
        self.files.values().map(|f| &f.tree)
    }
}

/// The same tuples read back out of a built index.
pub fn index_tuples(index: &TokenIndex) -> BTreeSet<(String, String, u32, Occurrence)> {
    let mut out = BTreeSet::new();
    for (token, postings) in index.tokens() {
        for p in postings {
            out.insert((
                token.to_string(),
                index.file_path(p.file).to_string(),
                p.line,
                p.occurrence,
            ));
        }
    }
    out
}
