//! End-to-end mining: enumerate, index (optionally cached), resolve, lift.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use crate::aggregate::{lift, AggregatedEdge, LiftError};
use crate::frontend::Registry;
use crate::index::{
    cache_file, fingerprint, load_cached, store_cached, FileEntry, FileFingerprint, FilePostings,
    IndexError, TokenIndex,
};
use crate::model::{Diagnostic, Granularity, UnresolvedUsage};
use crate::output::OutputDocument;
use crate::project::{Project, ProjectError};
use crate::resolver::{resolve_files, Resolution};
use crate::scope::AnalysisScope;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Project(#[from] ProjectError),
    #[error("internal error: {0}")]
    Internal(String),
}

impl From<LiftError> for PipelineError {
    fn from(e: LiftError) -> Self {
        PipelineError::Internal(e.to_string())
    }
}

impl From<IndexError> for PipelineError {
    fn from(e: IndexError) -> Self {
        PipelineError::Internal(e.to_string())
    }
}

#[derive(Debug, Clone)]
pub struct MineOptions {
    pub root: PathBuf,
    pub scope: AnalysisScope,
    pub granularity: Granularity,
    pub index_cache: Option<PathBuf>,
    pub jobs: usize,
    /// Restrict to one front-end; `None` detects the language per file.
    pub language: Option<String>,
}

impl MineOptions {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self {
            root: root.into(),
            scope: AnalysisScope::default(),
            granularity: Granularity::Token,
            index_cache: None,
            jobs: 1,
            language: None,
        }
    }
}

/// How the token index of a run was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexStatus {
    Built,
    Cached,
    Updated { reindexed: usize },
}

impl fmt::Display for IndexStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndexStatus::Built => f.write_str("built"),
            IndexStatus::Cached => f.write_str("cached"),
            IndexStatus::Updated { reindexed } => write!(f, "updated ({reindexed} reindexed)"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct MineResult {
    /// In-scope source files.
    pub file_count: usize,
    /// Token records before lifting, after merging duplicates.
    pub token_records: usize,
    /// Dependencies at the requested granularity, sorted.
    pub edges: Vec<AggregatedEdge>,
    pub suppressed: u64,
    pub unresolved: Vec<UnresolvedUsage>,
    pub diagnostics: Vec<Diagnostic>,
    pub index_status: IndexStatus,
}

impl MineResult {
    pub fn document(
        &self,
        project_root: impl Into<String>,
        granularity: Granularity,
    ) -> OutputDocument {
        let mut doc = OutputDocument::new(project_root, granularity);
        doc.dependencies = self.edges.iter().map(AggregatedEdge::to_record).collect();
        doc.unresolved = self.unresolved.clone();
        doc.diagnostics = self.diagnostics.clone();
        doc
    }
}

pub fn registry_for(language: Option<&str>) -> Result<Registry, PipelineError> {
    let registry = Registry::standard();
    match language {
        None | Some("auto") => Ok(registry),
        Some(lang) => {
            let known: Vec<_> = registry.languages().collect();
            registry.restricted_to(lang).ok_or_else(|| {
                PipelineError::Config(format!(
                    "unknown language `{lang}` (expected auto, {})",
                    known.join(", ")
                ))
            })
        }
    }
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool, PipelineError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| PipelineError::Internal(format!("cannot start worker pool: {e}")))
}

fn in_scope(project: &Project<'_>, scope: &AnalysisScope) -> Vec<usize> {
    (0..project.files().len())
        .filter(|&o| scope.includes_path(&project.files()[o].path))
        .collect()
}

fn extract(project: &Project<'_>, ordinal: usize, fp: FileFingerprint) -> Option<FilePostings> {
    let tree = project.tree(ordinal)?;
    let descriptor = project.registry().descriptor(tree.language)?;
    Some(FilePostings::extract(&tree, descriptor, fp))
}

/// Indexes the readable files among `ordinals`, reusing the cached index
/// where fingerprints still match.
fn obtain_index(
    project: &Project<'_>,
    ordinals: &[usize],
    cache_dir: Option<&Path>,
) -> Result<(TokenIndex, IndexStatus), PipelineError> {
    let current: Vec<(usize, FileFingerprint)> = ordinals
        .par_iter()
        .filter_map(|&o| project.contents(o).map(|bytes| (o, fingerprint(&bytes))))
        .collect();
    let table: Vec<FileEntry> = current
        .iter()
        .map(|&(o, fp)| FileEntry {
            path: project.files()[o].path.clone(),
            fingerprint: fp,
        })
        .collect();

    let cache_path = match cache_dir {
        Some(dir) => {
            let canonical = project
                .root()
                .canonicalize()
                .unwrap_or_else(|_| project.root().to_path_buf());
            Some(cache_file(dir, &canonical))
        }
        None => None,
    };
    let cached = cache_path.as_deref().and_then(load_cached);
    if let Some(index) = &cached {
        if index.files() == table.as_slice() {
            return Ok((cached.expect("checked above"), IndexStatus::Cached));
        }
    }

    let mut reusable: BTreeMap<String, FilePostings> = BTreeMap::new();
    let had_cache = cached.is_some();
    if let Some(index) = cached {
        for fp in index.into_file_postings() {
            reusable.insert(fp.path.clone(), fp);
        }
    }
    let (kept, stale): (Vec<_>, Vec<_>) = current.into_iter().partition(|&(o, fp)| {
        reusable
            .get(&project.files()[o].path)
            .is_some_and(|old| old.fingerprint == fp)
    });
    let mut files: Vec<FilePostings> = stale
        .par_iter()
        .filter_map(|&(o, fp)| extract(project, o, fp))
        .collect();
    let reindexed = files.len();
    for (o, _) in kept {
        files.push(
            reusable
                .remove(&project.files()[o].path)
                .expect("partitioned on presence"),
        );
    }
    let index = TokenIndex::from_files(files)?;
    let status = if had_cache {
        IndexStatus::Updated { reindexed }
    } else {
        IndexStatus::Built
    };
    if let Some(path) = &cache_path {
        if let Err(e) = store_cached(path, &index) {
            log::warn!("cannot write index cache {}: {e}", path.display());
        }
    }
    Ok((index, status))
}

struct Resolved {
    file_count: usize,
    resolution: Resolution,
    index_status: IndexStatus,
}

fn resolve_in(
    project: &Project<'_>,
    scope: &AnalysisScope,
    cache_dir: Option<&Path>,
) -> Result<Resolved, PipelineError> {
    let ordinals = in_scope(project, scope);
    let (index, index_status) = obtain_index(project, &ordinals, cache_dir)?;
    let mut resolution = resolve_files(project, &index, scope, &ordinals);
    for &o in &ordinals {
        if let Some(tree) = project.tree(o) {
            resolution
                .diagnostics
                .extend(tree.diagnostics.iter().cloned());
        }
    }
    resolution.diagnostics.extend(project.read_errors());
    resolution.diagnostics.sort();
    resolution.diagnostics.dedup();
    Ok(Resolved {
        file_count: ordinals.len(),
        resolution,
        index_status,
    })
}

/// Token-level resolution of a whole project: one unmerged record per
/// (usage, candidate) pair plus the unresolved usages, both sorted.
pub fn resolve_project(
    root: &Path,
    scope: &AnalysisScope,
    jobs: usize,
) -> Result<Resolution, PipelineError> {
    let registry = Registry::standard();
    let project = Project::open(root, &registry)?;
    let resolved = pool(jobs)?.install(|| resolve_in(&project, scope, None))?;
    Ok(resolved.resolution)
}

/// Runs the full pipeline for one project.
pub fn mine(opts: &MineOptions) -> Result<MineResult, PipelineError> {
    let registry = registry_for(opts.language.as_deref())?;
    let project = Project::open(&opts.root, &registry)?;
    pool(opts.jobs)?.install(|| {
        let resolved = resolve_in(&project, &opts.scope, opts.index_cache.as_deref())?;
        let lifted = lift(&resolved.resolution.records, opts.granularity, &project)?;
        let token_records = if opts.granularity == Granularity::Token {
            lifted.edges.len()
        } else {
            lift(&resolved.resolution.records, Granularity::Token, &project)?
                .edges
                .len()
        };
        Ok(MineResult {
            file_count: resolved.file_count,
            token_records,
            edges: lifted.edges,
            suppressed: lifted.suppressed,
            unresolved: resolved.resolution.unresolved,
            diagnostics: resolved.resolution.diagnostics,
            index_status: resolved.index_status,
        })
    })
}
