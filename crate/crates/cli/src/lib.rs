//! depminer CLI: single-project and batch runs with a pipeline-friendly exit
//! code contract.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::time::Instant;

use depminer_core::model::Granularity;
use depminer_core::output::{absolutize_element, emit_dot, emit_json, OutputError};
use depminer_core::pipeline::{mine, registry_for, IndexStatus, MineOptions, PipelineError};
use depminer_core::project::ProjectError;
use depminer_core::scope::load_scope;
use serde::Deserialize;
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PROJECT: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub root: PathBuf,
    pub out: PathBuf,
    pub granularity: Granularity,
    pub scope: Option<PathBuf>,
    pub index_cache: Option<PathBuf>,
    pub dot: Option<PathBuf>,
    pub jobs: usize,
    pub absolute_paths: bool,
    /// `"auto"` or a front-end identifier.
    pub language: String,
}

impl RunConfig {
    pub fn new(root: impl Into<PathBuf>, out: impl Into<PathBuf>) -> Self {
        Self {
            root: root.into(),
            out: out.into(),
            granularity: Granularity::Token,
            scope: None,
            index_cache: None,
            dot: None,
            jobs: default_jobs(),
            absolute_paths: false,
            language: "auto".to_string(),
        }
    }
}

pub fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Project(String),
    #[error("{0}")]
    Internal(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Usage(_) => EXIT_USAGE,
            RunError::Project(_) => EXIT_PROJECT,
            RunError::Internal(_) => EXIT_INTERNAL,
        }
    }
}

impl From<PipelineError> for RunError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Config(m) => RunError::Usage(m),
            PipelineError::Project(e) => RunError::Project(e.to_string()),
            PipelineError::Internal(m) => RunError::Internal(m),
        }
    }
}

/// What a successful run reports on stderr.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Summary {
    pub files: usize,
    pub records: usize,
    pub unresolved: usize,
    pub diagnostics: usize,
    pub index: IndexStatus,
    pub elapsed_ms: u128,
}

impl std::fmt::Display for Summary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} files, {} records, {} unresolved, {} diagnostics, index {}, {} ms",
            self.files,
            self.records,
            self.unresolved,
            self.diagnostics,
            self.index,
            self.elapsed_ms
        )
    }
}

fn write_output(path: &Path, bytes: &[u8]) -> Result<(), RunError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)
            .map_err(|e| RunError::Project(format!("cannot create {}: {e}", dir.display())))?;
    }
    std::fs::write(path, bytes)
        .map_err(|e| RunError::Project(format!("cannot write {}: {e}", path.display())))
}

fn root_string(root: &Path) -> String {
    root.to_string_lossy().replace('\\', "/")
}

/// Mines one project and writes its outputs.
pub fn run_mine(config: &RunConfig) -> Result<Summary, RunError> {
    let started = Instant::now();
    if config.jobs == 0 {
        return Err(RunError::Usage("--jobs must be at least 1".into()));
    }
    if config.dot.is_some() && config.granularity == Granularity::Token {
        return Err(RunError::Usage(OutputError::TokenGranularity.to_string()));
    }
    let language = match config.language.as_str() {
        "auto" => None,
        lang => Some(lang.to_string()),
    };
    registry_for(language.as_deref())?;
    let scope = load_scope(config.scope.as_deref()).map_err(|e| RunError::Usage(e.to_string()))?;
    if !config.root.exists() {
        return Err(RunError::Project(
            ProjectError::MissingRoot(config.root.clone()).to_string(),
        ));
    }
    if !config.root.is_dir() {
        return Err(RunError::Project(
            ProjectError::NotADirectory(config.root.clone()).to_string(),
        ));
    }

    let result = mine(&MineOptions {
        root: config.root.clone(),
        scope,
        granularity: config.granularity,
        index_cache: config.index_cache.clone(),
        jobs: config.jobs,
        language,
    })?;

    let canonical = config
        .root
        .canonicalize()
        .map_err(|e| RunError::Project(format!("cannot resolve {}: {e}", config.root.display())))?;
    let mut edges = result.edges.clone();
    let mut doc;
    if config.absolute_paths {
        doc = result.document(root_string(&canonical), config.granularity);
        doc.absolutize(&canonical);
        for e in &mut edges {
            absolutize_element(&mut e.from, &canonical);
            absolutize_element(&mut e.to, &canonical);
        }
    } else {
        doc = result.document(root_string(&config.root), config.granularity);
    }

    let dot = match &config.dot {
        Some(_) => {
            Some(emit_dot(&edges, config.granularity).map_err(|e| RunError::Usage(e.to_string()))?)
        }
        None => None,
    };
    write_output(&config.out, &emit_json(&doc))?;
    if let (Some(path), Some(bytes)) = (&config.dot, dot) {
        write_output(path, &bytes)?;
    }
    Ok(Summary {
        files: result.file_count,
        records: doc.dependencies.len(),
        unresolved: doc.unresolved.len(),
        diagnostics: doc.diagnostics.len(),
        index: result.index_status,
        elapsed_ms: started.elapsed().as_millis(),
    })
}

/// Runs `config`, printing the summary or the error to stderr.
pub fn mine_exit_code(config: &RunConfig) -> i32 {
    match run_mine(config) {
        Ok(summary) => {
            eprintln!("depminer: {}: {summary}", config.root.display());
            EXIT_OK
        }
        Err(e) => {
            eprintln!("depminer: {}: {e}", config.root.display());
            e.exit_code()
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatchManifest {
    pub entries: Vec<BatchEntry>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatchEntry {
    pub root: String,
    pub out: String,
    #[serde(default)]
    pub scope: Option<String>,
    #[serde(default)]
    pub granularity: Option<Granularity>,
}

/// Reads a manifest and turns its entries into run configurations. Relative
/// paths are taken relative to the manifest's directory.
pub fn load_manifest(path: &Path) -> Result<Vec<RunConfig>, RunError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| RunError::Usage(format!("cannot read manifest {}: {e}", path.display())))?;
    let manifest: BatchManifest = serde_json::from_str(&text)
        .map_err(|e| RunError::Usage(format!("malformed manifest {}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new(""));
    let mut roots = BTreeSet::new();
    let mut outs = BTreeSet::new();
    let mut configs = Vec::with_capacity(manifest.entries.len());
    for (i, entry) in manifest.entries.into_iter().enumerate() {
        let mut config = RunConfig::new(base.join(&entry.root), base.join(&entry.out));
        if !roots.insert(config.root.clone()) {
            return Err(RunError::Usage(format!(
                "entries[{i}]: duplicate root `{}`",
                entry.root
            )));
        }
        if !outs.insert(config.out.clone()) {
            return Err(RunError::Usage(format!(
                "entries[{i}]: duplicate out `{}`",
                entry.out
            )));
        }
        config.scope = entry.scope.map(|s| base.join(s));
        config.granularity = entry.granularity.unwrap_or(Granularity::Token);
        configs.push(config);
    }
    Ok(configs)
}

/// Runs every manifest entry in order; the exit code is the highest entry
/// exit code, or 1 when the manifest itself is bad.
pub fn run_batch(manifest: &Path) -> i32 {
    let configs = match load_manifest(manifest) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("depminer: {e}");
            return e.exit_code();
        }
    };
    configs.iter().map(mine_exit_code).max().unwrap_or(EXIT_OK)
}
