//! Source enumeration and the shared, lazily filled cache of file contents
//! and parsed trees.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, OnceLock};

use thiserror::Error;
use walkdir::WalkDir;

use crate::frontend::{parse_with, ParseResult, Registry};
use crate::model::Diagnostic;

#[derive(Debug, Error)]
pub enum ProjectError {
    #[error("project root {0} does not exist")]
    MissingRoot(PathBuf),
    #[error("project root {0} is not a directory")]
    NotADirectory(PathBuf),
    #[error("cannot enumerate {path}: {message}")]
    Walk { path: PathBuf, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceFile {
    /// Root-relative, `/`-separated.
    pub path: String,
    pub language: &'static str,
}

/// All claimed source files under a root, sorted by path. Hidden files and
/// directories are skipped.
pub fn enumerate_sources(
    root: &Path,
    registry: &Registry,
) -> Result<Vec<SourceFile>, ProjectError> {
    if !root.exists() {
        return Err(ProjectError::MissingRoot(root.to_path_buf()));
    }
    if !root.is_dir() {
        return Err(ProjectError::NotADirectory(root.to_path_buf()));
    }
    let walker = WalkDir::new(root)
        .sort_by_file_name()
        .into_iter()
        .filter_entry(|e| e.depth() == 0 || !e.file_name().to_string_lossy().starts_with('.'));
    let mut out = Vec::new();
    for entry in walker {
        let entry = entry.map_err(|e| ProjectError::Walk {
            path: e
                .path()
                .map_or_else(|| root.to_path_buf(), Path::to_path_buf),
            message: e.to_string(),
        })?;
        if !entry.file_type().is_file() {
            continue;
        }
        let rel = entry
            .path()
            .strip_prefix(root)
            .expect("walk stays under root");
        let Some(parts) = rel
            .components()
            .map(|c| c.as_os_str().to_str())
            .collect::<Option<Vec<_>>>()
        else {
            log::warn!("skipping non-UTF-8 path {}", rel.display());
            continue;
        };
        let path = parts.join("/");
        if let Some(language) = registry.detect_language(&path) {
            out.push(SourceFile { path, language });
        }
    }
    out.sort_by(|a, b| a.path.cmp(&b.path));
    Ok(out)
}

/// The project's sources plus on-demand contents and trees. Every file is
/// read and parsed at most once, from any thread.
pub struct Project<'r> {
    root: PathBuf,
    registry: &'r Registry,
    files: Vec<SourceFile>,
    by_path: BTreeMap<String, usize>,
    contents: Vec<OnceLock<Option<Arc<Vec<u8>>>>>,
    trees: Vec<OnceLock<Option<Arc<ParseResult>>>>,
    read_errors: Mutex<Vec<Diagnostic>>,
}

impl<'r> Project<'r> {
    pub fn open(root: &Path, registry: &'r Registry) -> Result<Self, ProjectError> {
        let files = enumerate_sources(root, registry)?;
        Ok(Self::with_files(root, registry, files))
    }

    pub fn with_files(root: &Path, registry: &'r Registry, files: Vec<SourceFile>) -> Self {
        let by_path = files
            .iter()
            .enumerate()
            .map(|(i, f)| (f.path.clone(), i))
            .collect();
        let n = files.len();
        Self {
            root: root.to_path_buf(),
            registry,
            files,
            by_path,
            contents: (0..n).map(|_| OnceLock::new()).collect(),
            trees: (0..n).map(|_| OnceLock::new()).collect(),
            read_errors: Mutex::new(Vec::new()),
        }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn registry(&self) -> &'r Registry {
        self.registry
    }

    pub fn files(&self) -> &[SourceFile] {
        &self.files
    }

    pub fn ordinal(&self, path: &str) -> Option<usize> {
        self.by_path.get(path).copied()
    }

    pub fn language_of(&self, path: &str) -> Option<&'static str> {
        self.ordinal(path).map(|i| self.files[i].language)
    }

    /// File bytes, or `None` (with a diagnostic) when unreadable.
    pub fn contents(&self, ordinal: usize) -> Option<Arc<Vec<u8>>> {
        self.contents[ordinal]
            .get_or_init(|| {
                let path = &self.files[ordinal].path;
                match std::fs::read(self.root.join(path)) {
                    Ok(bytes) => Some(Arc::new(bytes)),
                    Err(e) => {
                        self.read_errors
                            .lock()
                            .expect("read error list poisoned")
                            .push(Diagnostic::new(
                                path.clone(),
                                1,
                                format!("cannot read file: {e}"),
                            ));
                        None
                    }
                }
            })
            .clone()
    }

    pub fn tree(&self, ordinal: usize) -> Option<Arc<ParseResult>> {
        self.trees[ordinal]
            .get_or_init(|| {
                let bytes = self.contents(ordinal)?;
                let file = &self.files[ordinal];
                let fe = self.registry.get(file.language)?;
                Some(Arc::new(parse_with(fe, &file.path, &bytes)))
            })
            .clone()
    }

    pub fn tree_for(&self, path: &str) -> Option<Arc<ParseResult>> {
        self.tree(self.ordinal(path)?)
    }

    /// Whether the tree of `ordinal` has been parsed already.
    pub fn is_parsed(&self, ordinal: usize) -> bool {
        self.trees[ordinal].get().is_some()
    }

    pub fn read_errors(&self) -> Vec<Diagnostic> {
        self.read_errors
            .lock()
            .expect("read error list poisoned")
            .clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_is_sorted_and_skips_hidden_and_unclaimed() {
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path();
        for p in [
            "b.py",
            "a/Z.java",
            "a/x.py",
            ".git/h.py",
            "a/.cache/c.py",
            "notes.txt",
        ] {
            let full = root.join(p);
            std::fs::create_dir_all(full.parent().unwrap()).unwrap();
            std::fs::write(full, "").unwrap();
        }
        let reg = Registry::standard();
        let files = enumerate_sources(root, &reg).unwrap();
        let paths: Vec<_> = files.iter().map(|f| f.path.as_str()).collect();
        assert_eq!(paths, ["a/Z.java", "a/x.py", "b.py"]);
        assert_eq!(files[0].language, "java-subset");
    }

    #[test]
    fn missing_root_is_an_error() {
        let reg = Registry::standard();
        let err = enumerate_sources(Path::new("/definitely/not/here"), &reg).unwrap_err();
        assert!(matches!(err, ProjectError::MissingRoot(_)));
    }

    #[test]
    fn trees_are_cached() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("m.py"), "x = 1\n").unwrap();
        let reg = Registry::standard();
        let project = Project::open(dir.path(), &reg).unwrap();
        assert!(!project.is_parsed(0));
        let a = project.tree_for("m.py").unwrap();
        let b = project.tree(0).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
    }
}
