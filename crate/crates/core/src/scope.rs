//! Analysis scope: path globs plus per-file line-range exclusions.

use std::path::Path;

use globset::{Glob, GlobBuilder, GlobSet, GlobSetBuilder};
use serde::Deserialize;
use serde_json::Value;
use thiserror::Error;

use crate::model::LocationMarker;

#[derive(Debug, Error)]
pub enum ScopeError {
    #[error("cannot read scope file {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed scope document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid glob in `{field}`: {source}")]
    Glob {
        field: String,
        source: globset::Error,
    },
    #[error("invalid range in `{field}`: {message}")]
    Range { field: String, message: String },
    #[error("invalid `{field}`: {message}")]
    Field { field: String, message: String },
}

/// Line range excluded from one file.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct LineExclusion {
    pub path: String,
    pub start_line: u32,
    pub end_line: u32,
}

#[derive(Debug, Clone)]
pub struct AnalysisScope {
    include: Vec<String>,
    exclude: Vec<String>,
    exclude_lines: Vec<LineExclusion>,
    include_set: GlobSet,
    exclude_set: GlobSet,
}

impl Default for AnalysisScope {
    fn default() -> Self {
        Self::new(vec!["**".to_string()], Vec::new(), Vec::new()).expect("default scope is valid")
    }
}

fn glob(pattern: &str) -> Result<Glob, globset::Error> {
    GlobBuilder::new(pattern).literal_separator(true).build()
}

fn glob_set(patterns: &[String], field: &str) -> Result<GlobSet, ScopeError> {
    let mut builder = GlobSetBuilder::new();
    for (i, p) in patterns.iter().enumerate() {
        builder.add(glob(p).map_err(|source| ScopeError::Glob {
            field: format!("{field}[{i}]"),
            source,
        })?);
    }
    builder.build().map_err(|source| ScopeError::Glob {
        field: field.to_string(),
        source,
    })
}

impl AnalysisScope {
    pub fn new(
        include: Vec<String>,
        exclude: Vec<String>,
        exclude_lines: Vec<LineExclusion>,
    ) -> Result<Self, ScopeError> {
        for (i, r) in exclude_lines.iter().enumerate() {
            let field = format!("excludeLines[{i}]");
            if r.start_line < 1 {
                return Err(ScopeError::Range {
                    field,
                    message: "startLine must be >= 1".into(),
                });
            }
            if r.end_line < r.start_line {
                return Err(ScopeError::Range {
                    field,
                    message: format!(
                        "endLine {} is before startLine {}",
                        r.end_line, r.start_line
                    ),
                });
            }
            if r.path.is_empty() {
                return Err(ScopeError::Range {
                    field: format!("{field}.path"),
                    message: "path is empty".into(),
                });
            }
        }
        Ok(Self {
            include_set: glob_set(&include, "include")?,
            exclude_set: glob_set(&exclude, "exclude")?,
            include,
            exclude,
            exclude_lines,
        })
    }

    /// Parses a scope document. Missing fields take their defaults.
    pub fn from_json(text: &str) -> Result<Self, ScopeError> {
        let doc: Value = serde_json::from_str(text)?;
        let Value::Object(map) = doc else {
            return Err(field_error("<document>", "expected a JSON object"));
        };
        let mut include = vec!["**".to_string()];
        let mut exclude = Vec::new();
        let mut exclude_lines = Vec::new();
        for (key, value) in map {
            match key.as_str() {
                "include" => include = strings(&key, value)?,
                "exclude" => exclude = strings(&key, value)?,
                "excludeLines" => {
                    let Value::Array(items) = value else {
                        return Err(field_error(&key, "expected an array"));
                    };
                    for (i, item) in items.into_iter().enumerate() {
                        let field = format!("excludeLines[{i}]");
                        exclude_lines.push(
                            serde_json::from_value(item)
                                .map_err(|e| field_error(&field, e.to_string()))?,
                        );
                    }
                }
                _ => return Err(field_error(&key, "unknown field")),
            }
        }
        Self::new(include, exclude, exclude_lines)
    }

    pub fn include(&self) -> &[String] {
        &self.include
    }

    pub fn exclude(&self) -> &[String] {
        &self.exclude
    }

    pub fn exclude_lines(&self) -> &[LineExclusion] {
        &self.exclude_lines
    }

    /// Whether `path` passes the include and exclude globs.
    pub fn includes_path(&self, path: &str) -> bool {
        self.include_set.is_match(path) && !self.exclude_set.is_match(path)
    }

    /// Whether `range` intersects an excluded line range of its file.
    pub fn excludes_lines(&self, range: &LocationMarker) -> bool {
        self.exclude_lines
            .iter()
            .any(|r| r.path == range.path && range.intersects_lines(r.start_line, r.end_line))
    }

    pub fn includes(&self, path: &str, range: Option<&LocationMarker>) -> bool {
        self.includes_path(path) && !range.is_some_and(|r| self.excludes_lines(r))
    }
}

fn field_error(field: &str, message: impl Into<String>) -> ScopeError {
    ScopeError::Field {
        field: field.to_string(),
        message: message.into(),
    }
}

fn strings(field: &str, value: Value) -> Result<Vec<String>, ScopeError> {
    let Value::Array(items) = value else {
        return Err(field_error(field, "expected an array of strings"));
    };
    items
        .into_iter()
        .enumerate()
        .map(|(i, v)| match v {
            Value::String(s) => Ok(s),
            _ => Err(field_error(&format!("{field}[{i}]"), "expected a string")),
        })
        .collect()
}

/// Loads a scope file, or the all-inclusive default when `path` is `None`.
pub fn load_scope(path: Option<&Path>) -> Result<AnalysisScope, ScopeError> {
    let Some(path) = path else {
        return Ok(AnalysisScope::default());
    };
    let text = std::fs::read_to_string(path).map_err(|source| ScopeError::Io {
        path: path.display().to_string(),
        source,
    })?;
    AnalysisScope::from_json(&text)
}
