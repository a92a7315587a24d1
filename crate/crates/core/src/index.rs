//! Project-wide inverted index from identifier tokens to their occurrences,
//! with a versioned little-endian binary encoding.
//!
//! Layout: `"DMIX"`, version `u32`, file count `u32`, then per file
//! (path length `u32`, path bytes, XXH64 digest `u64`, byte length `u64`),
//! token count `u32`, then per token (length `u32`, bytes, posting count
//! `u32`, postings of file ordinal `u32`, line `u32`, occurrence `u8`).

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use thiserror::Error;
use twox_hash::XxHash64;

use crate::frontend::{classify, FrontEndDescriptor, NodeClass, ParseResult, Registry};
use crate::model::Diagnostic;

pub const MAGIC: &[u8; 4] = b"DMIX";
pub const VERSION: u32 = 1;

/// How a token occurs at a posting. The discriminant is the on-disk code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Occurrence {
    Other = 0,
    Declaration = 1,
    Usage = 2,
}

impl Occurrence {
    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(Occurrence::Other),
            1 => Some(Occurrence::Declaration),
            2 => Some(Occurrence::Usage),
            _ => None,
        }
    }
}

impl From<NodeClass> for Occurrence {
    fn from(c: NodeClass) -> Self {
        match c {
            NodeClass::Declaration => Occurrence::Declaration,
            NodeClass::Usage => Occurrence::Usage,
            NodeClass::Other => Occurrence::Other,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TokenPosting {
    pub file: u32,
    pub line: u32,
    pub occurrence: Occurrence,
}

/// XXH64 (seed 0) of the content plus its length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FileFingerprint {
    pub hash: u64,
    pub byte_length: u64,
}

pub fn fingerprint(content: &[u8]) -> FileFingerprint {
    FileFingerprint {
        hash: XxHash64::oneshot(0, content),
        byte_length: content.len() as u64,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct FileEntry {
    pub path: String,
    pub fingerprint: FileFingerprint,
}

/// Token occurrences of a single file, before ordinals are assigned.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilePostings {
    pub path: String,
    pub fingerprint: FileFingerprint,
    pub tokens: BTreeMap<String, BTreeSet<(u32, Occurrence)>>,
}

impl FilePostings {
    /// One entry per identifier-bearing node, deduplicated per
    /// `(token, line, occurrence)`.
    pub fn extract(
        tree: &ParseResult,
        descriptor: &FrontEndDescriptor,
        fingerprint: FileFingerprint,
    ) -> Self {
        let mut tokens: BTreeMap<String, BTreeSet<(u32, Occurrence)>> = BTreeMap::new();
        tree.root.walk(&mut |node| {
            if let Some(id) = &node.identifier {
                let occ = Occurrence::from(classify(node, descriptor));
                tokens
                    .entry(id.clone())
                    .or_default()
                    .insert((node.span.start, occ));
            }
        });
        Self {
            path: tree.path.clone(),
            fingerprint,
            tokens,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IndexError {
    #[error("not an index file")]
    NotAnIndex,
    #[error("version mismatch: found {found}, supported {VERSION}")]
    VersionMismatch { found: u32 },
    #[error("corrupt index: {0}")]
    Corrupt(String),
    #[error("duplicate path `{0}` in index input")]
    DuplicatePath(String),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TokenIndex {
    files: Vec<FileEntry>,
    postings: BTreeMap<String, Vec<TokenPosting>>,
}

impl TokenIndex {
    /// Merges per-file postings. The result does not depend on input order.
    pub fn from_files(mut files: Vec<FilePostings>) -> Result<Self, IndexError> {
        files.sort_by(|a, b| a.path.cmp(&b.path));
        if let Some(w) = files.windows(2).find(|w| w[0].path == w[1].path) {
            return Err(IndexError::DuplicatePath(w[0].path.clone()));
        }
        let mut postings: BTreeMap<String, Vec<TokenPosting>> = BTreeMap::new();
        let mut entries = Vec::with_capacity(files.len());
        for (ordinal, f) in files.into_iter().enumerate() {
            for (token, occ) in f.tokens {
                let list = postings.entry(token).or_default();
                list.extend(occ.into_iter().map(|(line, occurrence)| TokenPosting {
                    file: ordinal as u32,
                    line,
                    occurrence,
                }));
            }
            entries.push(FileEntry {
                path: f.path,
                fingerprint: f.fingerprint,
            });
        }
        Ok(Self {
            files: entries,
            postings,
        })
    }

    pub fn files(&self) -> &[FileEntry] {
        &self.files
    }

    pub fn file_path(&self, ordinal: u32) -> &str {
        &self.files[ordinal as usize].path
    }

    pub fn token_count(&self) -> usize {
        self.postings.len()
    }

    pub fn tokens(&self) -> impl Iterator<Item = (&str, &[TokenPosting])> {
        self.postings
            .iter()
            .map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    /// All postings of `token`, sorted by `(file, line, occurrence)`.
    pub fn query(&self, token: &str) -> &[TokenPosting] {
        self.postings.get(token).map_or(&[], Vec::as_slice)
    }

    /// Splits the index back into per-file postings.
    pub fn into_file_postings(self) -> Vec<FilePostings> {
        let mut out: Vec<FilePostings> = self
            .files
            .into_iter()
            .map(|f| FilePostings {
                path: f.path,
                fingerprint: f.fingerprint,
                tokens: BTreeMap::new(),
            })
            .collect();
        for (token, list) in self.postings {
            for p in list {
                out[p.file as usize]
                    .tokens
                    .entry(token.clone())
                    .or_default()
                    .insert((p.line, p.occurrence));
            }
        }
        out
    }

    pub fn serialize(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        put_u32(&mut out, VERSION);
        put_u32(&mut out, self.files.len() as u32);
        for f in &self.files {
            put_u32(&mut out, f.path.len() as u32);
            out.extend_from_slice(f.path.as_bytes());
            out.extend_from_slice(&f.fingerprint.hash.to_le_bytes());
            out.extend_from_slice(&f.fingerprint.byte_length.to_le_bytes());
        }
        put_u32(&mut out, self.postings.len() as u32);
        for (token, list) in &self.postings {
            put_u32(&mut out, token.len() as u32);
            out.extend_from_slice(token.as_bytes());
            put_u32(&mut out, list.len() as u32);
            for p in list {
                put_u32(&mut out, p.file);
                put_u32(&mut out, p.line);
                out.push(p.occurrence.code());
            }
        }
        out
    }

    /// Decodes and validates an index, including its ordering invariants.
    pub fn deserialize(bytes: &[u8]) -> Result<Self, IndexError> {
        if bytes.len() < 4 || &bytes[..4] != MAGIC {
            return Err(IndexError::NotAnIndex);
        }
        let mut r = Reader { bytes, pos: 4 };
        let version = r.u32("version")?;
        if version != VERSION {
            return Err(IndexError::VersionMismatch { found: version });
        }
        let file_count = r.u32("file count")?;
        let mut files: Vec<FileEntry> = Vec::new();
        for _ in 0..file_count {
            let path = r.string("file path")?;
            let hash = r.u64("fingerprint")?;
            let byte_length = r.u64("byte length")?;
            if files.last().is_some_and(|prev| prev.path >= path) {
                return Err(corrupt(format!("file table not sorted at `{path}`")));
            }
            files.push(FileEntry {
                path,
                fingerprint: FileFingerprint { hash, byte_length },
            });
        }
        let token_count = r.u32("token count")?;
        let mut postings = BTreeMap::new();
        let mut prev_token: Option<String> = None;
        for _ in 0..token_count {
            let token = r.string("token")?;
            if prev_token.as_ref().is_some_and(|p| *p >= token) {
                return Err(corrupt(format!("tokens not sorted at `{token}`")));
            }
            let n = r.u32("posting count")?;
            let mut list: Vec<TokenPosting> = Vec::new();
            for _ in 0..n {
                let file = r.u32("file ordinal")?;
                let line = r.u32("line")?;
                let code = r.u8("occurrence")?;
                let occurrence = Occurrence::from_code(code)
                    .ok_or_else(|| corrupt(format!("bad occurrence code {code}")))?;
                if file >= file_count || line == 0 {
                    return Err(corrupt(format!("posting ({file}, {line}) out of range")));
                }
                let p = TokenPosting {
                    file,
                    line,
                    occurrence,
                };
                if list.last().is_some_and(|prev| *prev >= p) {
                    return Err(corrupt(format!("postings of `{token}` not sorted")));
                }
                list.push(p);
            }
            prev_token = Some(token.clone());
            postings.insert(token, list);
        }
        if r.pos != bytes.len() {
            return Err(corrupt(format!("{} trailing bytes", bytes.len() - r.pos)));
        }
        Ok(Self { files, postings })
    }
}

fn put_u32(out: &mut Vec<u8>, v: u32) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn corrupt(msg: impl Into<String>) -> IndexError {
    IndexError::Corrupt(msg.into())
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, n: usize, what: &str) -> Result<&[u8], IndexError> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| corrupt(format!("truncated while reading {what}")))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self, what: &str) -> Result<u8, IndexError> {
        Ok(self.take(1, what)?[0])
    }

    fn u32(&mut self, what: &str) -> Result<u32, IndexError> {
        Ok(u32::from_le_bytes(
            self.take(4, what)?.try_into().expect("4 bytes"),
        ))
    }

    fn u64(&mut self, what: &str) -> Result<u64, IndexError> {
        Ok(u64::from_le_bytes(
            self.take(8, what)?.try_into().expect("8 bytes"),
        ))
    }

    fn string(&mut self, what: &str) -> Result<String, IndexError> {
        let n = self.u32(what)? as usize;
        let raw = self.take(n, what)?;
        String::from_utf8(raw.to_vec()).map_err(|_| corrupt(format!("{what} is not UTF-8")))
    }
}

/// Builds an index from in-memory `(path, content)` pairs. Files no
/// front-end claims are skipped with a diagnostic.
pub fn build_index(
    files: &[(String, Vec<u8>)],
    registry: &Registry,
) -> (TokenIndex, Vec<Diagnostic>) {
    let mut diagnostics = Vec::new();
    let mut per_file = Vec::new();
    for (path, content) in files {
        let Some(tree) = registry.parse_bytes(path, content) else {
            diagnostics.push(Diagnostic::new(
                path.clone(),
                1,
                "no front-end claims this file",
            ));
            continue;
        };
        let descriptor = registry
            .descriptor(tree.language)
            .expect("registered language");
        per_file.push(FilePostings::extract(
            &tree,
            descriptor,
            fingerprint(content),
        ));
        diagnostics.extend(tree.diagnostics);
    }
    let index = TokenIndex::from_files(per_file).unwrap_or_else(|e| {
        diagnostics.push(Diagnostic::new("", 1, e.to_string()));
        TokenIndex::default()
    });
    diagnostics.sort();
    (index, diagnostics)
}

/// Where the index of the project at `canonical_root` is cached.
pub fn cache_file(cache_dir: &Path, canonical_root: &Path) -> PathBuf {
    let key = XxHash64::oneshot(0, canonical_root.to_string_lossy().as_bytes());
    cache_dir.join(format!("{key:016x}.dmix"))
}

/// Reads a cached index; any failure is logged and treated as a miss.
pub fn load_cached(path: &Path) -> Option<TokenIndex> {
    let bytes = std::fs::read(path).ok()?;
    match TokenIndex::deserialize(&bytes) {
        Ok(index) => Some(index),
        Err(e) => {
            log::warn!("ignoring cached index {}: {e}", path.display());
            None
        }
    }
}

/// Writes `index` atomically (temp file plus rename).
pub fn store_cached(path: &Path, index: &TokenIndex) -> std::io::Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    std::fs::write(&tmp, index.serialize())?;
    std::fs::rename(&tmp, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn build(files: &[(&str, &str)]) -> TokenIndex {
        let files: Vec<_> = files
            .iter()
            .map(|(p, c)| (p.to_string(), c.as_bytes().to_vec()))
            .collect();
        build_index(&files, &Registry::standard()).0
    }

    fn p(file: u32, line: u32, occurrence: Occurrence) -> TokenPosting {
        TokenPosting {
            file,
            line,
            occurrence,
        }
    }

    #[test]
    fn empty_index_is_sixteen_bytes() {
        let index = build(&[]);
        assert!(index.files().is_empty());
        let bytes = index.serialize();
        assert_eq!(bytes.len(), 16);
        assert_eq!(&bytes[..4], b"DMIX");
        assert_eq!(TokenIndex::deserialize(&bytes).unwrap(), index);
    }

    #[test]
    fn postings_for_assignment() {
        let index = build(&[("m.py", "x = 1\ny = x\n")]);
        assert_eq!(
            index.query("x"),
            [p(0, 1, Occurrence::Declaration), p(0, 2, Occurrence::Usage)]
        );
        assert_eq!(index.query("y"), [p(0, 2, Occurrence::Declaration)]);
        assert!(index.query("zzz").is_empty());
    }

    #[test]
    fn two_files_declaring_the_same_class() {
        let index = build(&[("b.py", "class A: pass\n"), ("a.py", "class A: pass\n")]);
        assert_eq!(index.file_path(0), "a.py");
        assert_eq!(
            index.query("A"),
            [
                p(0, 1, Occurrence::Declaration),
                p(1, 1, Occurrence::Declaration)
            ]
        );
        let again = TokenIndex::deserialize(&index.serialize()).unwrap();
        assert_eq!(again, index);
    }

    #[test]
    fn decode_errors_are_distinct() {
        let index = build(&[("m.py", "x = 1\ny = x\n")]);
        let bytes = index.serialize();
        let mut bad = bytes.clone();
        bad[..4].copy_from_slice(b"XXXX");
        assert_eq!(TokenIndex::deserialize(&bad), Err(IndexError::NotAnIndex));
        let mut bad = bytes.clone();
        bad[4] = 2;
        assert_eq!(
            TokenIndex::deserialize(&bad),
            Err(IndexError::VersionMismatch { found: 2 })
        );
        assert!(matches!(
            TokenIndex::deserialize(&bytes[..bytes.len() - 3]),
            Err(IndexError::Corrupt(_))
        ));
        let mut long = bytes.clone();
        long.push(0);
        assert!(matches!(
            TokenIndex::deserialize(&long),
            Err(IndexError::Corrupt(_))
        ));
    }

    #[test]
    fn fingerprints() {
        assert_eq!(fingerprint(b"abc"), fingerprint(b"abc"));
        assert_ne!(fingerprint(b"abc").hash, fingerprint(b"abd").hash);
        let empty = fingerprint(b"");
        assert_eq!(empty.byte_length, 0);
        assert_eq!(empty.hash, 0xef46_db37_51d8_e999);
    }

    #[test]
    fn file_postings_round_trip() {
        let index = build(&[("a.py", "def f():\n    return g()\n"), ("b.py", "g = 1\n")]);
        let again = TokenIndex::from_files(index.clone().into_file_postings()).unwrap();
        assert_eq!(again, index);
    }

    #[test]
    fn cache_file_name_is_stable() {
        let a = cache_file(Path::new("/c"), Path::new("/p/one"));
        assert_eq!(a, cache_file(Path::new("/c"), Path::new("/p/one")));
        assert_ne!(a, cache_file(Path::new("/c"), Path::new("/p/two")));
        assert!(a.to_string_lossy().ends_with(".dmix"));
    }
}
