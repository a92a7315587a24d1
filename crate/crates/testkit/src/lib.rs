//! Fixture projects, golden files, brute-force oracles and random input
//! generators shared by the depminer test suites.

use std::path::{Path, PathBuf};

use depminer_core::model::Granularity;

pub mod generate;
pub mod oracle;

pub const PYTHON_FIXTURES: [&str; 3] = ["py_shop", "py_graphs", "py_scripts"];
pub const JAVA_FIXTURES: [&str; 3] = ["java_bank", "java_shapes", "java_events"];

pub fn fixtures() -> impl Iterator<Item = &'static str> {
    PYTHON_FIXTURES.into_iter().chain(JAVA_FIXTURES)
}

pub fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn fixture(name: &str) -> PathBuf {
    fixtures_dir().join(name)
}

pub fn golden(name: &str, granularity: Granularity) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("golden")
        .join(name)
        .join(format!("{granularity}.json"))
}

/// Whether goldens should be rewritten instead of compared.
pub fn update_golden() -> bool {
    std::env::var_os("UPDATE_GOLDEN").is_some_and(|v| v != "0")
}

/// Recursively copies a fixture into `dest` (which must exist).
pub fn copy_fixture(name: &str, dest: &Path) {
    copy_dir(&fixture(name), dest);
}

fn copy_dir(from: &Path, to: &Path) {
    std::fs::create_dir_all(to).expect("create copy target");
    for entry in std::fs::read_dir(from).expect("read fixture dir") {
        let entry = entry.expect("fixture entry");
        let target = to.join(entry.file_name());
        if entry.file_type().expect("file type").is_dir() {
            copy_dir(&entry.path(), &target);
        } else {
            std::fs::copy(entry.path(), &target).expect("copy fixture file");
        }
    }
}
