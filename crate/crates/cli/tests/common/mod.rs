#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

pub fn depminer() -> Command {
    Command::new(env!("CARGO_BIN_EXE_depminer"))
}

/// Runs `depminer` with `args` from `cwd`.
pub fn run_in(cwd: &Path, args: &[&str]) -> Output {
    depminer()
        .current_dir(cwd)
        .args(args)
        .output()
        .expect("spawn depminer")
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

pub fn assert_ok(out: &Output) {
    assert!(out.status.success(), "depminer failed: {}", stderr(out));
}

pub fn read(path: &Path) -> Vec<u8> {
    std::fs::read(path).unwrap_or_else(|e| panic!("read {}: {e}", path.display()))
}
