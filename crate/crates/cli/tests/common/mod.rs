//! Helpers for driving the `spectune` binary.

#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

pub fn spectune(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spectune"))
        .args(args)
        .output()
        .expect("binary runs")
}

pub fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

pub fn path(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

/// Runs and panics with the captured stderr unless the command succeeded.
pub fn ok(args: &[&str]) -> Output {
    let out = spectune(args);
    assert_eq!(code(&out), 0, "spectune {args:?} failed: {}", stderr(&out));
    out
}

/// A small config for fast `tune`/`grid` runs on synthetic spheres.
pub const SMALL_CONFIG: &str =
    "phantom=spheres\nphantom_size=32\nslices=2\nangles=30\nnoise_counts=10000\nseed=5\n";
