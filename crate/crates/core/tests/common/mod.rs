//! Shared helpers for integration tests.

#![allow(dead_code)]

pub mod oracle;

use std::fs;
use std::path::PathBuf;

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

/// Every fixture as (path relative to the fixtures dir, text), sorted.
pub fn corpus() -> Vec<(String, String)> {
    let root = fixtures_dir();
    let mut out = Vec::new();
    for sub in ["", "worked"] {
        let dir = root.join(sub);
        for entry in fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.extension().is_some_and(|e| e == "sol") {
                let rel = path.strip_prefix(&root).unwrap().to_string_lossy().replace('\\', "/");
                out.push((rel, fs::read_to_string(&path).unwrap()));
            }
        }
    }
    out.sort();
    out
}

pub fn fixture(rel: &str) -> String {
    fs::read_to_string(fixtures_dir().join(rel)).unwrap_or_else(|e| panic!("{rel}: {e}"))
}
