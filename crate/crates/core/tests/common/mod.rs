#![allow(dead_code)]

pub mod gen;
pub mod oracle;

use std::path::PathBuf;

use paw_core::kernel::FlatSpec;
use paw_core::syntax::{flatten_roots, parse_spec, ModuleSet};

pub fn corpus_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .join(name)
}

pub fn corpus(name: &str) -> String {
    std::fs::read_to_string(corpus_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn modules(files: &[&str]) -> ModuleSet {
    let mut ms = ModuleSet::default();
    for f in files {
        ms.extend(parse_spec(&corpus(f)).unwrap_or_else(|e| panic!("{f}: {e}")));
    }
    ms
}

pub fn load(files: &[&str], root: Option<&str>) -> FlatSpec {
    flatten_roots(&modules(files), root).unwrap()
}
