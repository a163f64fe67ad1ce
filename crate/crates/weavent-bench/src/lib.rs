//! Fixture loading shared by the benchmarks.

use std::path::PathBuf;

use weavent::io;
use weavent::rewrite::Grammar;
use weavent::{EventStructure, FiniteDomain};

fn fixture(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn es(name: &str) -> EventStructure {
    io::parse_es(&fixture(&format!("{name}.es.json"))).expect("valid fixture")
}

pub fn domain(name: &str) -> FiniteDomain {
    io::parse_domain(&fixture(&format!("{name}.domain.json"))).expect("valid fixture")
}

pub fn grammar(name: &str) -> Grammar {
    io::parse_grammar(&fixture(&format!("{name}.grammar.json"))).expect("valid fixture")
}
