#![allow(dead_code)]

use std::path::PathBuf;

use coreshare::graph::{parse_graph, parse_weights, Graph};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

pub fn fixture(name: &str) -> Graph {
    let path = fixture_path(&format!("{name}.graph"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    parse_graph(&text).unwrap()
}

/// Weights of the fig2 fixture from `fig2.weights`.
pub fn fig2_weights(g: &Graph) -> Vec<u64> {
    let text = std::fs::read_to_string(fixture_path("fig2.weights")).unwrap();
    parse_weights(g, &text).unwrap()
}
