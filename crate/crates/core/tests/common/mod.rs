#![allow(dead_code)]

pub mod criteria;
pub mod gen;
pub mod oracle;

use std::path::PathBuf;

use climakg_core::ingest::{ingest_file, IngestOptions};
use climakg_core::{builtin_climate_schema, Graph};

pub fn fixture_path(name: &str) -> PathBuf {
    // resolves from any workspace crate that includes this module
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

pub fn query_text(name: &str) -> String {
    std::fs::read_to_string(fixture_path(&format!("queries/{name}.cypher"))).unwrap()
}

/// The three conformance queries by file stem.
pub const QUERIES: [&str; 3] = ["events_at_location", "model_teleconnection_region", "teleconnection_country"];

pub fn corpus_graph() -> Graph {
    let mut g = Graph::new();
    let stats = ingest_file(
        &mut g,
        &builtin_climate_schema(),
        fixture_path("climate_corpus.ndjson"),
        IngestOptions::default(),
    )
    .unwrap();
    assert_eq!(stats.errors, 0);
    g
}
