//! Workloads shared by the benchmarks.

use std::path::PathBuf;

use climakg_core::ingest::{ingest_file, IngestOptions};
use climakg_core::{builtin_climate_schema, Graph, Properties, PropertyValue};

pub const QUERIES: [&str; 3] = ["events_at_location", "model_teleconnection_region", "teleconnection_country"];

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures")
}

pub fn query_text(name: &str) -> String {
    std::fs::read_to_string(fixtures().join(format!("queries/{name}.cypher"))).expect("query fixture")
}

pub fn corpus_bytes() -> Vec<u8> {
    std::fs::read(fixtures().join("climate_corpus.ndjson")).expect("corpus fixture")
}

pub fn corpus_graph() -> Graph {
    let mut g = Graph::new();
    ingest_file(&mut g, &builtin_climate_schema(), fixtures().join("climate_corpus.ndjson"), IngestOptions::default())
        .expect("corpus ingests");
    g
}

/// `n` Location nodes named `LOC_<i>`, each with one outgoing edge, so label
/// scans are large and Name lookups are unique.
pub fn location_graph(n: u64) -> Graph {
    let mut g = Graph::new();
    for i in 0..n {
        let mut p = Properties::new();
        p.insert("Name".into(), PropertyValue::Text(format!("LOC_{i}")));
        g.add_node(["Location"], p).expect("valid node");
    }
    for i in 0..n {
        let a = climakg_core::NodeId(i);
        let b = climakg_core::NodeId((i * 7 + 1) % n);
        g.add_relationship(a, b, "Near", Properties::new()).expect("valid edge");
    }
    g
}
