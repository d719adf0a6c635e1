//! Loading extracted-literature records (NDJSON, one record per line) into a
//! [`Graph`], with key-based deduplication and advisory schema checks.

mod apply;
mod enrich;
mod record;

use std::fs::File;
use std::io::{self, BufRead, BufReader};
use std::path::Path;

use log::warn;
use serde::Serialize;
use thiserror::Error;

use crate::graph::Graph;
use crate::schema::SchemaDef;

pub use apply::{apply_record, ApplyError, ApplyOutcome, IngestOptions, Ingestor};
pub use enrich::{
    enrich_locations, DescriptionSource, EnrichError, OfflineDescriptions, WikidataClient,
    WIKIDATA_ENDPOINT, WIKIDATA_ENDPOINT_ENV,
};
pub use record::{parse_record, EntityKey, IngestRecord, RecordError};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct IngestStats {
    /// Non-blank lines seen.
    pub records_read: u64,
    pub nodes_created: u64,
    pub nodes_merged: u64,
    pub edges_created: u64,
    /// Relation records matching an existing edge, and deduplicated mentions.
    pub edges_merged: u64,
    /// Records refused by strict mode.
    pub rejected: u64,
    /// Lines that failed to parse or referenced an unknown key.
    pub errors: u64,
    /// Error-level schema violations reported.
    pub violations: u64,
    pub warnings: u64,
}

impl IngestStats {
    fn count(&mut self, record_is_node: bool, outcome: &ApplyOutcome) {
        let (created, merged) = if record_is_node {
            (&mut self.nodes_created, &mut self.nodes_merged)
        } else {
            (&mut self.edges_created, &mut self.edges_merged)
        };
        match outcome {
            ApplyOutcome::Created(_) => *created += 1,
            ApplyOutcome::Merged(_) => *merged += 1,
            ApplyOutcome::Rejected(_) => self.rejected += 1,
        }
        for v in outcome.violations() {
            if v.is_error() {
                self.violations += 1;
            } else {
                self.warnings += 1;
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("I/O failure while reading corpus: {0}")]
    IoFailure(#[from] io::Error),
}

/// Applies every line of `reader` in order. Bad records are logged and
/// counted; only read failures abort.
pub fn ingest_reader<R: BufRead>(
    graph: &mut Graph,
    schema: &SchemaDef,
    reader: R,
    options: IngestOptions,
) -> Result<IngestStats, IngestError> {
    let mut ingestor = Ingestor::new(graph, schema, options);
    let mut stats = IngestStats::default();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        stats.records_read += 1;
        let record = match parse_record(&line, idx + 1) {
            Ok(r) => r,
            Err(e) => {
                warn!("skipping record: {e}");
                stats.errors += 1;
                continue;
            }
        };
        let is_node = matches!(record, IngestRecord::Entity { .. } | IngestRecord::Paper { .. });
        match ingestor.apply(record) {
            Ok(outcome) => stats.count(is_node, &outcome),
            Err(e) => {
                warn!("line {}: {e}", idx + 1);
                stats.errors += 1;
            }
        }
    }
    Ok(stats)
}

pub fn ingest_file(
    graph: &mut Graph,
    schema: &SchemaDef,
    path: impl AsRef<Path>,
    options: IngestOptions,
) -> Result<IngestStats, IngestError> {
    let file = File::open(path)?;
    ingest_reader(graph, schema, BufReader::new(file), options)
}
