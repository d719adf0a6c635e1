//! Rendering and loading helpers behind the `climakg` binary.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use climakg_core::ingest::{ingest_file, IngestOptions, IngestStats};
use climakg_core::schema::load_schema;
use climakg_core::{builtin_climate_schema, snapshot, Graph, QueryError, ResultTable, SchemaDef};
use climakg_service::wire::cell_json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad query, strict-mode rejection and similar; exit 1.
    #[error("{0}")]
    User(String),
    /// Unreadable files, bind failures; exit 2.
    #[error("{0}")]
    Env(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::User(_) => 1,
            CliError::Env(_) => 2,
        }
    }
}

pub fn load_schema_file(path: Option<&Path>) -> Result<SchemaDef, CliError> {
    let Some(path) = path else {
        return Ok(builtin_climate_schema());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Env(format!("cannot read schema {}: {e}", path.display())))?;
    load_schema(&text).map_err(|e| CliError::User(format!("{}: {e}", path.display())))
}

/// Where a command gets its graph from.
#[derive(Debug, Clone, Default)]
pub struct GraphSource {
    pub snapshot: Option<PathBuf>,
    pub corpus: Option<PathBuf>,
}

impl GraphSource {
    /// Snapshot wins when both are given; neither yields an empty graph.
    pub fn load(&self, schema: &SchemaDef) -> Result<Graph, CliError> {
        if let Some(path) = &self.snapshot {
            return snapshot::load(path)
                .map_err(|e| CliError::Env(format!("cannot load snapshot {}: {e}", path.display())));
        }
        let mut graph = Graph::new();
        if let Some(path) = &self.corpus {
            ingest_corpus(&mut graph, schema, path, IngestOptions::default())?;
        }
        Ok(graph)
    }
}

pub fn ingest_corpus(
    graph: &mut Graph,
    schema: &SchemaDef,
    path: &Path,
    options: IngestOptions,
) -> Result<IngestStats, CliError> {
    ingest_file(graph, schema, path, options)
        .map_err(|e| CliError::Env(format!("{}: {e}", path.display())))
}

/// Parse errors come back caret-annotated against `text`.
pub fn run(text: &str, graph: &Graph) -> Result<ResultTable, CliError> {
    climakg_core::run_query(text, graph).map_err(|e| match e {
        QueryError::Parse(p) => CliError::User(p.annotate(text)),
        QueryError::Plan(p) => CliError::User(format!("plan error: {p}")),
    })
}

/// Aligned text table; header only when there are no rows.
pub fn render_table(table: &ResultTable, graph: &Graph) -> String {
    table.render_table(graph)
}

/// One JSON object per row keyed by column name.
pub fn render_ndjson(table: &ResultTable, graph: &Graph) -> String {
    let mut out = String::new();
    for row in &table.rows {
        let obj: serde_json::Map<String, serde_json::Value> = table
            .columns
            .iter()
            .cloned()
            .zip(row.iter().map(|c| cell_json(graph, c)))
            .collect();
        out.push_str(&serde_json::Value::Object(obj).to_string());
        out.push('\n');
    }
    out
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"").replace('\n', " ")
}

/// Graphviz description of the result subgraph, ordered by id.
pub fn render_dot(table: &ResultTable, graph: &Graph) -> String {
    let mut out = String::from("digraph result {\n");
    for id in &table.subgraph.nodes {
        let Some(node) = graph.node(*id) else { continue };
        let labels: Vec<&str> = node.labels.iter().map(String::as_str).collect();
        let caption = node
            .property("Name")
            .or_else(|| node.property("title"))
            .map(|v| v.to_string())
            .unwrap_or_default();
        writeln!(
            out,
            "  n{} [label=\"{}\\n{}\"];",
            id,
            dot_escape(&labels.join(":")),
            dot_escape(&caption)
        )
        .unwrap();
    }
    for id in &table.subgraph.rels {
        let Some(rel) = graph.relationship(*id) else { continue };
        writeln!(out, "  n{} -> n{} [label=\"{}\"];", rel.src, rel.dst, dot_escape(&rel.rel_type)).unwrap();
    }
    out.push_str("}\n");
    out
}
