//! JSON shapes shared by the HTTP API and the CLI's ndjson output.

use climakg_core::engine::{Cell, ResultTable, Subgraph};
use climakg_core::{Graph, NodeId, Properties, RelId};
use serde::{Deserialize, Serialize};

pub const DEFAULT_LIMIT: u64 = 1000;

#[derive(Debug, Clone, Deserialize)]
pub struct QueryRequest {
    pub query: String,
    #[serde(default)]
    pub limit: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodePayload {
    pub id: u64,
    pub labels: Vec<String>,
    pub properties: Properties,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgePayload {
    pub id: u64,
    #[serde(rename = "type")]
    pub rel_type: String,
    pub src: u64,
    pub dst: u64,
    pub properties: Properties,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SubgraphPayload {
    pub nodes: Vec<NodePayload>,
    pub edges: Vec<EdgePayload>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueryStats {
    pub rows_total: u64,
    pub truncated: bool,
    pub elapsed_ms: f64,
    pub nodes_touched: u64,
    pub type_mismatches: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueryResponse {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<serde_json::Value>>,
    pub subgraph: SubgraphPayload,
    pub stats: QueryStats,
}

pub fn node_payload(graph: &Graph, id: NodeId) -> Option<NodePayload> {
    let node = graph.node(id)?;
    Some(NodePayload {
        id: id.0,
        labels: node.labels.iter().cloned().collect(),
        properties: node.properties.clone(),
    })
}

pub fn edge_payload(graph: &Graph, id: RelId) -> Option<EdgePayload> {
    let rel = graph.relationship(id)?;
    Some(EdgePayload {
        id: id.0,
        rel_type: rel.rel_type.clone(),
        src: rel.src.0,
        dst: rel.dst.0,
        properties: rel.properties.clone(),
    })
}

/// Property values serialize as plain JSON; bound elements as their payload.
pub fn cell_json(graph: &Graph, cell: &Cell) -> serde_json::Value {
    let value = match cell {
        Cell::Null => return serde_json::Value::Null,
        Cell::Value(v) => serde_json::to_value(v),
        Cell::Node(id) => serde_json::to_value(node_payload(graph, *id)),
        Cell::Rel(id) => serde_json::to_value(edge_payload(graph, *id)),
    };
    value.unwrap_or(serde_json::Value::Null)
}

pub fn subgraph_payload(graph: &Graph, sub: &Subgraph) -> SubgraphPayload {
    SubgraphPayload {
        nodes: sub.nodes.iter().filter_map(|id| node_payload(graph, *id)).collect(),
        edges: sub.rels.iter().filter_map(|id| edge_payload(graph, *id)).collect(),
    }
}

/// Truncates `table` to `limit` rows and renders the response.
pub fn query_response(graph: &Graph, mut table: ResultTable, limit: u64, elapsed_ms: f64) -> QueryResponse {
    let rows_total = table.rows.len() as u64;
    let truncated = rows_total > limit;
    if truncated {
        table.truncate(limit as usize);
    }
    QueryResponse {
        rows: table
            .rows
            .iter()
            .map(|row| row.iter().map(|c| cell_json(graph, c)).collect())
            .collect(),
        subgraph: subgraph_payload(graph, &table.subgraph),
        columns: table.columns,
        stats: QueryStats {
            rows_total,
            truncated,
            elapsed_ms,
            nodes_touched: table.stats.nodes_touched,
            type_mismatches: table.stats.type_mismatches,
        },
    }
}
