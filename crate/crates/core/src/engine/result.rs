use std::collections::BTreeSet;

use serde::Serialize;

use crate::graph::{Graph, NodeId, RelId};
use crate::value::PropertyValue;

use super::eval::Diagnostics;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Elem {
    Node(NodeId),
    Rel(RelId),
}

/// One output value. Bare variables project to the bound element itself.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Null,
    Value(PropertyValue),
    Node(NodeId),
    Rel(RelId),
}

impl Cell {
    pub fn as_text(&self) -> Option<&str> {
        match self {
            Cell::Value(v) => v.as_text(),
            _ => None,
        }
    }

    /// Short rendering used by table output.
    pub fn render(&self, graph: &Graph) -> String {
        match self {
            Cell::Null => "null".to_owned(),
            Cell::Value(v) => v.to_string(),
            Cell::Node(id) => match graph.node(*id) {
                Some(node) => {
                    let labels: Vec<&str> = node.labels.iter().map(String::as_str).collect();
                    format!("(#{}:{})", id, labels.join(":"))
                }
                None => format!("(#{id})"),
            },
            Cell::Rel(id) => match graph.relationship(*id) {
                Some(rel) => format!("[#{}:{}]", id, rel.rel_type),
                None => format!("[#{id}]"),
            },
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Subgraph {
    pub nodes: BTreeSet<NodeId>,
    pub rels: BTreeSet<RelId>,
}

impl Subgraph {
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty() && self.rels.is_empty()
    }

    pub fn from_rows(rows: &[Vec<Elem>]) -> Self {
        let mut sub = Subgraph::default();
        for elem in rows.iter().flatten() {
            match *elem {
                Elem::Node(id) => {
                    sub.nodes.insert(id);
                }
                Elem::Rel(id) => {
                    sub.rels.insert(id);
                }
            }
        }
        sub
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ExecStats {
    /// Candidate nodes examined by scans.
    pub nodes_touched: u64,
    pub type_mismatches: u64,
}

impl ExecStats {
    pub(crate) fn absorb(&mut self, diag: Diagnostics) {
        self.type_mismatches += diag.type_mismatches;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Every element bound in a surviving row, anonymous pattern parts included.
    pub subgraph: Subgraph,
    pub stats: ExecStats,
    pub(crate) row_elements: Vec<Vec<Elem>>,
}

impl ResultTable {
    /// Elements bound by each row, in row order.
    pub fn row_elements(&self) -> &[Vec<Elem>] {
        &self.row_elements
    }

    /// Keeps the first `limit` rows; the subgraph shrinks to match.
    pub fn truncate(&mut self, limit: usize) {
        if self.rows.len() > limit {
            self.rows.truncate(limit);
            self.row_elements.truncate(limit);
            self.subgraph = Subgraph::from_rows(&self.row_elements);
        }
    }

    /// Plain-text table with aligned columns.
    pub fn render_table(&self, graph: &Graph) -> String {
        let rendered: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|row| row.iter().map(|c| c.render(graph)).collect())
            .collect();
        let mut widths: Vec<usize> = self.columns.iter().map(|c| c.chars().count()).collect();
        for row in &rendered {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let padded: Vec<String> = cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect();
            padded.join(" | ").trim_end().to_owned()
        };
        let mut out = String::new();
        out.push_str(&line(&self.columns));
        out.push('\n');
        let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
        out.push_str(&rule.join("-+-"));
        out.push('\n');
        for row in &rendered {
            out.push_str(&line(row));
            out.push('\n');
        }
        out
    }
}
