//! In-memory directed property multigraph.
//!
//! Nodes and relationships are addressed by dense ids handed out in creation
//! order. The store is append-only: elements are never removed, although node
//! properties may be overwritten (ingest merges and enrichment rely on this).
//! Two secondary indexes are maintained eagerly:
//!
//! * `label -> node ids`, ascending;
//! * `(label, key, text value) -> node ids` for the keys declared at creation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::value::PropertyValue;

pub type Properties = BTreeMap<String, PropertyValue>;

/// Keys indexed when a graph is created with [`Graph::new`].
pub const DEFAULT_INDEXED_KEYS: &[&str] = &["Name", "title"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct NodeId(pub u64);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct RelId(pub u64);

impl NodeId {
    fn index(self) -> usize {
        self.0 as usize
    }
}

impl RelId {
    fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for RelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: NodeId,
    pub labels: BTreeSet<String>,
    pub properties: Properties,
}

impl Node {
    pub fn has_label(&self, label: &str) -> bool {
        self.labels.contains(label)
    }

    pub fn property(&self, key: &str) -> Option<&PropertyValue> {
        self.properties.get(key)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Relationship {
    pub id: RelId,
    pub rel_type: String,
    pub src: NodeId,
    pub dst: NodeId,
    pub properties: Properties,
}

impl Relationship {
    pub fn property(&self, key: &str) -> Option<&PropertyValue> {
        self.properties.get(key)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Out,
    In,
    Both,
}

impl std::str::FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "out" | "outgoing" => Ok(Direction::Out),
            "in" | "incoming" => Ok(Direction::In),
            "both" => Ok(Direction::Both),
            other => Err(format!("invalid direction {other:?}, expected out, in or both")),
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("a node needs at least one label")]
    EmptyLabelSet,
    #[error("labels, relationship types and property keys must be non-empty")]
    EmptyKey,
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
}

type PropIndexKey = (String, String, String);

#[derive(Debug, Clone, Default)]
pub struct Graph {
    nodes: Vec<Node>,
    rels: Vec<Relationship>,
    outgoing: Vec<Vec<RelId>>,
    incoming: Vec<Vec<RelId>>,
    label_index: BTreeMap<String, Vec<NodeId>>,
    prop_index: BTreeMap<PropIndexKey, BTreeSet<NodeId>>,
    indexed_keys: Vec<String>,
}

impl Graph {
    /// Empty graph indexing [`DEFAULT_INDEXED_KEYS`].
    pub fn new() -> Self {
        Self::with_indexed_keys(DEFAULT_INDEXED_KEYS.iter().map(|k| k.to_string()))
    }

    pub fn with_indexed_keys<I, S>(keys: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut indexed_keys: Vec<String> = Vec::new();
        for key in keys {
            let key = key.into();
            if !indexed_keys.contains(&key) {
                indexed_keys.push(key);
            }
        }
        Graph {
            indexed_keys,
            ..Default::default()
        }
    }

    pub fn indexed_keys(&self) -> &[String] {
        &self.indexed_keys
    }

    pub fn is_indexed(&self, key: &str) -> bool {
        self.indexed_keys.iter().any(|k| k == key)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn rel_count(&self) -> usize {
        self.rels.len()
    }

    pub fn add_node<I, S>(&mut self, labels: I, properties: Properties) -> Result<NodeId, GraphError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: BTreeSet<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(GraphError::EmptyLabelSet);
        }
        if labels.iter().any(String::is_empty) || properties.keys().any(String::is_empty) {
            return Err(GraphError::EmptyKey);
        }
        let id = NodeId(self.nodes.len() as u64);
        for label in &labels {
            self.label_index.entry(label.clone()).or_default().push(id);
        }
        let node = Node {
            id,
            labels,
            properties,
        };
        for key in &self.indexed_keys {
            if let Some(PropertyValue::Text(value)) = node.properties.get(key) {
                for label in &node.labels {
                    self.prop_index
                        .entry((label.clone(), key.clone(), value.clone()))
                        .or_default()
                        .insert(id);
                }
            }
        }
        self.nodes.push(node);
        self.outgoing.push(Vec::new());
        self.incoming.push(Vec::new());
        Ok(id)
    }

    pub fn add_relationship(
        &mut self,
        src: NodeId,
        dst: NodeId,
        rel_type: impl Into<String>,
        properties: Properties,
    ) -> Result<RelId, GraphError> {
        for end in [src, dst] {
            if self.node(end).is_none() {
                return Err(GraphError::UnknownNode(end));
            }
        }
        let rel_type = rel_type.into();
        if rel_type.is_empty() || properties.keys().any(String::is_empty) {
            return Err(GraphError::EmptyKey);
        }
        let id = RelId(self.rels.len() as u64);
        self.rels.push(Relationship {
            id,
            rel_type,
            src,
            dst,
            properties,
        });
        self.outgoing[src.index()].push(id);
        self.incoming[dst.index()].push(id);
        Ok(id)
    }

    /// Sets (or overwrites) one node property, keeping the property index in
    /// step. Returns the previous value.
    pub fn set_node_property(
        &mut self,
        id: NodeId,
        key: &str,
        value: PropertyValue,
    ) -> Result<Option<PropertyValue>, GraphError> {
        if key.is_empty() {
            return Err(GraphError::EmptyKey);
        }
        let indexed = self.is_indexed(key);
        let node = self
            .nodes
            .get_mut(id.index())
            .ok_or(GraphError::UnknownNode(id))?;
        let previous = node.properties.insert(key.to_owned(), value.clone());
        if indexed {
            for label in &node.labels {
                if let Some(PropertyValue::Text(old)) = &previous {
                    let slot = (label.clone(), key.to_owned(), old.clone());
                    if let Some(set) = self.prop_index.get_mut(&slot) {
                        set.remove(&id);
                        if set.is_empty() {
                            self.prop_index.remove(&slot);
                        }
                    }
                }
                if let PropertyValue::Text(new) = &value {
                    self.prop_index
                        .entry((label.clone(), key.to_owned(), new.clone()))
                        .or_default()
                        .insert(id);
                }
            }
        }
        Ok(previous)
    }

    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.nodes.get(id.index())
    }

    pub fn relationship(&self, id: RelId) -> Option<&Relationship> {
        self.rels.get(id.index())
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = &Node> {
        self.nodes.iter()
    }

    pub fn relationships(&self) -> impl ExactSizeIterator<Item = &Relationship> {
        self.rels.iter()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> {
        (0..self.nodes.len() as u64).map(NodeId)
    }

    /// Nodes carrying `label`, ascending by id.
    pub fn nodes_by_label(&self, label: &str) -> &[NodeId] {
        self.label_index
            .get(label)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Nodes carrying `label` whose `key` property equals `value`, ascending.
    /// Served from the property index when `(key, Text)` is indexed.
    pub fn nodes_by_label_property(
        &self,
        label: &str,
        key: &str,
        value: &PropertyValue,
    ) -> Vec<NodeId> {
        match self.indexed_lookup(label, key, value) {
            Some(ids) => ids,
            None => self.scan_label_property(label, key, value),
        }
    }

    /// Index probe; `None` when the lookup is not index-backed.
    pub fn indexed_lookup(
        &self,
        label: &str,
        key: &str,
        value: &PropertyValue,
    ) -> Option<Vec<NodeId>> {
        let PropertyValue::Text(text) = value else {
            return None;
        };
        if !self.is_indexed(key) {
            return None;
        }
        Some(
            self.prop_index
                .get(&(label.to_owned(), key.to_owned(), text.clone()))
                .map(|set| set.iter().copied().collect())
                .unwrap_or_default(),
        )
    }

    /// Unindexed path of [`Graph::nodes_by_label_property`].
    pub fn scan_label_property(
        &self,
        label: &str,
        key: &str,
        value: &PropertyValue,
    ) -> Vec<NodeId> {
        self.nodes_by_label(label)
            .iter()
            .copied()
            .filter(|id| self.nodes[id.index()].properties.get(key) == Some(value))
            .collect()
    }

    pub fn outgoing(&self, id: NodeId) -> Result<&[RelId], GraphError> {
        self.outgoing
            .get(id.index())
            .map(Vec::as_slice)
            .ok_or(GraphError::UnknownNode(id))
    }

    pub fn incoming(&self, id: NodeId) -> Result<&[RelId], GraphError> {
        self.incoming
            .get(id.index())
            .map(Vec::as_slice)
            .ok_or(GraphError::UnknownNode(id))
    }

    /// Incident edges in insertion order, paired with the node on the other
    /// end. `Both` yields the outgoing list followed by the incoming list, so
    /// a self-loop appears once in each.
    pub fn neighbors(
        &self,
        id: NodeId,
        direction: Direction,
        rel_type: Option<&str>,
    ) -> Result<Vec<(RelId, NodeId)>, GraphError> {
        let out = self.outgoing(id)?;
        let inc = self.incoming(id)?;
        let type_ok = |rel: &Relationship| rel_type.is_none_or(|t| rel.rel_type == t);
        let mut result = Vec::new();
        if matches!(direction, Direction::Out | Direction::Both) {
            for rel in out.iter().map(|r| &self.rels[r.index()]) {
                if type_ok(rel) {
                    result.push((rel.id, rel.dst));
                }
            }
        }
        if matches!(direction, Direction::In | Direction::Both) {
            for rel in inc.iter().map(|r| &self.rels[r.index()]) {
                if type_ok(rel) {
                    result.push((rel.id, rel.src));
                }
            }
        }
        Ok(result)
    }

    /// Rebuilds adjacency and both indexes from the element tables and reports
    /// whether they match the incrementally maintained ones.
    pub fn indexes_consistent(&self) -> bool {
        let mut rebuilt = Graph::with_indexed_keys(self.indexed_keys.clone());
        for node in &self.nodes {
            rebuilt
                .add_node(node.labels.iter().cloned(), node.properties.clone())
                .expect("stored node is valid");
        }
        for rel in &self.rels {
            rebuilt
                .add_relationship(rel.src, rel.dst, rel.rel_type.clone(), rel.properties.clone())
                .expect("stored relationship is valid");
        }
        rebuilt.outgoing == self.outgoing
            && rebuilt.incoming == self.incoming
            && rebuilt.label_index == self.label_index
            && rebuilt.prop_index == self.prop_index
    }
}

/// Graph equality: identical ids, labels, types, properties and indexed keys.
impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes && self.rels == other.rels && self.indexed_keys == other.indexed_keys
    }
}

/// Shorthand for building property maps.
#[macro_export]
macro_rules! props {
    () => { $crate::graph::Properties::new() };
    ($($key:expr => $value:expr),+ $(,)?) => {{
        let mut map = $crate::graph::Properties::new();
        $( map.insert(($key).to_string(), $crate::value::PropertyValue::from($value)); )+
        map
    }};
}
