use std::collections::{BTreeSet, HashMap, HashSet};

use thiserror::Error;

use crate::graph::{Graph, GraphError, Node, NodeId, Properties, RelId, Relationship};
use crate::schema::{validate_node, validate_relationship, SchemaDef, Violation};
use crate::value::PropertyValue;

use super::record::{EntityKey, IngestRecord};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IngestOptions {
    /// Reject records that carry error-level schema violations.
    pub strict: bool,
    /// Key mention edges on (paper, target, sentence) so re-ingestion adds
    /// nothing.
    pub dedup_mentions: bool,
}

/// What applying one record did. The violations are the ones reported for
/// the record (warnings, plus errors when not strict).
#[derive(Debug, Clone, PartialEq)]
pub enum ApplyOutcome {
    Created(Vec<Violation>),
    Merged(Vec<Violation>),
    Rejected(Vec<Violation>),
}

impl ApplyOutcome {
    pub fn violations(&self) -> &[Violation] {
        match self {
            ApplyOutcome::Created(v) | ApplyOutcome::Merged(v) | ApplyOutcome::Rejected(v) => v,
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ApplyError {
    #[error("dangling reference: no {kind} with key {key:?}")]
    DanglingReference { kind: String, key: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn text_prop<'a>(node: &'a Node, key: &str) -> Option<&'a str> {
    match node.property(key) {
        Some(PropertyValue::Text(s)) => Some(s),
        _ => None,
    }
}

/// Applies records to a graph while keeping entity, paper and mention keys
/// in hash maps. Seeded from whatever the graph already holds, so appending
/// to a loaded snapshot deduplicates against it.
pub struct Ingestor<'g> {
    graph: &'g mut Graph,
    schema: &'g SchemaDef,
    options: IngestOptions,
    entities: HashMap<(String, String), NodeId>,
    papers_by_doi: HashMap<String, NodeId>,
    papers_by_title: HashMap<String, NodeId>,
    mentions: HashSet<(NodeId, NodeId, String)>,
}

impl<'g> Ingestor<'g> {
    pub fn new(graph: &'g mut Graph, schema: &'g SchemaDef, options: IngestOptions) -> Self {
        let mut entities = HashMap::new();
        let mut papers_by_doi = HashMap::new();
        let mut papers_by_title = HashMap::new();
        for node in graph.nodes() {
            if node.has_label("Paper") {
                if let Some(doi) = text_prop(node, "doi") {
                    papers_by_doi.entry(doi.to_owned()).or_insert(node.id);
                }
                if let Some(title) = text_prop(node, "title") {
                    papers_by_title.entry(title.to_owned()).or_insert(node.id);
                }
            }
            if let Some(name) = text_prop(node, "Name") {
                for label in &node.labels {
                    entities.entry((label.clone(), name.to_owned())).or_insert(node.id);
                }
            }
        }
        let mut mentions = HashSet::new();
        if options.dedup_mentions {
            for rel in graph.relationships().filter(|r| r.rel_type == "Mention") {
                if let Some(PropertyValue::Text(s)) = rel.property("Mention_Sentence") {
                    mentions.insert((rel.src, rel.dst, s.clone()));
                }
            }
        }
        Ingestor {
            graph,
            schema,
            options,
            entities,
            papers_by_doi,
            papers_by_title,
            mentions,
        }
    }

    pub fn graph(&self) -> &Graph {
        self.graph
    }

    fn paper(&self, key: &str) -> Option<NodeId> {
        self.papers_by_doi
            .get(key)
            .or_else(|| self.papers_by_title.get(key))
            .copied()
    }

    fn resolve(&self, key: &EntityKey) -> Result<NodeId, ApplyError> {
        let found = if key.label == "Paper" {
            self.paper(&key.name)
        } else {
            self.entities.get(&(key.label.clone(), key.name.clone())).copied()
        };
        found.ok_or_else(|| ApplyError::DanglingReference {
            kind: key.label.clone(),
            key: key.name.clone(),
        })
    }

    fn screen(&self, violations: Vec<Violation>) -> Result<Vec<Violation>, Vec<Violation>> {
        if self.options.strict && violations.iter().any(Violation::is_error) {
            Err(violations)
        } else {
            Ok(violations)
        }
    }

    /// Creates the node or merges `props` into `existing` (last writer wins
    /// per key), validating the would-be result first.
    fn upsert_node(
        &mut self,
        existing: Option<NodeId>,
        label: &str,
        props: Properties,
    ) -> Result<(ApplyOutcome, Option<NodeId>), ApplyError> {
        let candidate = match existing {
            Some(id) => {
                let mut node = self.graph.node(id).ok_or(GraphError::UnknownNode(id))?.clone();
                node.properties.extend(props.clone());
                node
            }
            None => Node {
                id: NodeId(self.graph.node_count() as u64),
                labels: BTreeSet::from([label.to_owned()]),
                properties: props.clone(),
            },
        };
        let violations = match self.screen(validate_node(self.schema, &candidate)) {
            Ok(v) => v,
            Err(v) => return Ok((ApplyOutcome::Rejected(v), None)),
        };
        match existing {
            Some(id) => {
                for (key, value) in props {
                    if self.graph.node(id).and_then(|n| n.property(&key)) != Some(&value) {
                        self.graph.set_node_property(id, &key, value)?;
                    }
                }
                Ok((ApplyOutcome::Merged(violations), Some(id)))
            }
            None => {
                let id = self.graph.add_node([label], props)?;
                Ok((ApplyOutcome::Created(violations), Some(id)))
            }
        }
    }

    fn add_edge(
        &mut self,
        src: NodeId,
        dst: NodeId,
        rel_type: &str,
        props: Properties,
    ) -> Result<ApplyOutcome, ApplyError> {
        let candidate = Relationship {
            id: RelId(self.graph.rel_count() as u64),
            rel_type: rel_type.to_owned(),
            src,
            dst,
            properties: props.clone(),
        };
        match self.screen(validate_relationship(self.schema, self.graph, &candidate)?) {
            Ok(v) => {
                self.graph.add_relationship(src, dst, rel_type, props)?;
                Ok(ApplyOutcome::Created(v))
            }
            Err(v) => Ok(ApplyOutcome::Rejected(v)),
        }
    }

    pub fn apply(&mut self, record: IngestRecord) -> Result<ApplyOutcome, ApplyError> {
        match record {
            IngestRecord::Entity {
                label,
                name,
                mut properties,
            } => {
                properties.insert("Name".into(), PropertyValue::Text(name.clone()));
                let key = (label.clone(), name);
                let existing = self.entities.get(&key).copied();
                let (outcome, id) = self.upsert_node(existing, &label, properties)?;
                if let (None, Some(id)) = (existing, id) {
                    self.entities.insert(key, id);
                }
                Ok(outcome)
            }
            IngestRecord::Paper {
                title,
                doi,
                mut properties,
            } => {
                let existing = match &doi {
                    Some(d) => self.papers_by_doi.get(d).copied(),
                    None => self.papers_by_title.get(&title).copied(),
                };
                properties.insert("title".into(), PropertyValue::Text(title.clone()));
                if let Some(d) = &doi {
                    properties.insert("doi".into(), PropertyValue::Text(d.clone()));
                }
                let (outcome, id) = self.upsert_node(existing, "Paper", properties)?;
                if let Some(id) = id {
                    if let Some(d) = doi {
                        self.papers_by_doi.entry(d).or_insert(id);
                    }
                    self.papers_by_title.entry(title).or_insert(id);
                }
                Ok(outcome)
            }
            IngestRecord::Mention {
                paper,
                target,
                sentence,
            } => {
                let src = self.paper(&paper).ok_or_else(|| ApplyError::DanglingReference {
                    kind: "Paper".into(),
                    key: paper.clone(),
                })?;
                let dst = self.resolve(&target)?;
                let key = (src, dst, sentence.clone());
                if self.options.dedup_mentions && self.mentions.contains(&key) {
                    return Ok(ApplyOutcome::Merged(Vec::new()));
                }
                let props = Properties::from([(
                    "Mention_Sentence".to_owned(),
                    PropertyValue::Text(sentence),
                )]);
                let outcome = self.add_edge(src, dst, "Mention", props)?;
                if matches!(outcome, ApplyOutcome::Created(_)) && self.options.dedup_mentions {
                    self.mentions.insert(key);
                }
                Ok(outcome)
            }
            IngestRecord::Relation {
                rel_type,
                src,
                dst,
                properties,
            } => {
                let src = self.resolve(&src)?;
                let dst = self.resolve(&dst)?;
                let duplicate = self.graph.outgoing(src)?.iter().any(|id| {
                    self.graph.relationship(*id).is_some_and(|r| {
                        r.dst == dst && r.rel_type == rel_type && r.properties == properties
                    })
                });
                if duplicate {
                    return Ok(ApplyOutcome::Merged(Vec::new()));
                }
                self.add_edge(src, dst, &rel_type, properties)
            }
        }
    }
}

/// One-shot convenience over [`Ingestor`]; rebuilds the key maps on every
/// call, so prefer an `Ingestor` for bulk loads.
pub fn apply_record(
    graph: &mut Graph,
    schema: &SchemaDef,
    record: IngestRecord,
    strict: bool,
) -> Result<ApplyOutcome, ApplyError> {
    let options = IngestOptions {
        strict,
        dedup_mentions: false,
    };
    Ingestor::new(graph, schema, options).apply(record)
}
