//! Declarative registry of node labels, relationship types and property keys,
//! plus advisory validation of graph elements against it.
//!
//! Schema files are line oriented:
//!
//! ```text
//! # comment
//! node Paper
//! rel TargetsLocation src=Weather_Event,Teleconnection dst=Location
//! prop Paper title
//! extensible true
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{Graph, GraphError, Node, Relationship};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Endpoints {
    pub src: BTreeSet<String>,
    pub dst: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SchemaDef {
    pub node_labels: BTreeSet<String>,
    pub rel_types: BTreeMap<String, Endpoints>,
    /// Known keys per label or relationship type.
    pub property_keys: BTreeMap<String, BTreeSet<String>>,
    pub extensible: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    UnknownLabel,
    UnknownRelType,
    BadEndpoint,
    UnknownPropertyKey,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "id", rename_all = "snake_case")]
pub enum ElementRef {
    Node(u64),
    Relationship(u64),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub element: ElementRef,
    pub kind: ViolationKind,
    pub severity: Severity,
    pub detail: String,
}

impl Violation {
    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("schema line {line}: {message}")]
pub struct SchemaParseError {
    pub line: usize,
    pub message: String,
}

fn set<const N: usize>(items: [&str; N]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

/// The climate-literature ontology: six node labels, `Mention` and
/// `TargetsLocation` relationships.
pub fn builtin_climate_schema() -> SchemaDef {
    let node_labels = set([
        "Paper",
        "Weather_Event",
        "Location",
        "Teleconnection",
        "Model",
        "Project",
    ]);
    let mut rel_types = BTreeMap::new();
    rel_types.insert(
        "Mention".to_string(),
        Endpoints {
            src: set(["Paper"]),
            dst: set([
                "Weather_Event",
                "Teleconnection",
                "Model",
                "Project",
                "Location",
            ]),
        },
    );
    rel_types.insert(
        "TargetsLocation".to_string(),
        Endpoints {
            src: set(["Weather_Event", "Teleconnection"]),
            dst: set(["Location"]),
        },
    );
    let mut property_keys = BTreeMap::new();
    property_keys.insert("Paper".to_string(), set(["title"]));
    for label in ["Weather_Event", "Teleconnection", "Model", "Project"] {
        property_keys.insert(label.to_string(), set(["Name"]));
    }
    property_keys.insert("Location".to_string(), set(["Name", "wikidata_description"]));
    property_keys.insert("Mention".to_string(), set(["Mention_Sentence"]));
    SchemaDef {
        node_labels,
        rel_types,
        property_keys,
        extensible: true,
    }
}

impl SchemaDef {
    /// Canonical schema-file text; `load_schema` of the output is the identity.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for label in &self.node_labels {
            writeln!(out, "node {label}").unwrap();
        }
        for (ty, ends) in &self.rel_types {
            let src: Vec<&str> = ends.src.iter().map(String::as_str).collect();
            let dst: Vec<&str> = ends.dst.iter().map(String::as_str).collect();
            writeln!(out, "rel {ty} src={} dst={}", src.join(","), dst.join(",")).unwrap();
        }
        for (owner, keys) in &self.property_keys {
            for key in keys {
                writeln!(out, "prop {owner} {key}").unwrap();
            }
        }
        writeln!(out, "extensible {}", self.extensible).unwrap();
        out
    }

    fn unknown_severity(&self) -> Severity {
        if self.extensible {
            Severity::Warning
        } else {
            Severity::Error
        }
    }

    fn key_known<'a>(&self, owners: impl IntoIterator<Item = &'a String>, key: &str) -> bool {
        owners
            .into_iter()
            .any(|o| self.property_keys.get(o).is_some_and(|keys| keys.contains(key)))
    }
}

fn is_name(s: &str) -> bool {
    !s.is_empty() && !s.contains(|c: char| c.is_whitespace() || c == ',' || c == '=' || c == '#')
}

pub fn load_schema(text: &str) -> Result<SchemaDef, SchemaParseError> {
    let mut schema = SchemaDef {
        node_labels: BTreeSet::new(),
        rel_types: BTreeMap::new(),
        property_keys: BTreeMap::new(),
        extensible: true,
    };
    // references are checked after all declarations are read
    let mut rel_refs: Vec<(usize, String)> = Vec::new();
    let mut prop_refs: Vec<(usize, String)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let err = |message: String| SchemaParseError {
            line: line_no,
            message,
        };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        match parts.as_slice() {
            ["node", label] if is_name(label) => {
                schema.node_labels.insert(label.to_string());
            }
            ["rel", ty, src, dst] if is_name(ty) => {
                let parse_list = |field: &str, prefix: &str| -> Result<BTreeSet<String>, SchemaParseError> {
                    let list = field
                        .strip_prefix(prefix)
                        .ok_or_else(|| err(format!("expected {prefix}<labels>, found {field:?}")))?;
                    let labels: BTreeSet<String> = list.split(',').map(str::to_owned).collect();
                    if labels.iter().any(|l| !is_name(l)) {
                        return Err(err(format!("invalid label list {list:?}")));
                    }
                    Ok(labels)
                };
                let ends = Endpoints {
                    src: parse_list(src, "src=")?,
                    dst: parse_list(dst, "dst=")?,
                };
                for label in ends.src.iter().chain(&ends.dst) {
                    rel_refs.push((line_no, label.clone()));
                }
                if schema.rel_types.insert(ty.to_string(), ends).is_some() {
                    return Err(err(format!("relationship type {ty} declared twice")));
                }
            }
            ["prop", owner, key] if is_name(owner) && is_name(key) => {
                prop_refs.push((line_no, owner.to_string()));
                schema
                    .property_keys
                    .entry(owner.to_string())
                    .or_default()
                    .insert(key.to_string());
            }
            ["extensible", flag] => {
                schema.extensible = match *flag {
                    "true" => true,
                    "false" => false,
                    other => return Err(err(format!("expected true or false, found {other:?}"))),
                };
            }
            _ => return Err(err(format!("unrecognised declaration {line:?}"))),
        }
    }

    for (line, label) in rel_refs {
        if !schema.node_labels.contains(&label) {
            return Err(SchemaParseError {
                line,
                message: format!("relationship endpoint uses undeclared label {label}"),
            });
        }
    }
    for (line, owner) in prop_refs {
        if !schema.node_labels.contains(&owner) && !schema.rel_types.contains_key(&owner) {
            return Err(SchemaParseError {
                line,
                message: format!("property declared for unknown label or type {owner}"),
            });
        }
    }
    Ok(schema)
}

pub fn validate_node(schema: &SchemaDef, node: &Node) -> Vec<Violation> {
    let element = ElementRef::Node(node.id.0);
    let mut violations = Vec::new();
    for label in &node.labels {
        if !schema.node_labels.contains(label) {
            violations.push(Violation {
                element,
                kind: ViolationKind::UnknownLabel,
                severity: Severity::Error,
                detail: format!("label {label} is not declared"),
            });
        }
    }
    let known: Vec<&String> = node
        .labels
        .iter()
        .filter(|l| schema.node_labels.contains(*l))
        .collect();
    if !known.is_empty() {
        for key in node.properties.keys() {
            if !schema.key_known(known.iter().copied(), key) {
                violations.push(Violation {
                    element,
                    kind: ViolationKind::UnknownPropertyKey,
                    severity: schema.unknown_severity(),
                    detail: format!("property {key} is not declared for this node"),
                });
            }
        }
    }
    violations
}

pub fn validate_relationship(
    schema: &SchemaDef,
    graph: &Graph,
    rel: &Relationship,
) -> Result<Vec<Violation>, GraphError> {
    let src = graph.node(rel.src).ok_or(GraphError::UnknownNode(rel.src))?;
    let dst = graph.node(rel.dst).ok_or(GraphError::UnknownNode(rel.dst))?;
    let element = ElementRef::Relationship(rel.id.0);
    let mut violations = Vec::new();
    let Some(ends) = schema.rel_types.get(&rel.rel_type) else {
        violations.push(Violation {
            element,
            kind: ViolationKind::UnknownRelType,
            severity: schema.unknown_severity(),
            detail: format!("relationship type {} is not declared", rel.rel_type),
        });
        return Ok(violations);
    };
    for (end, node, allowed) in [("source", src, &ends.src), ("target", dst, &ends.dst)] {
        if !node.labels.iter().any(|l| allowed.contains(l)) {
            violations.push(Violation {
                element,
                kind: ViolationKind::BadEndpoint,
                severity: Severity::Error,
                detail: format!(
                    "{} {end} node {} has labels {:?}, expected one of {:?}",
                    rel.rel_type, node.id, node.labels, allowed
                ),
            });
        }
    }
    for key in rel.properties.keys() {
        if !schema.key_known([&rel.rel_type], key) {
            violations.push(Violation {
                element,
                kind: ViolationKind::UnknownPropertyKey,
                severity: schema.unknown_severity(),
                detail: format!("property {key} is not declared for {}", rel.rel_type),
            });
        }
    }
    Ok(violations)
}
