use serde_json::{Map, Value};
use thiserror::Error;

use crate::graph::Properties;
use crate::value::PropertyValue;

/// `(label, Name)` reference to an entity. With label `Paper` the name is a
/// paper key (doi, else title).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EntityKey {
    pub label: String,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum IngestRecord {
    Entity {
        label: String,
        name: String,
        properties: Properties,
    },
    Paper {
        title: String,
        doi: Option<String>,
        properties: Properties,
    },
    Mention {
        /// doi or title of the mentioning paper
        paper: String,
        target: EntityKey,
        sentence: String,
    },
    Relation {
        rel_type: String,
        src: EntityKey,
        dst: EntityKey,
        properties: Properties,
    },
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("line {line}: field `{field}`: {message}")]
pub struct RecordError {
    pub line: usize,
    pub field: String,
    pub message: String,
}

struct Fields<'a> {
    line: usize,
    obj: &'a Map<String, Value>,
}

impl Fields<'_> {
    fn err(&self, field: &str, message: impl Into<String>) -> RecordError {
        RecordError {
            line: self.line,
            field: field.to_owned(),
            message: message.into(),
        }
    }

    fn opt_str(&self, field: &str) -> Result<Option<String>, RecordError> {
        match self.obj.get(field) {
            None | Some(Value::Null) => Ok(None),
            Some(Value::String(s)) if !s.is_empty() => Ok(Some(s.clone())),
            Some(Value::String(_)) => Err(self.err(field, "must not be empty")),
            Some(_) => Err(self.err(field, "expected a string")),
        }
    }

    fn str(&self, field: &str) -> Result<String, RecordError> {
        self.opt_str(field)?
            .ok_or_else(|| self.err(field, "required field is missing"))
    }

    fn key(&self, field: &str) -> Result<EntityKey, RecordError> {
        let Some(Value::Object(obj)) = self.obj.get(field) else {
            return Err(self.err(field, "expected an object {\"label\": .., \"name\": ..}"));
        };
        let inner = Fields {
            line: self.line,
            obj,
        };
        let label = inner.str("label").map_err(|e| self.err(field, e.message + " (label)"))?;
        let name = inner.str("name").map_err(|e| self.err(field, e.message + " (name)"))?;
        Ok(EntityKey { label, name })
    }

    fn properties(&self) -> Result<Properties, RecordError> {
        match self.obj.get("properties") {
            None | Some(Value::Null) => Ok(Properties::new()),
            Some(Value::Object(map)) => map
                .iter()
                .map(|(k, v)| {
                    if k.is_empty() {
                        return Err(self.err("properties", "property keys must not be empty"));
                    }
                    PropertyValue::from_json(v)
                        .map(|pv| (k.clone(), pv))
                        .ok_or_else(|| {
                            self.err(
                                "properties",
                                format!("unsupported value for `{k}` (expected string, number, bool or list of strings)"),
                            )
                        })
                })
                .collect(),
            Some(_) => Err(self.err("properties", "expected an object")),
        }
    }
}

/// Parses one NDJSON corpus line. `line` is the 1-based line number used in
/// error messages.
pub fn parse_record(text: &str, line: usize) -> Result<IngestRecord, RecordError> {
    let value: Value = serde_json::from_str(text).map_err(|e| RecordError {
        line,
        field: String::new(),
        message: format!("invalid JSON: {e}"),
    })?;
    let Value::Object(obj) = &value else {
        return Err(RecordError {
            line,
            field: String::new(),
            message: "expected a JSON object".into(),
        });
    };
    let f = Fields { line, obj };
    let kind = f.str("kind")?;
    match kind.as_str() {
        "entity" => {
            let label = f.str("label")?;
            if label == "Paper" {
                return Err(f.err("label", "papers use kind \"paper\""));
            }
            Ok(IngestRecord::Entity {
                label,
                name: f.str("name")?,
                properties: f.properties()?,
            })
        }
        "paper" => Ok(IngestRecord::Paper {
            title: f.str("title")?,
            doi: f.opt_str("doi")?,
            properties: f.properties()?,
        }),
        "mention" => Ok(IngestRecord::Mention {
            paper: f.str("paper")?,
            target: f.key("target")?,
            sentence: f.str("sentence")?,
        }),
        "relation" => Ok(IngestRecord::Relation {
            rel_type: f.str("rel_type")?,
            src: f.key("src")?,
            dst: f.key("dst")?,
            properties: f.properties()?,
        }),
        other => Err(f.err("kind", format!("unknown kind {other:?}"))),
    }
}
