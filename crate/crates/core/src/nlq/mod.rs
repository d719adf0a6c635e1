//! Rule-based translation of a fixed family of natural-language questions
//! into query ASTs, with an optional external translator as fallback.
//!
//! Whatever produces the query, its text goes back through the parser before
//! anything executes.

mod gazetteer;
mod templates;
mod text;

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::cypher::{self, ParseError, QueryAst};
use crate::graph::Graph;

pub use gazetteer::{Gazetteer, GazetteerHit, BUILTIN_ALIASES};
pub use templates::{builtin_templates, fill_slot, QueryTemplate, SlotRule, SlotValue, Slots, TriggerGroup};
pub use text::normalize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Translation {
    pub template_id: String,
    pub slots: Slots,
    #[serde(skip)]
    pub ast: QueryAst,
    /// Canonical query text (`pretty_print` of `ast`).
    pub cypher: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[error("no template matched: {}", reasons.join("; "))]
pub struct NoMatch {
    pub reasons: Vec<String>,
}

/// Free-form text → query text, e.g. an LLM behind an API.
pub trait ExternalTranslator: Send + Sync {
    fn translate(&self, text: &str) -> Result<String, String>;
}

#[derive(Debug, Error)]
pub enum NlqError {
    #[error(transparent)]
    NoMatch(#[from] NoMatch),
    #[error("external translator failed: {0}")]
    External(String),
    /// The external translator returned text outside the query subset.
    #[error("external translator output rejected: {0}")]
    Parse(#[from] ParseError),
}

/// Matches `text` against `templates` in order; the first template whose
/// triggers and slots are all satisfied wins.
pub fn translate_with(text: &str, templates: &[QueryTemplate], gazetteer: &Gazetteer) -> Result<Translation, NoMatch> {
    let norm = templates::normalized(text);
    let mut reasons = Vec::new();
    'templates: for template in templates {
        let missing: Vec<&str> = template
            .triggers
            .iter()
            .filter(|g| !templates::trigger_hits(g, &norm))
            .map(|g| g.name)
            .collect();
        if !missing.is_empty() {
            reasons.push(format!("{}: no trigger word for {}", template.id, missing.join(", ")));
            continue;
        }
        let mut slots = Slots::new();
        for (name, rule) in &template.slots {
            match fill_slot(*rule, &norm, gazetteer) {
                Some(v) => {
                    slots.insert(name.to_string(), v);
                }
                None => {
                    reasons.push(format!("{}: could not fill slot {name}", template.id));
                    continue 'templates;
                }
            }
        }
        let ast = (template.build)(&slots);
        return Ok(Translation {
            template_id: template.id.to_owned(),
            slots,
            cypher: cypher::pretty_print(&ast),
            ast,
        });
    }
    Err(NoMatch { reasons })
}

/// Builtin templates with a gazetteer over `graph` Names and the alias table.
pub fn translate(text: &str, templates: &[QueryTemplate], graph: &Graph) -> Result<Translation, NoMatch> {
    translate_with(text, templates, &Gazetteer::for_graph(graph))
}

/// Templates plus gazetteer, built once; optionally backed by an external
/// translator.
pub struct Translator {
    templates: Vec<QueryTemplate>,
    gazetteer: Gazetteer,
    external: Option<Arc<dyn ExternalTranslator>>,
}

impl Translator {
    pub fn new(graph: &Graph) -> Self {
        Translator {
            templates: builtin_templates(),
            gazetteer: Gazetteer::for_graph(graph),
            external: None,
        }
    }

    pub fn with_external(mut self, external: Arc<dyn ExternalTranslator>) -> Self {
        self.external = Some(external);
        self
    }

    pub fn templates(&self) -> &[QueryTemplate] {
        &self.templates
    }

    /// Templates first, then the external translator if one is registered.
    /// External output is parsed and re-printed; unparsable text is an error.
    pub fn translate(&self, text: &str) -> Result<Translation, NlqError> {
        let no_match = match translate_with(text, &self.templates, &self.gazetteer) {
            Ok(t) => return Ok(t),
            Err(e) => e,
        };
        let Some(external) = &self.external else {
            return Err(no_match.into());
        };
        let query = external.translate(text).map_err(NlqError::External)?;
        let ast = cypher::parse(&query)?;
        Ok(Translation {
            template_id: "external".into(),
            slots: Slots::new(),
            cypher: cypher::pretty_print(&ast),
            ast,
        })
    }
}
