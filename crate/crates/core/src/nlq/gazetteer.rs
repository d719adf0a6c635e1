use std::collections::BTreeSet;

use crate::graph::Graph;
use crate::value::PropertyValue;

use super::text::{find_phrase, normalize};

/// Checked-in alias table: `alias<TAB>canonical Name[<TAB>label]`.
pub const BUILTIN_ALIASES: &str = include_str!("../../data/aliases.tsv");

const ENTITY_LABELS: [&str; 5] = ["Weather_Event", "Location", "Teleconnection", "Model", "Project"];

#[derive(Debug, Clone, PartialEq, Eq)]
struct Entry {
    phrase: String,
    canonical: String,
    /// `None` for aliases whose label is unknown; they match any slot.
    label: Option<String>,
}

/// Phrase → entity Name lookup built from graph Names and the alias table.
#[derive(Debug, Clone, Default)]
pub struct Gazetteer {
    entries: Vec<Entry>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GazetteerHit {
    pub canonical: String,
    pub phrase: String,
    pub position: usize,
}

impl Gazetteer {
    pub fn new() -> Self {
        Self::default()
    }

    /// Graph entity Names plus [`BUILTIN_ALIASES`].
    pub fn for_graph(graph: &Graph) -> Self {
        let mut g = Gazetteer::new();
        g.add_graph(graph);
        g.add_alias_table(BUILTIN_ALIASES);
        g
    }

    pub fn add(&mut self, phrase: &str, canonical: &str, label: Option<&str>) {
        if normalize(phrase).trim().is_empty() {
            return;
        }
        let entry = Entry {
            phrase: phrase.to_owned(),
            canonical: canonical.to_owned(),
            label: label.map(str::to_owned),
        };
        if !self.entries.contains(&entry) {
            self.entries.push(entry);
        }
    }

    pub fn add_graph(&mut self, graph: &Graph) {
        for label in ENTITY_LABELS {
            for id in graph.nodes_by_label(label) {
                if let Some(PropertyValue::Text(name)) = graph.node(*id).and_then(|n| n.property("Name")) {
                    self.add(name, name, Some(label));
                }
            }
        }
    }

    /// Malformed lines are skipped.
    pub fn add_alias_table(&mut self, tsv: &str) {
        for line in tsv.lines() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split('\t').map(str::trim);
            let (Some(alias), Some(canonical)) = (cols.next(), cols.next()) else {
                continue;
            };
            if canonical.is_empty() {
                continue;
            }
            let label = cols.next().filter(|l| !l.is_empty());
            self.add(alias, canonical, label);
        }
    }

    /// Every canonical Name the gazetteer can produce.
    pub fn canonical_names(&self) -> BTreeSet<&str> {
        self.entries.iter().map(|e| e.canonical.as_str()).collect()
    }

    /// Longest matching phrase for `label` in normalised `text`; ties go to
    /// the earliest occurrence.
    pub fn best_match(&self, normalized_text: &str, label: &str) -> Option<GazetteerHit> {
        self.entries
            .iter()
            .filter(|e| e.label.as_deref().is_none_or(|l| l == label))
            .filter_map(|e| {
                find_phrase(normalized_text, &e.phrase).map(|position| GazetteerHit {
                    canonical: e.canonical.clone(),
                    phrase: e.phrase.clone(),
                    position,
                })
            })
            .max_by(|a, b| {
                normalize(&a.phrase)
                    .len()
                    .cmp(&normalize(&b.phrase).len())
                    .then(b.position.cmp(&a.position))
            })
    }
}
