use std::collections::BTreeMap;

use serde::Serialize;

use crate::cypher::{
    CompareOp, Expr, Literal, MatchClause, NodePattern, PathPattern, QueryAst, RelPattern,
    ReturnClause, ReturnItem,
};

use super::gazetteer::Gazetteer;
use super::text::{find_phrase, normalize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum SlotValue {
    Text(String),
    List(Vec<String>),
}

impl SlotValue {
    pub fn as_text(&self) -> &str {
        match self {
            SlotValue::Text(s) => s,
            SlotValue::List(items) => items.first().map_or("", String::as_str),
        }
    }

    pub fn as_list(&self) -> Vec<String> {
        match self {
            SlotValue::Text(s) => vec![s.clone()],
            SlotValue::List(items) => items.clone(),
        }
    }
}

pub type Slots = BTreeMap<String, SlotValue>;

/// A keyword group; at least one synonym must appear as whole words.
#[derive(Debug, Clone)]
pub struct TriggerGroup {
    pub name: &'static str,
    pub synonyms: &'static [&'static str],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotRule {
    /// Entity Name of the given label via the gazetteer.
    Entity(&'static str),
    /// Sentence-level abbreviations from the event vocabulary.
    EventTerms,
    /// `CMIP<n>`.
    ModelGeneration,
    /// Compass sub-region word such as `Southeast`.
    RegionWord,
    /// Country description followed by its abbreviation.
    CountryDescriptionAndAbbreviation,
    CountryDescription,
    CountryNames,
}

#[derive(Debug, Clone)]
pub struct QueryTemplate {
    pub id: &'static str,
    pub summary: &'static str,
    pub triggers: Vec<TriggerGroup>,
    pub slots: Vec<(&'static str, SlotRule)>,
    pub build: fn(&Slots) -> QueryAst,
}

/// Canonical sentence term and the phrases that introduce it. Output order
/// follows this table.
const EVENT_TERMS: &[(&str, &[&str])] = &[
    ("WW", &["warm waves", "warm wave", "wws", "ww"]),
    ("CAOs", &["cold air outbreaks", "cold air outbreak", "caos", "cao"]),
    ("HWs", &["heat waves", "heat wave", "hws"]),
];

const REGION_WORDS: &[(&str, &str)] = &[
    ("southeast", "Southeast"),
    ("southeastern", "Southeast"),
    ("northeast", "Northeast"),
    ("northeastern", "Northeast"),
    ("southwest", "Southwest"),
    ("southwestern", "Southwest"),
    ("northwest", "Northwest"),
    ("northwestern", "Northwest"),
    ("midwest", "Midwest"),
];

struct Country {
    phrases: &'static [&'static str],
    description: &'static str,
    abbreviation: &'static str,
    names: &'static [&'static str],
}

const COUNTRIES: &[Country] = &[
    Country {
        phrases: &["united states of america", "united states", "usa", "u s a"],
        description: "United States",
        abbreviation: "US",
        names: &["USA", "United States of America"],
    },
    Country {
        phrases: &["canada"],
        description: "Canada",
        abbreviation: "CA",
        names: &["CANADA", "Canada"],
    },
];

fn country(text: &str) -> Option<&'static Country> {
    COUNTRIES
        .iter()
        .filter_map(|c| {
            c.phrases
                .iter()
                .filter_map(|p| find_phrase(text, p))
                .min()
                .map(|pos| (pos, c))
        })
        .min_by_key(|(pos, _)| *pos)
        .map(|(_, c)| c)
}

/// Fills one slot from normalised `text`.
pub fn fill_slot(rule: SlotRule, text: &str, gazetteer: &Gazetteer) -> Option<SlotValue> {
    match rule {
        SlotRule::Entity(label) => gazetteer
            .best_match(text, label)
            .map(|hit| SlotValue::Text(hit.canonical)),
        SlotRule::EventTerms => {
            let terms: Vec<String> = EVENT_TERMS
                .iter()
                .filter(|(_, phrases)| phrases.iter().any(|p| find_phrase(text, p).is_some()))
                .map(|(term, _)| term.to_string())
                .collect();
            (!terms.is_empty()).then_some(SlotValue::List(terms))
        }
        SlotRule::ModelGeneration => {
            let words: Vec<&str> = text.split_whitespace().collect();
            words.iter().enumerate().find_map(|(i, w)| {
                let digits = match w.strip_prefix("cmip") {
                    Some("") => words.get(i + 1).copied().filter(|n| n.chars().all(|c| c.is_ascii_digit()))?,
                    Some(rest) if rest.chars().all(|c| c.is_ascii_digit()) => rest,
                    _ => return None,
                };
                Some(SlotValue::Text(format!("CMIP{digits}")))
            })
        }
        SlotRule::RegionWord => REGION_WORDS
            .iter()
            .filter_map(|(word, canonical)| find_phrase(text, word).map(|pos| (pos, canonical)))
            .min_by_key(|(pos, _)| *pos)
            .map(|(_, c)| SlotValue::Text(c.to_string())),
        SlotRule::CountryDescriptionAndAbbreviation => country(text).map(|c| {
            SlotValue::List(vec![c.description.to_owned(), c.abbreviation.to_owned()])
        }),
        SlotRule::CountryDescription => country(text).map(|c| SlotValue::Text(c.description.to_owned())),
        SlotRule::CountryNames => {
            country(text).map(|c| SlotValue::List(c.names.iter().map(|s| s.to_string()).collect()))
        }
    }
}

/// Whether some synonym of `group` occurs in normalised `text`.
pub fn trigger_hits(group: &TriggerGroup, text: &str) -> bool {
    group.synonyms.iter().any(|s| find_phrase(text, s).is_some())
}

pub(crate) fn normalized(text: &str) -> String {
    normalize(text)
}

const PAPERS: TriggerGroup = TriggerGroup {
    name: "papers",
    synonyms: &["paper", "papers", "article", "articles", "publication", "publications", "literature"],
};

const MENTION: TriggerGroup = TriggerGroup {
    name: "mention",
    synonyms: &["mention", "mentions", "mentioning", "discuss", "discusses", "discussing"],
};

/// Three templates, one per supported question shape.
pub fn builtin_templates() -> Vec<QueryTemplate> {
    vec![
        QueryTemplate {
            id: "T1",
            summary: "papers whose mention sentences use event terms, for events targeting a location",
            triggers: vec![
                PAPERS,
                MENTION,
                TriggerGroup {
                    name: "sentence",
                    synonyms: &["sentence", "sentences", "context"],
                },
            ],
            slots: vec![
                ("location", SlotRule::Entity("Location")),
                ("sentence_terms", SlotRule::EventTerms),
            ],
            build: build_events_at_location,
        },
        QueryTemplate {
            id: "T2",
            summary: "papers mentioning a model generation, a teleconnection and a sub-national region",
            triggers: vec![
                PAPERS,
                MENTION,
                TriggerGroup {
                    name: "model",
                    synonyms: &["model", "models", "cmip"],
                },
            ],
            slots: vec![
                ("model_substring", SlotRule::ModelGeneration),
                ("teleconnection", SlotRule::Entity("Teleconnection")),
                ("region_substring", SlotRule::RegionWord),
                ("country_substring", SlotRule::CountryDescriptionAndAbbreviation),
            ],
            build: build_model_teleconnection_region,
        },
        QueryTemplate {
            id: "T3",
            summary: "papers mentioning a teleconnection together with locations it targets in a country",
            triggers: vec![
                PAPERS,
                MENTION,
                TriggerGroup {
                    name: "pattern",
                    synonyms: &["pattern", "patterns", "teleconnection", "teleconnections"],
                },
            ],
            slots: vec![
                ("teleconnection", SlotRule::Entity("Teleconnection")),
                ("country_description", SlotRule::CountryDescription),
                ("country_names", SlotRule::CountryNames),
            ],
            build: build_teleconnection_country,
        },
    ]
}

fn contains(var: &str, key: &str, needle: &str) -> Expr {
    Expr::prop_cmp(var, key, CompareOp::Contains, Literal::str(needle))
}

/// `a OR b OR ...`, or the single operand.
fn any_of(mut items: Vec<Expr>) -> Expr {
    if items.len() == 1 {
        items.remove(0)
    } else {
        Expr::Or(items)
    }
}

fn clause(pattern: PathPattern, where_clause: Option<Expr>) -> MatchClause {
    MatchClause {
        patterns: vec![pattern],
        where_clause,
    }
}

fn returning(items: &[(&str, &str, &str)]) -> ReturnClause {
    ReturnClause {
        items: items
            .iter()
            .map(|(var, key, alias)| ReturnItem::prop(var, key, Some(alias)))
            .collect(),
    }
}

fn slot<'a>(slots: &'a Slots, name: &str) -> &'a SlotValue {
    slots
        .get(name)
        .unwrap_or_else(|| panic!("template slot `{name}` was not filled"))
}

fn build_events_at_location(slots: &Slots) -> QueryAst {
    let location = slot(slots, "location").as_text();
    let terms = slot(slots, "sentence_terms").as_list();
    let filter = any_of(
        terms
            .iter()
            .map(|t| contains("m", "Mention_Sentence", t))
            .collect(),
    );
    let filter = if terms.len() > 1 { Expr::paren(filter) } else { filter };
    QueryAst {
        clauses: vec![
            clause(
                PathPattern::node(NodePattern::labeled("we", &["Weather_Event"])).then(
                    RelPattern::out(None, "TargetsLocation"),
                    NodePattern::labeled("l", &["Location"]).with_prop("Name", Literal::str(location)),
                ),
                None,
            ),
            clause(
                PathPattern::node(NodePattern::labeled("p", &["Paper"]))
                    .then(RelPattern::out(Some("m"), "Mention"), NodePattern::var("we")),
                Some(filter),
            ),
        ],
        return_clause: returning(&[
            ("p", "title", "PaperTitle"),
            ("l", "Name", "Location"),
            ("we", "Name", "WeatherEvent"),
            ("m", "Mention_Sentence", "Context"),
        ]),
    }
}

fn build_model_teleconnection_region(slots: &Slots) -> QueryAst {
    let model = slot(slots, "model_substring").as_text();
    let tel = slot(slots, "teleconnection").as_text();
    let region = slot(slots, "region_substring").as_text();
    let country = slot(slots, "country_substring").as_list();
    let mut country_tests = vec![contains("loc", "wikidata_description", &country[0])];
    country_tests.extend(country.get(1).map(|abbr| contains("loc", "Name", abbr)));
    let country_filter = match country_tests.len() {
        1 => country_tests.remove(0),
        _ => Expr::paren(Expr::Or(country_tests)),
    };
    let mention = || RelPattern::out(None, "Mention");
    QueryAst {
        clauses: vec![
            clause(
                PathPattern::node(NodePattern::labeled("p", &["Paper"]))
                    .then(mention(), NodePattern::labeled("mod", &["Model", "Project"])),
                Some(contains("mod", "Name", model)),
            ),
            clause(
                PathPattern::node(NodePattern::var("p")).then(
                    mention(),
                    NodePattern::labeled("tel", &["Teleconnection"]).with_prop("Name", Literal::str(tel)),
                ),
                None,
            ),
            clause(
                PathPattern::node(NodePattern::var("p"))
                    .then(mention(), NodePattern::labeled("loc", &["Location"])),
                Some(Expr::And(vec![contains("loc", "Name", region), country_filter])),
            ),
        ],
        return_clause: returning(&[
            ("p", "title", "PaperTitle"),
            ("mod", "Name", "ModelProject"),
            ("tel", "Name", "Teleconnection"),
            ("loc", "Name", "Region"),
        ]),
    }
}

fn build_teleconnection_country(slots: &Slots) -> QueryAst {
    let tel = slot(slots, "teleconnection").as_text();
    let description = slot(slots, "country_description").as_text();
    let names = slot(slots, "country_names").as_list();
    QueryAst {
        clauses: vec![
            clause(
                PathPattern::node(NodePattern::labeled("p", &["Paper"])).then(
                    RelPattern::out(None, "Mention"),
                    NodePattern::labeled("t", &["Teleconnection"]).with_prop("Name", Literal::str(tel)),
                ),
                None,
            ),
            clause(
                PathPattern::node(NodePattern::var("t")).then(
                    RelPattern::out(None, "TargetsLocation"),
                    NodePattern::labeled("l", &["Location"]),
                ),
                None,
            ),
            clause(
                PathPattern::node(NodePattern::var("p"))
                    .then(RelPattern::out(None, "Mention"), NodePattern::var("l")),
                Some(Expr::Or(vec![
                    contains("l", "wikidata_description", description),
                    Expr::prop_cmp(
                        "l",
                        "Name",
                        CompareOp::In,
                        Literal::List(names.iter().map(|n| Literal::str(n)).collect()),
                    ),
                ])),
            ),
        ],
        return_clause: returning(&[
            ("p", "title", "PaperTitle"),
            ("t", "Name", "TeleconnectionPattern"),
            ("l", "Name", "Location"),
        ]),
    }
}
