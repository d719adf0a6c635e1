use std::collections::HashMap;
use std::io::BufRead;
use std::thread;
use std::time::{Duration, Instant};

use log::{debug, warn};
use serde_json::Value;
use thiserror::Error;

use crate::graph::Graph;
use crate::value::PropertyValue;

pub const WIKIDATA_ENDPOINT: &str = "https://www.wikidata.org/w/api.php";
pub const WIKIDATA_ENDPOINT_ENV: &str = "CLIMAKG_WIKIDATA_ENDPOINT";

const DESCRIPTION_KEY: &str = "wikidata_description";

#[derive(Debug, Error)]
pub enum EnrichError {
    #[error("request failed: {0}")]
    Http(String),
    #[error("unexpected response: {0}")]
    BadResponse(String),
}

/// Something that can map a location name to a short description.
pub trait DescriptionSource {
    fn describe(&mut self, name: &str) -> Result<Option<String>, EnrichError>;
}

/// Fixed name → description map, e.g. loaded from a TSV fixture.
#[derive(Debug, Clone, Default)]
pub struct OfflineDescriptions {
    map: HashMap<String, String>,
}

impl OfflineDescriptions {
    pub fn new<I, K, V>(entries: I) -> Self
    where
        I: IntoIterator<Item = (K, V)>,
        K: Into<String>,
        V: Into<String>,
    {
        OfflineDescriptions {
            map: entries.into_iter().map(|(k, v)| (k.into(), v.into())).collect(),
        }
    }

    /// `name<TAB>description` per line; blank lines and `#` comments skipped.
    pub fn from_tsv<R: BufRead>(reader: R) -> std::io::Result<Self> {
        let mut map = HashMap::new();
        for line in reader.lines() {
            let line = line?;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some((name, desc)) = line.split_once('\t') {
                map.insert(name.trim().to_owned(), desc.trim().to_owned());
            }
        }
        Ok(OfflineDescriptions { map })
    }
}

impl DescriptionSource for OfflineDescriptions {
    fn describe(&mut self, name: &str) -> Result<Option<String>, EnrichError> {
        Ok(self.map.get(name).cloned())
    }
}

/// Live lookups against the Wikidata entity-search API (`wbsearchentities`),
/// taking the top hit's description. Requests are spaced at least
/// `min_interval` apart.
pub struct WikidataClient {
    agent: ureq::Agent,
    endpoint: String,
    min_interval: Duration,
    last_request: Option<Instant>,
}

impl WikidataClient {
    pub fn new(endpoint: impl Into<String>, timeout: Duration) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .build()
            .into();
        WikidataClient {
            agent,
            endpoint: endpoint.into(),
            min_interval: Duration::from_millis(200),
            last_request: None,
        }
    }

    /// Endpoint from `CLIMAKG_WIKIDATA_ENDPOINT`, else the public API.
    pub fn from_env() -> Self {
        let endpoint =
            std::env::var(WIKIDATA_ENDPOINT_ENV).unwrap_or_else(|_| WIKIDATA_ENDPOINT.to_owned());
        Self::new(endpoint, Duration::from_secs(10))
    }

    pub fn endpoint(&self) -> &str {
        &self.endpoint
    }

    fn throttle(&mut self) {
        if let Some(last) = self.last_request {
            let elapsed = last.elapsed();
            if elapsed < self.min_interval {
                thread::sleep(self.min_interval - elapsed);
            }
        }
        self.last_request = Some(Instant::now());
    }
}

/// Search names are stored upper snake case (`NORTH_AMERICA`).
fn search_term(name: &str) -> String {
    name.replace('_', " ")
}

impl DescriptionSource for WikidataClient {
    fn describe(&mut self, name: &str) -> Result<Option<String>, EnrichError> {
        self.throttle();
        let term = search_term(name);
        let body = self
            .agent
            .get(&self.endpoint)
            .query("action", "wbsearchentities")
            .query("search", &term)
            .query("language", "en")
            .query("format", "json")
            .query("limit", "1")
            .call()
            .map_err(|e| EnrichError::Http(e.to_string()))?
            .body_mut()
            .read_to_string()
            .map_err(|e| EnrichError::Http(e.to_string()))?;
        let json: Value =
            serde_json::from_str(&body).map_err(|e| EnrichError::BadResponse(e.to_string()))?;
        let hits = json
            .get("search")
            .and_then(Value::as_array)
            .ok_or_else(|| EnrichError::BadResponse("missing `search` array".into()))?;
        Ok(hits
            .first()
            .and_then(|hit| hit.get("description"))
            .and_then(Value::as_str)
            .filter(|d| !d.is_empty())
            .map(str::to_owned))
    }
}

/// Fills `wikidata_description` on Location nodes that lack one. Lookup
/// failures are logged and skipped. Returns the number of nodes enriched.
pub fn enrich_locations(graph: &mut Graph, source: &mut dyn DescriptionSource) -> usize {
    let pending: Vec<_> = graph
        .nodes_by_label("Location")
        .iter()
        .filter_map(|id| graph.node(*id))
        .filter(|n| n.property(DESCRIPTION_KEY).is_none())
        .filter_map(|n| match n.property("Name") {
            Some(PropertyValue::Text(name)) => Some((n.id, name.clone())),
            _ => None,
        })
        .collect();
    let mut enriched = 0;
    for (id, name) in pending {
        match source.describe(&name) {
            Ok(Some(desc)) => {
                debug!("{name}: {desc}");
                graph
                    .set_node_property(id, DESCRIPTION_KEY, PropertyValue::Text(desc))
                    .expect("node id came from the graph");
                enriched += 1;
            }
            Ok(None) => debug!("{name}: no description found"),
            Err(e) => warn!("enrichment lookup for {name} failed: {e}"),
        }
    }
    enriched
}
