//! One check per acceptance criterion. Each returns a short detail line on
//! success and a description of the first discrepancy on failure.

use std::time::{Duration, Instant};

use climakg_core::engine::{execute_with, plan, run_query, run_query_with, ExecOptions};
use climakg_core::ingest::{ingest_file, IngestOptions};
use climakg_core::nlq::{builtin_templates, translate};
use climakg_core::{builtin_climate_schema, parse, pretty_print, snapshot, Graph, PropertyValue};

use super::gen;
use super::oracle::{self, OCell, OValue};
use super::{corpus_graph, fixture_path, query_text, QUERIES};

pub type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn text_rows(rows: &[Vec<OCell>]) -> Vec<Vec<String>> {
    let mut out: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|c| match c {
                    OCell::Value(OValue::Text(s)) => s.clone(),
                    other => format!("{other:?}"),
                })
                .collect()
        })
        .collect();
    out.sort();
    out
}

pub fn frozen_rows(name: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(fixture_path(&format!("expected/{name}.json"))).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let strings = |v: &serde_json::Value| -> Vec<String> {
        v.as_array().unwrap().iter().map(|s| s.as_str().unwrap().to_owned()).collect()
    };
    let columns = strings(&v["columns"]);
    let rows = v["rows"].as_array().unwrap().iter().map(strings).collect();
    (columns, rows)
}

/// Minimum positives per query, and the decoy papers that must not appear.
const DECOYS: [(&str, &[&str]); 3] = [
    (
        "events_at_location",
        &[
            "A climatology of winter cold extremes",   // lowercase 'caos'
            "European heat waves and soil moisture",   // event targets a different location
            "Multi-year droughts in western North America", // no matching term
        ],
    ),
    (
        "model_teleconnection_region",
        &[
            "NAO teleconnections to Southeast Asia in CMIP5", // region outside the country
            "ENSO and Southeast US precipitation in CMIP5",   // CMIP5 without NAO
            "CMIP6 projections of NAO impacts",               // wrong generation
        ],
    ),
    (
        "teleconnection_country",
        &[
            "Alaskan climate variability",                 // location not targeted by PNA
            "ENSO teleconnections to the contiguous USA",  // no PNA
            "Drought indices compared",                    // unrelated
        ],
    ),
];

pub fn conformance() -> Outcome {
    let start = Instant::now();
    let g = corpus_graph();
    let mut summary = Vec::new();
    for (name, decoys) in DECOYS {
        let text = query_text(name);
        let ast = parse(&text).map_err(|e| format!("{name}: {e}"))?;
        plan(&ast).map_err(|e| format!("{name}: {e}"))?;
        let table = run_query(&text, &g).map_err(|e| format!("{name}: {e}"))?;
        let engine: Vec<Vec<OCell>> = table.rows.iter().map(|r| r.iter().map(oracle::engine_cell).collect()).collect();
        let engine = text_rows(&engine);
        let (columns, frozen) = frozen_rows(name);
        ensure(table.columns == columns, || format!("{name}: columns {:?}", table.columns))?;
        ensure(engine == frozen, || format!("{name}: engine rows {engine:?} != frozen {frozen:?}"))?;
        let fresh = text_rows(&oracle::run(&ast, &g));
        ensure(fresh == frozen, || format!("{name}: oracle disagrees with frozen rows"))?;
        let positives: std::collections::BTreeSet<&String> = frozen.iter().map(|r| &r[0]).collect();
        ensure(frozen.len() >= 2, || format!("{name}: only {} positive rows", frozen.len()))?;
        for d in decoys {
            ensure(g.nodes_by_label_property("Paper", "title", &PropertyValue::from(*d)).len() == 1, || {
                format!("{name}: decoy paper {d:?} missing from corpus")
            })?;
            ensure(!positives.iter().any(|p| p.as_str() == *d), || format!("{name}: decoy {d:?} returned"))?;
        }
        summary.push(format!("{name}={}", frozen.len()));
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "{} nodes/{} edges; rows {}; {:.0?}",
        g.node_count(),
        g.rel_count(),
        summary.join(" "),
        elapsed
    ))
}

pub fn oracle_equivalence(cases: u64) -> Outcome {
    let start = Instant::now();
    let mut nonempty = 0;
    for seed in 0..cases {
        let mut rng = gen::rng(seed);
        let g = gen::small_graph(&mut rng, 12, 24);
        let ast = gen::small_query(&mut rng);
        let p = plan(&ast).map_err(|e| format!("seed {seed}: plan failed: {e}\n{}", pretty_print(&ast)))?;
        let engine = oracle::engine_bag(&execute_with(&p, &g, ExecOptions::default()));
        let expected = oracle::bag(oracle::run(&ast, &g));
        ensure(engine == expected, || {
            format!(
                "seed {seed}: {} engine rows vs {} oracle rows for\n{}",
                engine.len(),
                expected.len(),
                pretty_print(&ast)
            )
        })?;
        nonempty += usize::from(!expected.is_empty());
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(30), || format!("took {elapsed:?}"))?;
    Ok(format!("{cases}/{cases} agree ({nonempty} with rows); {elapsed:.1?}"))
}

pub fn parser_roundtrip(cases: u64) -> Outcome {
    for seed in 0..cases {
        let ast = gen::arbitrary_ast(&mut gen::rng(seed));
        let text = pretty_print(&ast);
        let back = parse(&text).map_err(|e| format!("seed {seed}: {e}\n{text}"))?;
        ensure(back == ast, || format!("seed {seed}: round-trip mismatch\n{text}"))?;
    }
    Ok(format!("{cases}/{cases} ASTs round-trip"))
}

pub fn desugaring(cases: u64) -> Outcome {
    let mut done = 0;
    let mut seed = 0;
    while done < cases {
        seed += 1;
        let mut rng = gen::rng(10_000 + seed);
        let g = gen::small_graph(&mut rng, 12, 24);
        let ast = gen::small_query(&mut rng);
        let sugared = ast
            .clauses
            .iter()
            .flat_map(|c| &c.patterns)
            .any(|p| !p.start.props.is_empty() || p.steps.iter().any(|(r, n)| !r.props.is_empty() || !n.props.is_empty()));
        if !sugared {
            continue;
        }
        let plain = gen::desugar_prop_maps(&ast);
        let a = oracle::engine_bag(&execute_with(&plan(&ast).unwrap(), &g, ExecOptions::default()));
        let b = oracle::engine_bag(&execute_with(&plan(&plain).unwrap(), &g, ExecOptions::default()));
        ensure(a == b, || {
            format!("seed {seed}: prop-map form\n{}\ndiffers from\n{}", pretty_print(&ast), pretty_print(&plain))
        })?;
        done += 1;
    }
    Ok(format!("{cases}/{cases} query pairs agree"))
}

pub fn snapshot_roundtrip(cases: u64, max_nodes: usize) -> Outcome {
    let mut largest = 0;
    for seed in 0..cases {
        let mut rng = gen::rng(20_000 + seed);
        // the first case sits at the size bound
        let g = if seed == 0 {
            gen::wide_graph_of(&mut rng, max_nodes)
        } else {
            gen::wide_graph(&mut rng, max_nodes.min(50 + seed as usize * 40))
        };
        largest = largest.max(g.node_count());
        let bytes = snapshot::encode(&g);
        let back = snapshot::decode(&bytes).map_err(|e| format!("seed {seed}: {e}"))?;
        ensure(back == g, || format!("seed {seed}: decoded graph differs"))?;
        ensure(back.indexes_consistent(), || format!("seed {seed}: indexes inconsistent after load"))?;
    }
    let g = corpus_graph();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let first = dir.path().join("a.ckg");
    let second = dir.path().join("b.ckg");
    snapshot::save(&g, &first).map_err(|e| e.to_string())?;
    let loaded = snapshot::load(&first).map_err(|e| e.to_string())?;
    ensure(loaded == g, || "corpus snapshot differs after load".into())?;
    snapshot::save(&loaded, &second).map_err(|e| e.to_string())?;
    let (a, b) = (std::fs::read(&first).unwrap(), std::fs::read(&second).unwrap());
    ensure(a == b, || "re-saved corpus snapshot is not byte-identical".into())?;
    Ok(format!(
        "{cases} random graphs (largest {largest} nodes) equal after load; corpus re-save byte-stable ({} bytes)",
        a.len()
    ))
}

pub fn index_effectiveness(n: u64) -> Outcome {
    let mut g = Graph::new();
    for i in 0..n {
        let label = if i % 2 == 0 { "Location" } else { "Paper" };
        g.add_node([label], climakg_core::props! {"Name" => format!("N{i}")}).unwrap();
    }
    let total_locations = g.nodes_by_label("Location").len() as u64;
    let q = "MATCH (l:Location {Name: \"N4242\"}) RETURN l.Name AS name";
    let indexed = run_query(q, &g).map_err(|e| e.to_string())?;
    let scanned = run_query_with(q, &g, ExecOptions { use_prop_index: false }).map_err(|e| e.to_string())?;
    ensure(indexed.rows == scanned.rows, || "indexed and scanned rows differ".into())?;
    ensure(indexed.rows.len() == 1, || format!("{} rows", indexed.rows.len()))?;
    ensure(indexed.stats.nodes_touched <= 10, || format!("indexed path touched {}", indexed.stats.nodes_touched))?;
    // unlabeled scan of every node is the fully unindexed path
    let q_all = "MATCH (l {Name: \"N4242\"}) RETURN l.Name AS name";
    let full = run_query_with(q_all, &g, ExecOptions { use_prop_index: false }).map_err(|e| e.to_string())?;
    ensure(full.stats.nodes_touched == n, || format!("full scan touched {}", full.stats.nodes_touched))?;
    ensure(full.rows == indexed.rows, || "full scan rows differ".into())?;
    Ok(format!(
        "{n} nodes: indexed touched {}, label scan touched {} of {total_locations}, full scan touched {}",
        indexed.stats.nodes_touched, scanned.stats.nodes_touched, full.stats.nodes_touched
    ))
}

fn ingest_twice(options: IngestOptions) -> Result<(Graph, Graph), String> {
    let schema = builtin_climate_schema();
    let path = fixture_path("climate_corpus.ndjson");
    let mut g = Graph::new();
    let first = ingest_file(&mut g, &schema, &path, options).map_err(|e| e.to_string())?;
    ensure(first.errors == 0 && first.violations == 0, || format!("first ingest: {first:?}"))?;
    let once = g.clone();
    let second = ingest_file(&mut g, &schema, &path, options).map_err(|e| e.to_string())?;
    ensure(second.nodes_created == 0, || format!("second ingest created {} nodes", second.nodes_created))?;
    Ok((once, g))
}

fn dedup_sound(g: &Graph) -> Result<(), String> {
    let mut keys = std::collections::HashSet::new();
    let mut dois = std::collections::HashSet::new();
    for n in g.nodes() {
        if let Some(PropertyValue::Text(name)) = n.property("Name") {
            for l in &n.labels {
                ensure(keys.insert((l.clone(), name.clone())), || format!("duplicate key ({l}, {name})"))?;
            }
        }
        if n.has_label("Paper") {
            if let Some(PropertyValue::Text(doi)) = n.property("doi") {
                ensure(dois.insert(doi.clone()), || format!("duplicate doi {doi}"))?;
            }
        }
    }
    Ok(())
}

fn count_type(g: &Graph, t: &str) -> usize {
    g.relationships().filter(|r| r.rel_type == t).count()
}

pub fn ingest_idempotence() -> Outcome {
    let (once, twice) = ingest_twice(IngestOptions { strict: false, dedup_mentions: true })?;
    ensure(once == twice, || "dedup-mentions double ingest changed the graph".into())?;
    dedup_sound(&twice)?;

    let (once, twice) = ingest_twice(IngestOptions::default())?;
    dedup_sound(&twice)?;
    ensure(twice.node_count() == once.node_count(), || "node count changed".into())?;
    let (m1, m2) = (count_type(&once, "Mention"), count_type(&twice, "Mention"));
    let (t1, t2) = (twice.rel_count() - m2, once.rel_count() - m1);
    ensure(m2 == 2 * m1, || format!("mention edges {m1} -> {m2}"))?;
    ensure(t1 == t2, || format!("relation edges {t2} -> {t1}"))?;
    for n in once.nodes() {
        ensure(twice.node(n.id) == Some(n), || format!("node {} changed", n.id))?;
    }
    Ok(format!(
        "dedup flag: identical graphs; default: {} nodes kept, Mention {m1} -> {m2}, other edges {t2} kept",
        once.node_count()
    ))
}

pub fn nlq_fidelity() -> Outcome {
    const QUESTIONS: [(&str, &str); 3] = [
        (
            "events_at_location",
            "Which papers mention anomalous temperature regimes such as cold air outbreaks (CAOs) or warm waves (WWs) in relation to North America, specifically in the sentences where these terms appear?",
        ),
        (
            "model_teleconnection_region",
            "Which papers mention CMIP5 models and the North Atlantic Oscillation (NAO) in the context of the Southeast United States?",
        ),
        (
            "teleconnection_country",
            "Which papers mention the Pacific-North American (PNA) pattern in connection with locations in the United States?",
        ),
    ];
    let templates = builtin_templates();
    let g = corpus_graph();
    let mut ids = Vec::new();
    for (name, question) in QUESTIONS {
        let expected = parse(&query_text(name)).unwrap();
        for graph in [&Graph::new(), &g] {
            let t = translate(question, &templates, graph).map_err(|e| format!("{name}: {e}"))?;
            ensure(t.ast == expected, || format!("{name}: AST differs:\n{}", t.cypher))?;
            ensure(parse(&t.cypher).ok() == Some(t.ast.clone()), || format!("{name}: canonical text does not re-parse"))?;
            if std::ptr::eq(graph, &g) {
                ids.push(t.template_id);
            }
        }
    }
    debug_assert_eq!(QUERIES.len(), ids.len());
    Ok(format!("3/3 questions -> {} (with and without graph gazetteer)", ids.join(", ")))
}
