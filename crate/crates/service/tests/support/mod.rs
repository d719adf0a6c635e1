#![allow(dead_code)]

use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use climakg_core::engine::Cell;
use climakg_core::{builtin_climate_schema, run_query, Graph};
use climakg_service::{router, AppState, ServiceConfig};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

pub fn app(graph: Graph, writable: bool) -> (Arc<AppState>, Router) {
    let state = Arc::new(AppState::new(
        graph,
        builtin_climate_schema(),
        ServiceConfig { writable, snapshot_loaded: false },
    ));
    (state.clone(), router(state))
}

pub async fn send(app: &Router, req: Request<Body>) -> (StatusCode, Vec<u8>) {
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, bytes.to_vec())
}

pub async fn get(app: &Router, uri: &str) -> (StatusCode, Value) {
    let (s, b) = send(app, Request::get(uri).body(Body::empty()).unwrap()).await;
    (s, serde_json::from_slice(&b).unwrap_or(Value::Null))
}

pub async fn post_json(app: &Router, uri: &str, body: Value) -> (StatusCode, Value) {
    let req = Request::post(uri)
        .header("content-type", "application/json")
        .body(Body::from(body.to_string()))
        .unwrap();
    let (s, b) = send(app, req).await;
    (s, serde_json::from_slice(&b).unwrap_or(Value::Null))
}

pub async fn post_text(app: &Router, uri: &str, body: String) -> (StatusCode, Value) {
    let req = Request::post(uri).body(Body::from(body)).unwrap();
    let (s, b) = send(app, req).await;
    (s, serde_json::from_slice(&b).unwrap_or(Value::Null))
}

pub async fn query(app: &Router, text: &str) -> (StatusCode, Value) {
    post_json(app, "/api/query", json!({ "query": text })).await
}

/// Engine rows in wire form, written independently of the service encoder.
fn engine_rows(text: &str, graph: &Graph) -> Vec<Vec<Value>> {
    let table = run_query(text, graph).unwrap();
    table
        .rows
        .iter()
        .map(|row| {
            row.iter()
                .map(|c| match c {
                    Cell::Null => Value::Null,
                    Cell::Value(v) => match v.as_text() {
                        Some(s) => Value::String(s.to_owned()),
                        None => serde_json::to_value(v).unwrap(),
                    },
                    Cell::Node(id) => json!({ "id": id.0 }),
                    Cell::Rel(id) => json!({ "id": id.0 }),
                })
                .collect()
        })
        .collect()
}

fn id_only(rows: &Value) -> Vec<Vec<Value>> {
    rows.as_array()
        .unwrap()
        .iter()
        .map(|r| {
            r.as_array()
                .unwrap()
                .iter()
                .map(|c| match c.get("id") {
                    Some(id) => json!({ "id": id }),
                    None => c.clone(),
                })
                .collect()
        })
        .collect()
}

/// POST /api/query rows equal direct engine rows for every query.
pub async fn check_parity(graph: Graph, queries: &[(&str, String)]) -> Result<String, String> {
    let (_, app) = app(graph.clone(), false);
    let mut total = 0;
    for (name, text) in queries {
        let (status, body) = query(&app, text).await;
        if status != StatusCode::OK {
            return Err(format!("{name}: status {status}: {body}"));
        }
        let served = id_only(&body["rows"]);
        let direct = engine_rows(text, &graph);
        if served != direct {
            return Err(format!("{name}: served {served:?} != engine {direct:?}"));
        }
        let rows_total = body["stats"]["rows_total"].as_u64();
        if rows_total != Some(direct.len() as u64) || body["stats"]["truncated"] != json!(false) {
            return Err(format!("{name}: bad stats {}", body["stats"]));
        }
        total += direct.len();
    }
    Ok(format!("{} queries, {total} rows identical", queries.len()))
}

/// NDJSON batch adding `papers` papers, each mentioning `target`.
pub fn paper_batch(papers: usize, target_label: &str, target_name: &str) -> String {
    let mut out = String::new();
    for i in 0..papers {
        let title = format!("Swap batch paper {i}");
        out.push_str(&json!({"kind": "paper", "title": title}).to_string());
        out.push('\n');
        out.push_str(
            &json!({
                "kind": "mention",
                "paper": title,
                "target": {"label": target_label, "name": target_name},
                "sentence": format!("sentence {i}"),
            })
            .to_string(),
        );
        out.push('\n');
    }
    out
}

/// Queries repeatedly while a large ingest runs; every observed row count
/// must be the pre-ingest or the post-ingest count.
pub async fn check_swap_atomicity(graph: Graph, papers: usize) -> Result<String, String> {
    let probe = r#"MATCH (p:Paper)-[:Mention]->(l:Location {Name:"NORTH_AMERICA"}) RETURN p.title"#;
    let before = run_query(probe, &graph).map_err(|e| e.to_string())?.rows.len() as u64;
    let after = before + papers as u64;
    let (_, app) = app(graph, true);
    let batch = paper_batch(papers, "Location", "NORTH_AMERICA");

    let ingest_app = app.clone();
    let ingest = tokio::spawn(async move { post_text(&ingest_app, "/api/ingest", batch).await });
    let mut seen = std::collections::BTreeMap::<u64, u64>::new();
    let readers: Vec<_> = (0..4)
        .map(|_| {
            let app = app.clone();
            tokio::spawn(async move {
                let mut counts = Vec::new();
                loop {
                    let (status, body) = query(&app, probe).await;
                    assert_eq!(status, StatusCode::OK);
                    let n = body["stats"]["rows_total"].as_u64().unwrap();
                    counts.push(n);
                    if n != before || counts.len() > 200_000 {
                        break counts;
                    }
                }
            })
        })
        .collect();
    let (status, stats) = ingest.await.map_err(|e| e.to_string())?;
    if status != StatusCode::OK || stats["errors"] != json!(0) {
        return Err(format!("ingest failed: {status} {stats}"));
    }
    for r in readers {
        for n in r.await.map_err(|e| e.to_string())? {
            *seen.entry(n).or_default() += 1;
        }
    }
    if seen.keys().any(|n| *n != before && *n != after) {
        return Err(format!("partial graph observed: counts {seen:?}, expected {before} or {after}"));
    }
    let during = seen.get(&before).copied().unwrap_or(0);
    if during == 0 {
        return Err("no query overlapped the ingest".into());
    }
    Ok(format!("{during} reads during ingest saw {before} rows, then {after}; no partial counts"))
}
