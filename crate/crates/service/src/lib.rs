//! HTTP API over a published, immutable graph. Readers clone an `Arc` to the
//! current graph; ingestion builds a replacement off to the side and swaps it
//! in under a short write lock, so a request never sees a half-applied batch.

mod error;
pub mod wire;

use std::io::Cursor;
use std::net::SocketAddr;
use std::sync::{Arc, RwLock};
use std::time::Instant;

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::routing::{get, post};
use axum::{Json, Router};
use climakg_core::engine::{execute, plan};
use climakg_core::ingest::{ingest_reader, IngestOptions, IngestStats};
use climakg_core::nlq::{ExternalTranslator, NlqError, Translation, Translator};
use climakg_core::{cypher, Direction, Graph, NodeId, SchemaDef};
use log::info;
use serde::{Deserialize, Serialize};
use serde_json::json;
use tokio::net::TcpListener;
use tower_http::cors::CorsLayer;

pub use error::{ApiError, ErrorBody, ErrorCode};
pub use wire::{QueryRequest, QueryResponse, DEFAULT_LIMIT};

pub const DEFAULT_PORT: u16 = 8628;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ServiceConfig {
    /// Accept POST /api/ingest.
    pub writable: bool,
    /// Reported by /health.
    pub snapshot_loaded: bool,
}

struct Published {
    graph: Arc<Graph>,
    translator: Arc<Translator>,
}

pub struct AppState {
    current: RwLock<Published>,
    /// Serializes ingests so concurrent batches don't overwrite each other.
    writer: tokio::sync::Mutex<()>,
    schema: Arc<SchemaDef>,
    schema_json: String,
    external: Option<Arc<dyn ExternalTranslator>>,
    config: ServiceConfig,
}

impl AppState {
    pub fn new(graph: Graph, schema: SchemaDef, config: ServiceConfig) -> Self {
        Self::build(graph, schema, config, None)
    }

    pub fn with_external(
        graph: Graph,
        schema: SchemaDef,
        config: ServiceConfig,
        external: Arc<dyn ExternalTranslator>,
    ) -> Self {
        Self::build(graph, schema, config, Some(external))
    }

    fn build(
        graph: Graph,
        schema: SchemaDef,
        config: ServiceConfig,
        external: Option<Arc<dyn ExternalTranslator>>,
    ) -> Self {
        let schema_json = serde_json::to_string(&schema).expect("schema serializes");
        let translator = make_translator(&graph, &external);
        AppState {
            current: RwLock::new(Published { graph: Arc::new(graph), translator }),
            writer: tokio::sync::Mutex::new(()),
            schema: Arc::new(schema),
            schema_json,
            external,
            config,
        }
    }

    /// The currently published graph.
    pub fn graph(&self) -> Arc<Graph> {
        self.current.read().unwrap().graph.clone()
    }

    fn translator(&self) -> Arc<Translator> {
        self.current.read().unwrap().translator.clone()
    }

    fn publish(&self, graph: Graph) {
        let translator = make_translator(&graph, &self.external);
        let mut current = self.current.write().unwrap();
        *current = Published { graph: Arc::new(graph), translator };
    }
}

fn make_translator(graph: &Graph, external: &Option<Arc<dyn ExternalTranslator>>) -> Arc<Translator> {
    let t = Translator::new(graph);
    Arc::new(match external {
        Some(e) => t.with_external(e.clone()),
        None => t,
    })
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/api/query", post(query))
        .route("/api/schema", get(schema))
        .route("/api/nodes/{id}", get(node))
        .route("/api/nodes/{id}/neighbors", get(neighbors))
        .route("/api/ingest", post(ingest))
        .route("/api/nlq", post(nlq))
        .layer(CorsLayer::permissive())
        .with_state(state)
}

/// Serves until ctrl-c.
pub async fn serve(listener: TcpListener, state: Arc<AppState>) -> std::io::Result<()> {
    if let Ok(addr) = listener.local_addr() {
        info!("listening on http://{addr}");
    }
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

pub async fn bind(port: u16) -> std::io::Result<TcpListener> {
    TcpListener::bind(SocketAddr::from(([0, 0, 0, 0], port))).await
}

async fn health(State(state): State<Arc<AppState>>) -> Json<serde_json::Value> {
    let g = state.graph();
    Json(json!({
        "status": "ok",
        "nodes": g.node_count(),
        "edges": g.rel_count(),
        "snapshot_loaded": state.config.snapshot_loaded,
    }))
}

/// Runs a query against `graph` and renders the wire response.
pub fn run_request(graph: &Graph, req: &QueryRequest) -> Result<QueryResponse, ApiError> {
    let limit = req.limit.unwrap_or(DEFAULT_LIMIT);
    if limit == 0 {
        return Err(ApiError::bad_request("limit must be a positive integer"));
    }
    let started = Instant::now();
    let ast = cypher::parse(&req.query)?;
    let plan = plan(&ast).map_err(climakg_core::QueryError::from)?;
    let table = execute(&plan, graph);
    let elapsed_ms = started.elapsed().as_secs_f64() * 1000.0;
    Ok(wire::query_response(graph, table, limit, elapsed_ms))
}

fn body<T>(payload: Result<Json<T>, JsonRejection>) -> Result<T, ApiError> {
    payload.map(|Json(v)| v).map_err(|e| ApiError::bad_request(e.body_text()))
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::internal(format!("worker failed: {e}")))
}

async fn query(
    State(state): State<Arc<AppState>>,
    payload: Result<Json<QueryRequest>, JsonRejection>,
) -> Result<Json<QueryResponse>, ApiError> {
    let req = body(payload)?;
    let graph = state.graph();
    blocking(move || run_request(&graph, &req)).await?.map(Json)
}

async fn schema(State(state): State<Arc<AppState>>) -> impl axum::response::IntoResponse {
    (
        [(axum::http::header::CONTENT_TYPE, "application/json")],
        state.schema_json.clone(),
    )
}

fn node_id(raw: &str, graph: &Graph) -> Result<NodeId, ApiError> {
    let id: u64 = raw
        .parse()
        .map_err(|_| ApiError::bad_request(format!("node id must be numeric, got {raw:?}")))?;
    let id = NodeId(id);
    graph
        .node(id)
        .map(|_| id)
        .ok_or_else(|| ApiError::not_found(format!("unknown node {id}")))
}

async fn node(
    State(state): State<Arc<AppState>>,
    Path(raw): Path<String>,
) -> Result<Json<wire::NodePayload>, ApiError> {
    let graph = state.graph();
    let id = node_id(&raw, &graph)?;
    Ok(Json(wire::node_payload(&graph, id).expect("checked above")))
}

#[derive(Debug, Deserialize)]
struct NeighborParams {
    direction: Option<String>,
    #[serde(rename = "type")]
    rel_type: Option<String>,
}

/// Neighbor nodes (first-seen order) and the edges reaching them.
async fn neighbors(
    State(state): State<Arc<AppState>>,
    Path(raw): Path<String>,
    params: Result<Query<NeighborParams>, QueryRejection>,
) -> Result<Json<wire::SubgraphPayload>, ApiError> {
    let Query(params) = params.map_err(|e| ApiError::bad_request(e.body_text()))?;
    let direction: Direction = match params.direction.as_deref() {
        None | Some("") => Direction::Both,
        Some(d) => d.parse().map_err(ApiError::bad_request)?,
    };
    let graph = state.graph();
    let id = node_id(&raw, &graph)?;
    let hits = graph
        .neighbors(id, direction, params.rel_type.as_deref().filter(|t| !t.is_empty()))
        .map_err(|e| ApiError::not_found(e.to_string()))?;
    let mut out = wire::SubgraphPayload::default();
    let mut seen_nodes = std::collections::HashSet::new();
    let mut seen_rels = std::collections::HashSet::new();
    for (rel, other) in hits {
        if seen_rels.insert(rel) {
            out.edges.extend(wire::edge_payload(&graph, rel));
        }
        if seen_nodes.insert(other) {
            out.nodes.extend(wire::node_payload(&graph, other));
        }
    }
    Ok(Json(out))
}

#[derive(Debug, Deserialize)]
struct IngestParams {
    #[serde(default)]
    strict: bool,
    #[serde(default)]
    dedup_mentions: bool,
}

async fn ingest(
    State(state): State<Arc<AppState>>,
    params: Result<Query<IngestParams>, QueryRejection>,
    body: String,
) -> Result<Json<IngestStats>, ApiError> {
    if !state.config.writable {
        return Err(ApiError::new(
            StatusCode::CONFLICT,
            ErrorCode::ReadOnly,
            "server is read-only; restart with --writable to accept ingests",
        ));
    }
    let Query(params) = params.map_err(|e| ApiError::bad_request(e.body_text()))?;
    let options = IngestOptions { strict: params.strict, dedup_mentions: params.dedup_mentions };
    let _guard = state.writer.lock().await;
    let worker_state = state.clone();
    let stats = blocking(move || {
        let mut staging = (*worker_state.graph()).clone();
        let stats = ingest_reader(&mut staging, &worker_state.schema, Cursor::new(body), options)
            .map_err(|e| ApiError::bad_request(e.to_string()))?;
        worker_state.publish(staging);
        Ok::<_, ApiError>(stats)
    })
    .await??;
    info!("ingest applied: {stats:?}");
    Ok(Json(stats))
}

#[derive(Debug, Deserialize)]
struct NlqRequest {
    text: String,
    /// Also run the translated query.
    #[serde(default)]
    execute: bool,
    #[serde(default)]
    limit: Option<u64>,
}

#[derive(Debug, Serialize)]
struct NlqResponse {
    #[serde(flatten)]
    translation: Translation,
    #[serde(skip_serializing_if = "Option::is_none")]
    result: Option<QueryResponse>,
}

async fn nlq(
    State(state): State<Arc<AppState>>,
    payload: Result<Json<NlqRequest>, JsonRejection>,
) -> Result<Json<NlqResponse>, axum::response::Response> {
    use axum::response::IntoResponse;
    let req = body(payload).map_err(IntoResponse::into_response)?;
    let translator = state.translator();
    let translation = match translator.translate(&req.text) {
        Ok(t) => t,
        Err(NlqError::NoMatch(no_match)) => {
            let body = json!({ "code": "no_match", "reasons": no_match.reasons });
            return Err((StatusCode::UNPROCESSABLE_ENTITY, Json(body)).into_response());
        }
        Err(NlqError::Parse(e)) => return Err(ApiError::from(e).into_response()),
        Err(e @ NlqError::External(_)) => {
            return Err(ApiError::new(StatusCode::BAD_GATEWAY, ErrorCode::BadRequest, e.to_string()).into_response())
        }
    };
    let result = if req.execute {
        let graph = state.graph();
        let q = QueryRequest { query: translation.cypher.clone(), limit: req.limit };
        Some(
            blocking(move || run_request(&graph, &q))
                .await
                .and_then(|r| r)
                .map_err(IntoResponse::into_response)?,
        )
    } else {
        None
    };
    Ok(Json(NlqResponse { translation, result }))
}
