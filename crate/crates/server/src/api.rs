//! HTTP API over a loaded graph: browse endpoints plus the audited edit path.
//!
//! Readers clone an `Arc<Graph>` snapshot and never block on a writer for
//! longer than the pointer swap. Writers are serialized by the audit-log
//! mutex; an edit is validated against the current snapshot, appended and
//! synced to the log, and only then committed.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, RwLock};

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use dialogkg::edit::{self, AuditEntry, AuditLog, EditError, EditOp, EditOutcome};
use dialogkg::graph::{Direction, Family, Graph};
use dialogkg::link::MentionHeadMatch;
use serde::Deserialize;
use serde_json::{json, Value};

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    /// Bearer token required by `POST /edits`; `None` disables the check.
    pub token: Option<String>,
    /// Head fraction used by `/scenarios/{id}/graph` when none is given.
    pub default_fraction: f64,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self { token: None, default_fraction: 0.005 }
    }
}

pub struct AppState {
    graph: RwLock<Arc<Graph>>,
    log: Mutex<AuditLog>,
    scenarios: HashMap<String, Vec<MentionHeadMatch>>,
    config: ServiceConfig,
}

impl AppState {
    pub fn new(graph: Graph, log: AuditLog, scenarios: HashMap<String, Vec<MentionHeadMatch>>, config: ServiceConfig) -> Self {
        Self { graph: RwLock::new(Arc::new(graph)), log: Mutex::new(log), scenarios, config }
    }

    pub fn snapshot(&self) -> Arc<Graph> {
        self.graph.read().expect("graph lock poisoned").clone()
    }

    pub fn audit_entries(&self) -> Vec<AuditEntry> {
        self.log.lock().expect("audit lock poisoned").entries().to_vec()
    }

    /// The single write path: validate, make durable, then publish.
    pub fn submit(&self, op: &EditOp) -> dialogkg::Result<EditOutcome> {
        let mut log = self.log.lock().expect("audit lock poisoned");
        let snapshot = self.snapshot();
        edit::validate(&snapshot, op)?;
        log.append(op, snapshot.version() + 1)?;
        drop(snapshot);
        let mut guard = self.graph.write().expect("graph lock poisoned");
        Ok(edit::commit(Arc::make_mut(&mut guard), op))
    }
}

pub type SharedState = Arc<AppState>;

pub fn router(state: SharedState) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/nodes/{id}", get(node))
        .route("/nodes/{id}/neighbors", get(neighbors))
        .route("/search", get(search))
        .route("/scenarios/{id}/graph", get(scenario))
        .route("/stats", get(stats))
        .route("/edits", get(list_edits).post(post_edit))
        .with_state(state)
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: Value,
}

impl ApiError {
    fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        Self { status, body: json!({ "error": code, "message": message.into() }) }
    }

    fn with(mut self, key: &str, value: Value) -> Self {
        self.body[key] = value;
        self
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

impl From<dialogkg::Error> for ApiError {
    fn from(e: dialogkg::Error) -> Self {
        use dialogkg::Error as E;
        let message = e.to_string();
        match e {
            E::Edit(EditError::NotFound(_)) | E::UnknownNode(_) => Self::new(StatusCode::NOT_FOUND, "not_found", message),
            E::Edit(EditError::Invalid { field, .. }) => {
                Self::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid", message).with("field", json!(field))
            }
            E::Edit(EditError::Stale { current, .. }) => {
                Self::new(StatusCode::CONFLICT, "stale", message).with("current_version", json!(current))
            }
            E::Invalid { .. } | E::Empty(_) => Self::new(StatusCode::BAD_REQUEST, "bad_request", message),
            _ => Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message),
        }
    }
}

type ApiResult = Result<Json<Value>, ApiError>;

fn to_value(v: impl serde::Serialize) -> Value {
    serde_json::to_value(v).expect("API types serialize")
}

async fn health(State(s): State<SharedState>) -> Json<Value> {
    let g = s.snapshot();
    Json(json!({ "status": "ok", "version": g.version(), "nodes": g.node_count(), "edges": g.edge_count() }))
}

async fn node(State(s): State<SharedState>, Path(id): Path<String>) -> ApiResult {
    let g = s.snapshot();
    let n = g.node(&id)?;
    let categories: Vec<&str> = g.tail_categories(&id).into_iter().map(|c| c.name()).collect();
    Ok(Json(json!({
        "node": n,
        "tail_categories": categories,
        "out_degree": g.out_edges(&id).count(),
        "in_degree": g.in_edges(&id).count(),
        "version": g.version(),
    })))
}

#[derive(Debug, Deserialize)]
struct NeighborQuery {
    /// Comma-separated families; absent means all.
    kinds: Option<String>,
    direction: Option<String>,
}

async fn neighbors(State(s): State<SharedState>, Path(id): Path<String>, Query(q): Query<NeighborQuery>) -> ApiResult {
    let families: Option<Vec<Family>> = q
        .kinds
        .as_deref()
        .filter(|k| !k.is_empty())
        .map(|k| k.split(',').map(|f| f.trim().parse()).collect::<dialogkg::Result<_>>())
        .transpose()?;
    let direction: Direction = q.direction.as_deref().unwrap_or("both").parse()?;
    let g = s.snapshot();
    let list: Vec<Value> = g
        .neighbors(&id, families.as_deref(), direction)?
        .into_iter()
        .map(|(e, n)| json!({ "edge": e, "node": n }))
        .collect();
    Ok(Json(json!({ "node": id, "version": g.version(), "neighbors": list })))
}

#[derive(Debug, Deserialize)]
struct SearchQuery {
    q: String,
    limit: Option<usize>,
}

async fn search(State(s): State<SharedState>, Query(q): Query<SearchQuery>) -> ApiResult {
    let g = s.snapshot();
    Ok(Json(json!({ "query": q.q, "results": g.search(&q.q, q.limit.unwrap_or(20)) })))
}

#[derive(Debug, Deserialize)]
struct ScenarioQuery {
    fraction: Option<f64>,
}

async fn scenario(State(s): State<SharedState>, Path(id): Path<String>, Query(q): Query<ScenarioQuery>) -> ApiResult {
    let matches = s.scenarios.get(&id).ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, "not_found", format!("scenario `{id}`")))?;
    let g = s.snapshot();
    let sg = g.scenario_subgraph(&id, matches, q.fraction.unwrap_or(s.config.default_fraction))?;
    Ok(Json(to_value(sg)))
}

async fn stats(State(s): State<SharedState>) -> ApiResult {
    let g = s.snapshot();
    let mut v = to_value(g.stats());
    v["nodes"] = json!(g.node_count());
    v["version"] = json!(g.version());
    Ok(Json(v))
}

#[derive(Debug, Deserialize)]
struct EditsQuery {
    since: Option<u64>,
}

async fn list_edits(State(s): State<SharedState>, Query(q): Query<EditsQuery>) -> ApiResult {
    let since = q.since.unwrap_or(0);
    let entries: Vec<AuditEntry> = s.audit_entries().into_iter().filter(|e| e.seq >= since).collect();
    Ok(Json(json!({ "version": s.snapshot().version(), "entries": entries })))
}

fn authorize(s: &AppState, headers: &HeaderMap) -> Result<(), ApiError> {
    let Some(token) = &s.config.token else { return Ok(()) };
    let given = headers.get(header::AUTHORIZATION).and_then(|h| h.to_str().ok()).and_then(|h| h.strip_prefix("Bearer "));
    if given == Some(token.as_str()) {
        Ok(())
    } else {
        Err(ApiError::new(StatusCode::UNAUTHORIZED, "unauthorized", "missing or wrong bearer token"))
    }
}

async fn post_edit(State(s): State<SharedState>, headers: HeaderMap, body: Result<Json<EditOp>, JsonRejection>) -> ApiResult {
    authorize(&s, &headers)?;
    let Json(mut op) = body.map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid", e.body_text()).with("field", json!("body")))?;
    if op.timestamp == 0 {
        op.timestamp = std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map_or(0, |d| d.as_millis() as u64);
    }
    let outcome = tokio::task::spawn_blocking(move || s.submit(&op))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))??;
    Ok(Json(to_value(outcome)))
}

/// Binds and serves until the process is stopped.
pub async fn serve(state: SharedState, bind: &str) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(bind).await?;
    tracing::info!(addr = %listener.local_addr()?, "listening");
    axum::serve(listener, router(state)).await
}
