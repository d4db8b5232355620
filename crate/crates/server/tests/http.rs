use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use axum::body::Body;
use axum::http::{header, Method, Request, StatusCode};
use dialogkg::edit::{replay, AuditLog};
use dialogkg::edges::TailIdentity;
use dialogkg::graph::{assemble, Graph};
use dialogkg::kb::load_kb;
use dialogkg_server::api::{router, AppState, ServiceConfig};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(name)
}

fn base_graph() -> Graph {
    assemble(&load_kb(fixture("kb.tsv")).unwrap(), &[], TailIdentity::Global).unwrap()
}

fn state(dir: &Path, token: Option<&str>) -> Arc<AppState> {
    let log = AuditLog::open(dir.join("audit.jsonl")).unwrap();
    let config = ServiceConfig { token: token.map(str::to_string), ..Default::default() };
    Arc::new(AppState::new(base_graph(), log, HashMap::new(), config))
}

async fn call(s: &Arc<AppState>, method: Method, uri: &str, body: Option<Value>, token: Option<&str>) -> (StatusCode, Value) {
    let mut req = Request::builder().method(method).uri(uri);
    if let Some(t) = token {
        req = req.header(header::AUTHORIZATION, format!("Bearer {t}"));
    }
    let req = match body {
        Some(b) => req.header(header::CONTENT_TYPE, "application/json").body(Body::from(b.to_string())),
        None => req.body(Body::empty()),
    }
    .unwrap();
    let resp = router(s.clone()).oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
}

fn add_tail(tail: &str) -> Value {
    json!({ "op": "add_tail", "payload": { "head": "sick", "relation": "xWant", "tail": tail }, "author": "ann" })
}

#[tokio::test]
async fn browse_endpoints() {
    let dir = tempfile::tempdir().unwrap();
    let s = state(dir.path(), None);
    let (st, health) = call(&s, Method::GET, "/health", None, None).await;
    assert_eq!((st, health["status"].as_str()), (StatusCode::OK, Some("ok")));

    let (st, node) = call(&s, Method::GET, "/nodes/sick", None, None).await;
    assert_eq!(st, StatusCode::OK);
    assert_eq!(node["node"]["text"], "PersonX feels sick");
    assert_eq!(node["out_degree"], 7);

    let (st, _) = call(&s, Method::GET, "/nodes/missing", None, None).await;
    assert_eq!(st, StatusCode::NOT_FOUND);

    let (st, nb) = call(&s, Method::GET, "/nodes/tail:angry/neighbors?kinds=atomic&direction=in", None, None).await;
    assert_eq!(st, StatusCode::OK);
    assert_eq!(nb["neighbors"][0]["node"]["id"], "sleep");
    let (st, _) = call(&s, Method::GET, "/nodes/sick/neighbors?kinds=bogus", None, None).await;
    assert_eq!(st, StatusCode::BAD_REQUEST);

    let (_, found) = call(&s, Method::GET, "/search?q=medicine", None, None).await;
    assert!(found["results"].as_array().unwrap().iter().any(|n| n["id"] == "tail:take medicine"));

    let (_, stats) = call(&s, Method::GET, "/stats", None, None).await;
    assert_eq!(stats["total_triplets"], stats["atomic_relations"]);

    let (st, _) = call(&s, Method::GET, "/scenarios/campus/graph", None, None).await;
    assert_eq!(st, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn read_your_write() {
    let dir = tempfile::tempdir().unwrap();
    let s = state(dir.path(), None);
    let (st, out) = call(&s, Method::POST, "/edits", Some(add_tail("to rest")), None).await;
    assert_eq!(st, StatusCode::OK, "{out}");
    assert_eq!(out["version"], 1);
    let (_, nb) = call(&s, Method::GET, "/nodes/sick/neighbors?kinds=atomic&direction=out", None, None).await;
    assert!(nb["neighbors"].as_array().unwrap().iter().any(|n| n["node"]["text"] == "to rest"));
    let (_, log) = call(&s, Method::GET, "/edits", None, None).await;
    assert_eq!(log["entries"].as_array().unwrap().len(), 1);
}

#[tokio::test]
async fn edit_errors_map_to_status_codes() {
    let dir = tempfile::tempdir().unwrap();
    let s = state(dir.path(), Some("secret"));
    let (st, _) = call(&s, Method::POST, "/edits", Some(add_tail("x")), None).await;
    assert_eq!(st, StatusCode::UNAUTHORIZED);
    let (st, _) = call(&s, Method::POST, "/edits", Some(add_tail("x")), Some("wrong")).await;
    assert_eq!(st, StatusCode::UNAUTHORIZED);

    let missing = json!({ "op": "delete_tail", "payload": { "head": "sick", "relation": "xWant", "tail": "fly" }, "author": "ann" });
    let (st, _) = call(&s, Method::POST, "/edits", Some(missing), Some("secret")).await;
    assert_eq!(st, StatusCode::NOT_FOUND);

    let other = json!({
        "op": "add_flow_edge",
        "payload": { "kind": "emotion_intent", "from": "tail:uncomfortable", "to": "tail:take medicine", "intent_label": "other" },
        "author": "ann"
    });
    let (st, err) = call(&s, Method::POST, "/edits", Some(other), Some("secret")).await;
    assert_eq!(st, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(err["field"], "payload.intent_label");

    let (st, _) = call(&s, Method::POST, "/edits", Some(json!({ "op": "add_tail" })), Some("secret")).await;
    assert_eq!(st, StatusCode::UNPROCESSABLE_ENTITY);

    let mut stale = add_tail("y");
    stale["base_version"] = json!(5);
    let (st, err) = call(&s, Method::POST, "/edits", Some(stale), Some("secret")).await;
    assert_eq!((st, err["current_version"].as_u64()), (StatusCode::CONFLICT, Some(0)));

    assert_eq!(s.snapshot().to_bytes(), base_graph().to_bytes());
    assert!(s.audit_entries().is_empty());
}

#[tokio::test]
async fn audit_log_replays_to_live_graph() {
    let dir = tempfile::tempdir().unwrap();
    let s = state(dir.path(), None);
    let edits = [
        add_tail("to rest"),
        json!({ "op": "revise_tail", "payload": { "head": "sick", "relation": "xWant", "tail": "to rest", "new_tail": "to sleep" }, "author": "ann" }),
        json!({ "op": "add_flow_edge", "payload": { "kind": "emotion_cause", "from": "tail:angry", "to": "tail:insomnia" }, "author": "bo" }),
        json!({ "op": "add_flow_edge", "payload": { "kind": "emotion_intent", "from": "tail:uncomfortable", "to": "tail:to sleep", "intent_label": "advise" }, "author": "bo", "base_version": 3 }),
        json!({ "op": "delete_tail", "payload": { "head": "sleep", "relation": "xNeed", "tail": "insomnia" }, "author": "ann" }),
    ];
    for e in edits {
        let (st, out) = call(&s, Method::POST, "/edits", Some(e), None).await;
        assert_eq!(st, StatusCode::OK, "{out}");
    }
    let live = s.snapshot();
    assert_eq!(live.version(), 5);

    let reopened = AuditLog::open(dir.path().join("audit.jsonl")).unwrap();
    let mut replayed = base_graph();
    replay(&mut replayed, reopened.entries()).unwrap();
    assert_eq!(replayed.to_bytes(), live.to_bytes());
}
