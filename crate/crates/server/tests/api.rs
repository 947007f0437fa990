use std::sync::Arc;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use crucible_core::fixtures;
use crucible_core::ProjectStore;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

struct Api {
    _dir: tempfile::TempDir,
    store_dir: std::path::PathBuf,
}

impl Api {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let store_dir = dir.path().to_path_buf();
        Api { _dir: dir, store_dir }
    }

    /// A fresh router over the same directory, as after a restart.
    fn app(&self) -> Router {
        crucible_server::router(Arc::new(ProjectStore::open(&self.store_dir).unwrap()), None)
    }

    async fn call(&self, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
        let mut req = Request::builder().method(method).uri(uri);
        let body = match body {
            Some(v) => {
                req = req.header("content-type", "application/json");
                Body::from(v.to_string())
            }
            None => Body::empty(),
        };
        let resp = self.app().oneshot(req.body(body).unwrap()).await.unwrap();
        let status = resp.status();
        let bytes = resp.into_body().collect().await.unwrap().to_bytes();
        let value = if bytes.is_empty() { Value::Null } else { serde_json::from_slice(&bytes).unwrap() };
        (status, value)
    }

    async fn ok(&self, method: Method, uri: &str, body: Option<Value>) -> Value {
        let (status, v) = self.call(method, uri, body).await;
        assert!(status.is_success(), "{uri}: {status} {v}");
        v
    }
}

const T: &str = "/projects/lists/tests/twoNode";

async fn lists_project(api: &Api, source: &str) {
    let (status, v) = api
        .call(Method::POST, "/projects", Some(json!({"name": "lists", "modelSource": source})))
        .await;
    assert_eq!(status, StatusCode::CREATED);
    assert_eq!(v["schema"]["sigs"][0]["name"], "List");
    api.ok(Method::POST, "/projects/lists/tests", Some(json!({"name": "twoNode"}))).await;
}

async fn build_fig1(api: &Api) -> (String, String, String) {
    let l = api.ok(Method::POST, &format!("{T}/atoms"), Some(json!({"sig": "List", "x": 0, "y": 0}))).await;
    let n0 = api.ok(Method::POST, &format!("{T}/atoms"), Some(json!({"sig": "Node", "x": 1, "y": 1}))).await;
    let n1 = api.ok(Method::POST, &format!("{T}/atoms"), Some(json!({"sig": "Node"}))).await;
    assert_eq!(n1["nickname"], "Node1");
    let ids = |v: &Value| v["id"].as_str().unwrap().to_string();
    let (l, n0, n1) = (ids(&l), ids(&n0), ids(&n1));
    api.ok(Method::POST, &format!("{T}/connections"), Some(json!({"relation": "header", "atomIds": [l, n0]})))
        .await;
    api.ok(Method::POST, &format!("{T}/connections"), Some(json!({"relation": "link", "atomIds": [n0, n1]})))
        .await;
    api.ok(Method::PUT, &format!("{T}/predicates/acyclic"), Some(json!({"state": "valid", "args": []})))
        .await;
    (l, n0, n1)
}

#[tokio::test]
async fn fig1_over_http() {
    let api = Api::new();
    lists_project(&api, fixtures::LIST_FAULTY).await;
    build_fig1(&api).await;

    let translated = api.ok(Method::POST, &format!("{T}/translate"), None).await;
    let golden = include_str!("../../core/tests/golden/lists_two_node.txt");
    assert_eq!(translated["commandString"], golden);

    let run = api.ok(Method::POST, &format!("{T}/run"), Some(json!({}))).await;
    assert_eq!(run["status"], "fail");
    let failing: Vec<&Value> = run["diagnostics"].as_array().unwrap().iter().filter(|d| d["holds"] == false).collect();
    assert_eq!(failing.len(), 1);
    assert_eq!(failing[0]["detail"], "acyclic expected valid, evaluated false");
}

#[tokio::test]
async fn second_list_is_blocked_with_verdict() {
    let api = Api::new();
    lists_project(&api, fixtures::LIST_FAULTY).await;
    api.ok(Method::POST, &format!("{T}/atoms"), Some(json!({"sig": "List"}))).await;
    let (status, v) = api.call(Method::POST, &format!("{T}/atoms"), Some(json!({"sig": "List"}))).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(v["code"], "guidanceViolation");
    assert_eq!(v["details"]["verdict"], "blocked");
    assert!(v["details"]["message"].as_str().unwrap().contains("one sig List"), "{v}");
    let test = api.ok(Method::GET, T, None).await;
    assert_eq!(test["atoms"].as_array().unwrap().len(), 1, "blocked edits are not persisted");
}

#[tokio::test]
async fn valid_targets_and_lone_cap() {
    let api = Api::new();
    lists_project(&api, fixtures::LIST_FAULTY).await;
    let (l, n0, n1) = build_fig1(&api).await;
    let v = api
        .ok(Method::POST, &format!("{T}/valid-targets"), Some(json!({"relation": "header", "prefixAtomIds": []})))
        .await;
    assert_eq!(v["targets"], json!([l]));
    let v = api
        .ok(Method::POST, &format!("{T}/valid-targets"), Some(json!({"relation": "header", "prefixAtomIds": [l]})))
        .await;
    assert_eq!(v["targets"], json!([]), "header is lone and already used");
    let v = api
        .ok(Method::POST, &format!("{T}/valid-targets"), Some(json!({"relation": "link", "prefixAtomIds": [n1]})))
        .await;
    assert_eq!(v["targets"], json!([n0, n1]));
}

#[tokio::test]
async fn structural_block_and_override() {
    let api = Api::new();
    lists_project(&api, fixtures::LIST_FAULTY).await;
    let (status, v) = api.call(Method::POST, &format!("{T}/run"), None).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(v["code"], "structuralBlock");
    assert_eq!(v["details"]["violations"][0]["kind"], "lowerBound");
    let run = api.ok(Method::POST, &format!("{T}/run"), Some(json!({"allowStructuralFailure": true}))).await;
    assert_eq!(run["status"], "fail");
}

#[tokio::test]
async fn lts_segments_and_subsets() {
    let api = Api::new();
    api.ok(Method::POST, "/projects", Some(json!({"name": "lts", "modelSource": fixtures::LTS_FAULTY}))).await;
    let t = "/projects/lts/tests/nd";
    api.ok(Method::POST, "/projects/lts/tests", Some(json!({"name": "nd"}))).await;
    let mut ids = Vec::new();
    for sig in ["State", "State", "Event"] {
        let a = api.ok(Method::POST, &format!("{t}/atoms"), Some(json!({"sig": sig}))).await;
        ids.push(a["id"].as_str().unwrap().to_string());
    }
    let (s0, s1, e0) = (&ids[0], &ids[1], &ids[2]);
    for tuple in [[s1, e0, s0], [s1, e0, s1]] {
        api.ok(Method::POST, &format!("{t}/connections"), Some(json!({"relation": "trans", "atomIds": tuple})))
            .await;
    }
    let patched = api
        .ok(Method::PATCH, &format!("{t}/atoms/{s1}"), Some(json!({"subsets": ["Init"], "x": 40.5})))
        .await;
    assert_eq!(patched["subsets"], json!(["Init"]));
    assert_eq!(patched["x"], 40.5);
    let (status, v) = api
        .call(Method::PATCH, &format!("{t}/atoms/{e0}"), Some(json!({"subsets": ["Init"]})))
        .await;
    assert_eq!(status, StatusCode::CONFLICT, "{v}");

    let removed = api.ok(Method::DELETE, &format!("{t}/connections/0?segment=1"), None).await;
    assert_eq!(removed["removed"][0]["atomIds"], json!([s1, e0, s0]));
    let test = api.ok(Method::GET, t, None).await;
    assert_eq!(test["connections"].as_array().unwrap().len(), 1);
    let (status, _) = api.call(Method::DELETE, &format!("{t}/connections/5"), None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);

    let removed = api.ok(Method::DELETE, &format!("{t}/atoms/{s0}"), None).await;
    assert_eq!(removed["connections"].as_array().unwrap().len(), 0);
    let removed = api.ok(Method::DELETE, &format!("{t}/atoms/{e0}"), None).await;
    assert_eq!(removed["connections"].as_array().unwrap().len(), 1);
}

#[tokio::test]
async fn error_codes() {
    let api = Api::new();
    let (status, v) = api
        .call(Method::POST, "/projects", Some(json!({"name": "bad", "modelSource": "sig A extends B {}"})))
        .await;
    assert_eq!((status, v["code"].as_str()), (StatusCode::BAD_REQUEST, Some("modelError")));
    assert_eq!(v["details"]["line"], 1);
    let (status, v) = api.call(Method::POST, "/projects", Some(json!({"name": 3}))).await;
    assert_eq!((status, v["code"].as_str()), (StatusCode::BAD_REQUEST, Some("badRequest")));
    let (status, _) = api.call(Method::GET, "/projects/nope", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);

    api.ok(Method::POST, "/projects", Some(json!({"name": "cv", "modelSource": fixtures::CV_FAULTY}))).await;
    let (status, _) = api.call(Method::POST, "/projects", Some(json!({"name": "cv", "modelSource": ""}))).await;
    assert_eq!(status, StatusCode::CONFLICT);
    api.ok(Method::POST, "/projects/cv/tests", Some(json!({"name": "t"}))).await;
    let (status, _) = api.call(Method::POST, "/projects/cv/tests", Some(json!({"name": "t"}))).await;
    assert_eq!(status, StatusCode::CONFLICT);
    let t = "/projects/cv/tests/t";
    let (status, v) = api.call(Method::POST, &format!("{t}/atoms"), Some(json!({"sig": "Source"}))).await;
    assert_eq!((status, v["code"].as_str()), (StatusCode::CONFLICT, Some("abstractSig")));
    let (status, v) = api.call(Method::POST, &format!("{t}/atoms"), Some(json!({"sig": "Nope"}))).await;
    assert_eq!((status, v["code"].as_str()), (StatusCode::BAD_REQUEST, Some("unknownSig")));
    let (status, v) = api
        .call(Method::PUT, &format!("{t}/predicates/nope"), Some(json!({"state": "valid"})))
        .await;
    assert_eq!((status, v["code"].as_str()), (StatusCode::NOT_FOUND, Some("unknownPred")));
    let (status, _) = api.call(Method::GET, "/projects/cv/tests/missing", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn projects_listing_colors_and_deletion() {
    let api = Api::new();
    lists_project(&api, fixtures::LIST_FAULTY).await;
    let list = api.ok(Method::GET, "/projects", None).await;
    assert_eq!(list, json!([{"id": "lists", "name": "lists", "tests": ["twoNode"]}]));
    let p = api
        .ok(Method::PATCH, "/projects/lists", Some(json!({"colorAssignments": {"Node": "#000000"}})))
        .await;
    assert_eq!(p["colorAssignments"]["Node"], "#000000");
    let p = api.ok(Method::GET, "/projects/lists", None).await;
    assert_eq!(p["colorAssignments"]["Node"], "#000000");
    let (status, _) = api.call(Method::DELETE, T, None).await;
    assert_eq!(status, StatusCode::NO_CONTENT);
    let (status, _) = api.call(Method::DELETE, "/projects/lists", None).await;
    assert_eq!(status, StatusCode::NO_CONTENT);
    assert_eq!(api.ok(Method::GET, "/projects", None).await, json!([]));
}

#[tokio::test]
async fn predicate_state_round_trips() {
    let api = Api::new();
    lists_project(&api, fixtures::LIST_FAULTY).await;
    for state in ["invalid", "valid", "dontTest"] {
        let v = api
            .ok(Method::PUT, &format!("{T}/predicates/acyclic"), Some(json!({"state": state, "args": []})))
            .await;
        assert_eq!(v["state"], state);
        let test = api.ok(Method::GET, T, None).await;
        assert_eq!(test["predicateStates"]["acyclic"]["state"], state);
    }
}

#[tokio::test]
async fn ui_assets_are_served() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("index.html"), "<html>canvas</html>").unwrap();
    let store = tempfile::tempdir().unwrap();
    let app = crucible_server::router(
        Arc::new(ProjectStore::open(store.path()).unwrap()),
        Some(dir.path().to_path_buf()),
    );
    let resp = app
        .oneshot(Request::builder().uri("/ui/index.html").body(Body::empty()).unwrap())
        .await
        .unwrap();
    assert_eq!(resp.status(), StatusCode::OK);
}
