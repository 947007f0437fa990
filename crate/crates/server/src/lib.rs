//! HTTP/JSON service over a project store.
//!
//! Every handler reads the project from disk and every mutation goes
//! through [`ProjectStore::edit_test`] or another store call, so the
//! responses depend only on the store contents and the request.

mod error;

use std::collections::{BTreeMap, BTreeSet};
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::IntoResponse;
use axum::routing::{delete, get, post, put};
use axum::{Json, Router};
use crucible_core::guidance::valid_connection_targets;
use crucible_core::{
    generate_command_string, run_test, ConnectionRef, PredState, Project, ProjectStore, RunOptions, StoreError,
};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tower_http::services::ServeDir;

pub use error::ApiError;

type ApiResult<T> = Result<T, ApiError>;
type Store = Arc<ProjectStore>;

#[derive(Debug, Clone)]
pub struct Config {
    pub bind: SocketAddr,
    pub store_dir: PathBuf,
    /// Static assets served under `/ui/`, if present.
    pub ui_dir: Option<PathBuf>,
}

impl Config {
    /// Defaults overridden by `CRUCIBLE_STORE_DIR`, `CRUCIBLE_PORT` and
    /// `CRUCIBLE_UI_DIR`.
    pub fn from_env() -> Result<Self, String> {
        let port = match std::env::var("CRUCIBLE_PORT") {
            Ok(p) => p.parse::<u16>().map_err(|_| format!("CRUCIBLE_PORT: `{p}` is not a port number"))?,
            Err(_) => 8080,
        };
        Ok(Config {
            bind: SocketAddr::from(([127, 0, 0, 1], port)),
            store_dir: std::env::var_os("CRUCIBLE_STORE_DIR")
                .map(PathBuf::from)
                .unwrap_or_else(|| PathBuf::from("crucible-store")),
            ui_dir: std::env::var_os("CRUCIBLE_UI_DIR").map(PathBuf::from),
        })
    }
}

pub fn router(store: Arc<ProjectStore>, ui_dir: Option<PathBuf>) -> Router {
    let test = "/projects/{id}/tests/{name}";
    let mut app = Router::new()
        .route("/projects", post(create_project).get(list_projects))
        .route("/projects/{id}", get(get_project).delete(delete_project).patch(patch_project))
        .route("/projects/{id}/tests", post(create_test))
        .route(test, get(get_test).delete(delete_test))
        .route(&format!("{test}/atoms"), post(add_atom))
        .route(&format!("{test}/atoms/{{atom}}"), delete(remove_atom).patch(patch_atom))
        .route(&format!("{test}/connections"), post(add_connection))
        .route(&format!("{test}/connections/{{index}}"), delete(remove_connection))
        .route(&format!("{test}/valid-targets"), post(valid_targets))
        .route(&format!("{test}/predicates/{{pred}}"), put(set_predicate))
        .route(&format!("{test}/run"), post(run))
        .route(&format!("{test}/translate"), post(translate))
        .with_state(store);
    if let Some(dir) = ui_dir {
        app = app.nest_service("/ui", ServeDir::new(dir));
    }
    app
}

pub async fn serve(config: Config) -> Result<(), String> {
    let store = ProjectStore::open(&config.store_dir)
        .map_err(|e| format!("store {}: {e}", config.store_dir.display()))?;
    let app = router(Arc::new(store), config.ui_dir);
    let listener = tokio::net::TcpListener::bind(config.bind)
        .await
        .map_err(|e| format!("bind {}: {e}", config.bind))?;
    tracing::info!("listening on {}", config.bind);
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .map_err(|e| e.to_string())
}

fn body<T>(payload: Result<Json<T>, JsonRejection>) -> ApiResult<T> {
    Ok(payload?.0)
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct NewProject {
    name: String,
    model_source: String,
}

async fn create_project(
    State(store): State<Store>,
    payload: Result<Json<NewProject>, JsonRejection>,
) -> ApiResult<impl IntoResponse> {
    let req = body(payload)?;
    let project = store.create_project(&req.name, &req.model_source)?;
    Ok((StatusCode::CREATED, Json(project)))
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ProjectSummary {
    id: String,
    name: String,
    tests: Vec<String>,
}

async fn list_projects(State(store): State<Store>) -> ApiResult<Json<Vec<ProjectSummary>>> {
    let projects = store.list_projects()?;
    Ok(Json(
        projects
            .into_iter()
            .map(|p| ProjectSummary {
                id: p.id,
                name: p.name,
                tests: p.tests.into_keys().collect(),
            })
            .collect(),
    ))
}

async fn get_project(State(store): State<Store>, Path(id): Path<String>) -> ApiResult<Json<Project>> {
    Ok(Json(store.load_project(&id)?))
}

async fn delete_project(State(store): State<Store>, Path(id): Path<String>) -> ApiResult<StatusCode> {
    store.delete_project(&id)?;
    Ok(StatusCode::NO_CONTENT)
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct ProjectPatch {
    color_assignments: BTreeMap<String, String>,
}

async fn patch_project(
    State(store): State<Store>,
    Path(id): Path<String>,
    payload: Result<Json<ProjectPatch>, JsonRejection>,
) -> ApiResult<Json<Project>> {
    let req = body(payload)?;
    Ok(Json(store.set_colors(&id, req.color_assignments)?))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NewTest {
    name: String,
}

async fn create_test(
    State(store): State<Store>,
    Path(id): Path<String>,
    payload: Result<Json<NewTest>, JsonRejection>,
) -> ApiResult<impl IntoResponse> {
    let req = body(payload)?;
    if req.name.trim().is_empty() {
        return Err(ApiError::new(StatusCode::BAD_REQUEST, "badRequest", "test name is empty"));
    }
    let test = store.create_test(&id, &req.name)?;
    Ok((StatusCode::CREATED, Json(test)))
}

async fn get_test(State(store): State<Store>, Path((id, name)): Path<(String, String)>) -> ApiResult<Json<Value>> {
    let project = store.load_project(&id)?;
    Ok(Json(json!(project.test(&name)?)))
}

async fn delete_test(State(store): State<Store>, Path((id, name)): Path<(String, String)>) -> ApiResult<StatusCode> {
    store.delete_test(&id, &name)?;
    Ok(StatusCode::NO_CONTENT)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NewAtom {
    sig: String,
    #[serde(default)]
    x: f64,
    #[serde(default)]
    y: f64,
}

async fn add_atom(
    State(store): State<Store>,
    Path((id, name)): Path<(String, String)>,
    payload: Result<Json<NewAtom>, JsonRejection>,
) -> ApiResult<impl IntoResponse> {
    let req = body(payload)?;
    let (atom, _) = store.edit_test(&id, &name, |s, t| t.add_atom(s, &req.sig, req.x, req.y))?;
    Ok((StatusCode::CREATED, Json(atom)))
}

async fn remove_atom(
    State(store): State<Store>,
    Path((id, name, atom)): Path<(String, String, String)>,
) -> ApiResult<Json<Value>> {
    let (removed, _) = store.edit_test(&id, &name, |_, t| t.remove_atom(&atom))?;
    Ok(Json(json!(removed)))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AtomPatch {
    x: Option<f64>,
    y: Option<f64>,
    subsets: Option<BTreeSet<String>>,
}

async fn patch_atom(
    State(store): State<Store>,
    Path((id, name, atom)): Path<(String, String, String)>,
    payload: Result<Json<AtomPatch>, JsonRejection>,
) -> ApiResult<Json<Value>> {
    let req = body(payload)?;
    let (_, test) = store.edit_test(&id, &name, |s, t| {
        let current = t
            .atom(&atom)
            .ok_or_else(|| crucible_core::CanvasError::UnknownAtom(atom.clone()))?;
        let (x, y) = (req.x.unwrap_or(current.x), req.y.unwrap_or(current.y));
        if let Some(subsets) = req.subsets {
            t.set_subsets(s, &atom, subsets)?;
        }
        t.move_atom(&atom, x, y)
    })?;
    Ok(Json(json!(test.atom(&atom))))
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct NewConnection {
    relation: String,
    atom_ids: Vec<String>,
}

async fn add_connection(
    State(store): State<Store>,
    Path((id, name)): Path<(String, String)>,
    payload: Result<Json<NewConnection>, JsonRejection>,
) -> ApiResult<impl IntoResponse> {
    let req = body(payload)?;
    let (conn, _) = store.edit_test(&id, &name, |s, t| t.add_connection(s, &req.relation, &req.atom_ids))?;
    Ok((StatusCode::CREATED, Json(conn)))
}

#[derive(Deserialize)]
struct SegmentQuery {
    segment: Option<usize>,
}

async fn remove_connection(
    State(store): State<Store>,
    Path((id, name, index)): Path<(String, String, usize)>,
    Query(q): Query<SegmentQuery>,
) -> ApiResult<Json<Value>> {
    let target = match q.segment {
        Some(segment) => ConnectionRef::Segment { index, segment },
        None => ConnectionRef::Index(index),
    };
    let (removed, _) = store.edit_test(&id, &name, |_, t| t.remove_connection(&target))?;
    Ok(Json(json!({ "removed": removed })))
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct TargetsQuery {
    relation: String,
    #[serde(default)]
    prefix_atom_ids: Vec<String>,
}

async fn valid_targets(
    State(store): State<Store>,
    Path((id, name)): Path<(String, String)>,
    payload: Result<Json<TargetsQuery>, JsonRejection>,
) -> ApiResult<Json<Value>> {
    let req = body(payload)?;
    let project = store.load_project(&id)?;
    let test = project.test(&name)?;
    let targets = valid_connection_targets(test, &project.schema, &req.relation, &req.prefix_atom_ids)
        .map_err(StoreError::from)?;
    Ok(Json(json!({ "targets": targets })))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PredicateUpdate {
    state: PredState,
    #[serde(default)]
    args: Vec<String>,
}

async fn set_predicate(
    State(store): State<Store>,
    Path((id, name, pred)): Path<(String, String, String)>,
    payload: Result<Json<PredicateUpdate>, JsonRejection>,
) -> ApiResult<Json<Value>> {
    let req = body(payload)?;
    let (_, test) = store.edit_test(&id, &name, |s, t| t.set_predicate_state(s, &pred, req.state, req.args))?;
    Ok(Json(json!(test.expectation(&pred))))
}

#[derive(Deserialize, Default)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct RunRequest {
    #[serde(default)]
    allow_structural_failure: bool,
}

async fn run(
    State(store): State<Store>,
    Path((id, name)): Path<(String, String)>,
    payload: Option<Json<RunRequest>>,
) -> ApiResult<Json<Value>> {
    let req = payload.map(|p| p.0).unwrap_or_default();
    let project = store.load_project(&id)?;
    let test = project.test(&name)?;
    let options = RunOptions {
        allow_structural_failure: req.allow_structural_failure,
    };
    let result = run_test(&project.schema, test, options)?;
    Ok(Json(json!(result)))
}

async fn translate(State(store): State<Store>, Path((id, name)): Path<(String, String)>) -> ApiResult<Json<Value>> {
    let project = store.load_project(&id)?;
    let cmd = generate_command_string(project.test(&name)?, &project.schema);
    Ok(Json(json!({ "commandString": cmd.text, "predicateSuffixes": cmd.predicate_suffixes })))
}
