//! HTTP JSON service.
//!
//! Datasets live in memory keyed by content hash. Each (dataset, DMU) pair owns
//! one procedure session behind its own lock; a write that finds the lock
//! taken is refused with 409 rather than queued.

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use serde::Deserialize;
use serde_json::json;
use std::collections::{BTreeMap, HashMap};
use std::path::PathBuf;
use std::sync::{Arc, Mutex, RwLock};
use vga_core::dataset::{self, DecisionMatrix};
use vga_core::procedure;

use crate::error::CliError;
use crate::output;
use crate::session::{self, ApiSession, Step};

type Slot = Arc<tokio::sync::Mutex<Option<ApiSession>>>;

pub struct AppState {
    datasets: RwLock<HashMap<String, Arc<DecisionMatrix>>>,
    default_hash: RwLock<Option<String>>,
    sessions: Mutex<HashMap<(String, String), Slot>>,
    session_dir: Option<PathBuf>,
}

impl AppState {
    /// `default` answers requests that carry no dataset hash.
    pub fn new(default: Option<DecisionMatrix>, session_dir: Option<PathBuf>) -> Arc<Self> {
        let state = AppState {
            datasets: RwLock::new(HashMap::new()),
            default_hash: RwLock::new(None),
            sessions: Mutex::new(HashMap::new()),
            session_dir,
        };
        if let Some(m) = default {
            let h = state.insert(m);
            *state.default_hash.write().unwrap() = Some(h);
        }
        Arc::new(state)
    }

    fn insert(&self, m: DecisionMatrix) -> String {
        let h = m.hash();
        self.datasets.write().unwrap().entry(h.clone()).or_insert_with(|| Arc::new(m));
        h
    }

    fn dataset(&self, hash: Option<&str>) -> Result<Arc<DecisionMatrix>, CliError> {
        let h = match hash {
            Some(h) => h.to_string(),
            None => self
                .default_hash
                .read()
                .unwrap()
                .clone()
                .ok_or_else(|| CliError::Validation("no dataset hash given and no default dataset".into()))?,
        };
        self.datasets
            .read()
            .unwrap()
            .get(&h)
            .cloned()
            .ok_or_else(|| CliError::NotFound(format!("unknown dataset {h}")))
    }

    fn slot(&self, hash: &str, dmu: &str) -> Slot {
        let mut map = self.sessions.lock().unwrap();
        map.entry((hash.to_string(), dmu.to_string())).or_default().clone()
    }

    /// Fills an empty slot from the session directory.
    fn restore(&self, slot: &mut Option<ApiSession>, hash: &str, dmu: &str) -> Result<(), CliError> {
        if slot.is_none() {
            if let Some(dir) = &self.session_dir {
                *slot = session::load(dir, hash, dmu)?;
            }
        }
        Ok(())
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/health", get(health))
        .route("/api/dataset", post(post_dataset))
        .route("/api/dataset/:hash", get(get_dataset))
        .route("/api/evaluate", post(evaluate))
        .route("/api/procedure/:dmu", get(get_procedure))
        .route("/api/procedure/:dmu/:action", post(procedure_step))
        .route("/api/plot/:dmu", get(plot))
        .route("/api/rank", get(rank))
        .with_state(state)
}

pub async fn serve(port: u16, state: Arc<AppState>) -> Result<(), CliError> {
    let listener = tokio::net::TcpListener::bind(("0.0.0.0", port))
        .await
        .map_err(|e| CliError::Io(format!("cannot bind port {port}: {e}")))?;
    eprintln!("listening on {}", listener.local_addr().map(|a| a.to_string()).unwrap_or_default());
    axum::serve(listener, router(state)).await.map_err(|e| CliError::Io(e.to_string()))
}

impl IntoResponse for CliError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.status()).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        (status, json_body(output::to_json(&json!({ "error": self.to_string() })))).into_response()
    }
}

fn json_body(text: String) -> impl IntoResponse {
    ([(header::CONTENT_TYPE, "application/json")], text)
}

fn parse<T: serde::de::DeserializeOwned>(body: &Bytes) -> Result<T, CliError> {
    let body: &[u8] = if body.iter().all(u8::is_ascii_whitespace) { b"{}" } else { body };
    serde_json::from_slice(body).map_err(|e| CliError::Validation(format!("malformed request: {e}")))
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> Result<T, CliError> + Send + 'static) -> Result<T, CliError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| CliError::Solver(format!("worker failed: {e}")))?
}

async fn health() -> impl IntoResponse {
    json_body(output::to_json(&json!({ "status": "ok", "version": env!("CARGO_PKG_VERSION") })))
}

async fn post_dataset(State(app): State<Arc<AppState>>, body: Bytes) -> Result<impl IntoResponse, CliError> {
    let text = std::str::from_utf8(&body).map_err(|e| CliError::Validation(e.to_string()))?;
    let m = DecisionMatrix::from_json_str(text)?;
    let report = dataset::validate(&m);
    let hash = app.insert(m);
    Ok((
        StatusCode::CREATED,
        json_body(output::to_json(&json!({ "hash": hash, "validation": report }))),
    ))
}

async fn get_dataset(State(app): State<Arc<AppState>>, Path(hash): Path<String>) -> Result<impl IntoResponse, CliError> {
    let m = app.dataset(Some(&hash))?;
    Ok(json_body(output::to_json(&output::dataset_summary(&m))))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BoundsBody {
    #[serde(default)]
    q_max: Vec<f64>,
    #[serde(default)]
    p_max: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EvaluateBody {
    hash: Option<String>,
    model: String,
    dmu: String,
    kappa: Option<f64>,
    bounds: Option<BoundsBody>,
}

async fn evaluate(State(app): State<Arc<AppState>>, body: Bytes) -> Result<impl IntoResponse, CliError> {
    let req: EvaluateBody = parse(&body)?;
    let m = app.dataset(req.hash.as_deref())?;
    let doc = blocking(move || {
        let (q, p) = req.bounds.map(|b| (b.q_max, b.p_max)).unwrap_or_default();
        output::evaluate(&m, &req.model, &req.dmu, req.kappa, &q, &p)
    })
    .await?;
    Ok(json_body(output::to_json(&doc)))
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct StepBody {
    hash: Option<String>,
    scenario: Option<String>,
    kappa: Option<f64>,
    #[serde(default)]
    allow_outside: bool,
}

async fn procedure_step(
    State(app): State<Arc<AppState>>,
    Path((dmu, action)): Path<(String, String)>,
    body: Bytes,
) -> Result<impl IntoResponse, CliError> {
    let req: StepBody = parse(&body)?;
    let need_kappa = || req.kappa.ok_or_else(|| CliError::Validation(format!("{action} needs a kappa")));
    let step = match action.as_str() {
        "phase1" => Step::Phase(1),
        "phase2" => Step::Phase(2),
        "phase3" => Step::Phase(3),
        "try" => Step::Try {
            kappa: need_kappa()?,
            allow_outside: req.allow_outside,
        },
        "commit" => Step::Commit(need_kappa()?),
        other => return Err(CliError::NotFound(format!("unknown procedure action {other:?}"))),
    };
    let m = app.dataset(req.hash.as_deref())?;
    m.dmu_index(&dmu)?;
    let hash = m.hash();
    let slot = app.slot(&hash, &dmu);
    let mut guard = slot
        .try_lock_owned()
        .map_err(|_| CliError::Conflict(format!("procedure for {dmu} is being updated")))?;
    app.restore(&mut guard, &hash, &dmu)?;
    let dir = app.session_dir.clone();
    let value = blocking(move || {
        let current = guard.as_ref().map(|s| s.state.clone());
        let (state, value) = session::apply(current, &m, &dmu, req.scenario.as_deref(), step)?;
        match guard.as_mut() {
            Some(s) if step != Step::Phase(1) => s.update(state)?,
            _ => *guard = Some(ApiSession::new(state)),
        }
        if let Some(dir) = dir {
            session::store(&dir, guard.as_ref().unwrap())?;
        }
        Ok(value)
    })
    .await?;
    Ok(json_body(output::to_json(&value)))
}

#[derive(Debug, Deserialize)]
struct HashQuery {
    hash: Option<String>,
}

async fn get_procedure(
    State(app): State<Arc<AppState>>,
    Path(dmu): Path<String>,
    Query(q): Query<HashQuery>,
) -> Result<impl IntoResponse, CliError> {
    let m = app.dataset(q.hash.as_deref())?;
    m.dmu_index(&dmu)?;
    let hash = m.hash();
    let slot = app.slot(&hash, &dmu);
    let mut guard = slot.lock().await;
    app.restore(&mut guard, &hash, &dmu)?;
    match guard.as_ref() {
        Some(s) => Ok(json_body(output::to_json(s))),
        None => Err(CliError::NotFound(format!("no procedure for DMU {dmu}"))),
    }
}

#[derive(Debug, Deserialize)]
struct PlotQuery {
    hash: Option<String>,
    model: String,
    kappa: Option<f64>,
}

async fn plot(
    State(app): State<Arc<AppState>>,
    Path(dmu): Path<String>,
    Query(q): Query<PlotQuery>,
) -> Result<impl IntoResponse, CliError> {
    let m = app.dataset(q.hash.as_deref())?;
    let g = blocking(move || output::plot(&m, &q.model, &dmu, q.kappa)).await?;
    Ok(json_body(output::to_json(&g)))
}

/// Ranks with the scalars committed in this dataset's sessions.
async fn rank(State(app): State<Arc<AppState>>, Query(q): Query<HashQuery>) -> Result<impl IntoResponse, CliError> {
    let m = app.dataset(q.hash.as_deref())?;
    let hash = m.hash();
    let slots: Vec<Slot> = {
        let map = app.sessions.lock().unwrap();
        map.iter().filter(|((h, _), _)| *h == hash).map(|(_, s)| s.clone()).collect()
    };
    let mut scalars = BTreeMap::new();
    for slot in slots {
        if let Some(s) = slot.lock().await.as_ref() {
            if let Some(c) = &s.state.committed {
                scalars.insert(s.dmu.clone(), c.kappa);
            }
        }
    }
    let table = blocking(move || procedure::rank(&m, &scalars).map_err(CliError::from)).await?;
    Ok(json_body(output::to_json(&table)))
}
