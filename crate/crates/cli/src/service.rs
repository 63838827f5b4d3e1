//! Local HTTP/JSON service.
//!
//! | Method | Path       | Body / query                          | Response             |
//! |--------|------------|---------------------------------------|----------------------|
//! | POST   | `/compute` | compute request (JSON)                | compute document     |
//! | POST   | `/import`  | raw image bytes, `?points=N`          | traced contour shape |
//! | GET    | `/oracle`  | `?shape=disk&radius=..&contrast=..`   | analytic tensor      |
//! | GET    | `/health`  |                                       | `{"status":"ok"}`    |
//!
//! Every response carries `version`. Failures are
//! `{"version", "error": {"code", "message", "cond_estimate"?}}`.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use polarization_core::ingest::{self, ImportResult};
use polarization_core::pipeline::{self, ErrorDocument};
use polarization_core::{compute, ComputeError, ComputeRequest, ShapeSpec, VERSION};
use serde::Serialize;
use tokio::sync::Semaphore;

/// Default contour resolution for `/import`.
pub const DEFAULT_IMPORT_POINTS: usize = 256;

#[derive(Clone)]
pub struct AppState {
    slots: Arc<Semaphore>,
}

impl AppState {
    /// `slots` bounds the number of computations running at once.
    pub fn new(slots: usize) -> Self {
        AppState {
            slots: Arc::new(Semaphore::new(slots.max(1))),
        }
    }
}

impl Default for AppState {
    fn default() -> Self {
        let n = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(2);
        AppState::new(n)
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/compute", post(compute_handler))
        .route("/import", post(import_handler))
        .route("/oracle", get(oracle_handler))
        .with_state(state)
}

pub async fn serve(addr: SocketAddr, state: AppState) -> anyhow::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(state)).await?;
    Ok(())
}

pub struct ApiError {
    status: StatusCode,
    body: ErrorDocument,
}

impl ApiError {
    fn bad_request(code: &str, message: String) -> Self {
        ApiError {
            status: StatusCode::BAD_REQUEST,
            body: ErrorDocument::new(code, message, None),
        }
    }
}

impl From<ComputeError> for ApiError {
    fn from(e: ComputeError) -> Self {
        let status = match e {
            ComputeError::InvalidRequest(_) | ComputeError::Shape(_) | ComputeError::Gpt(_) => StatusCode::BAD_REQUEST,
            _ => StatusCode::UNPROCESSABLE_ENTITY,
        };
        ApiError {
            status,
            body: ErrorDocument::from(&e),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

async fn run_blocking<T, F>(state: &AppState, f: F) -> Result<T, ApiError>
where
    F: FnOnce() -> Result<T, ComputeError> + Send + 'static,
    T: Send + 'static,
{
    let _permit = state.slots.acquire().await.map_err(|_| ApiError {
        status: StatusCode::SERVICE_UNAVAILABLE,
        body: ErrorDocument::new("unavailable", "service is shutting down".into(), None),
    })?;
    match tokio::task::spawn_blocking(f).await {
        Ok(r) => r.map_err(ApiError::from),
        Err(e) => Err(ApiError {
            status: StatusCode::INTERNAL_SERVER_ERROR,
            body: ErrorDocument::new("internal", e.to_string(), None),
        }),
    }
}

#[derive(Serialize)]
struct Health {
    status: &'static str,
    version: &'static str,
}

async fn health() -> Json<Health> {
    Json(Health {
        status: "ok",
        version: VERSION,
    })
}

async fn compute_handler(State(state): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let req: ComputeRequest = serde_json::from_slice(&body)
        .map_err(|e| ApiError::bad_request("malformed_request", e.to_string()))?;
    let doc = run_blocking(&state, move || compute(&req).map(|o| o.document())).await?;
    Ok(Json(doc).into_response())
}

#[derive(Serialize)]
struct ImportDocument {
    version: &'static str,
    #[serde(flatten)]
    result: ImportResult,
}

async fn import_handler(
    State(state): State<AppState>,
    Query(params): Query<HashMap<String, String>>,
    body: Bytes,
) -> Result<Response, ApiError> {
    let points = match params.get("points") {
        Some(p) => p
            .parse::<usize>()
            .map_err(|e| ApiError::bad_request("malformed_request", format!("points: {e}")))?,
        None => DEFAULT_IMPORT_POINTS,
    };
    if body.is_empty() {
        return Err(ApiError::bad_request("malformed_request", "empty request body".into()));
    }
    let result = run_blocking(&state, move || {
        ingest::import_image(&body, points).map_err(ComputeError::from)
    })
    .await?;
    Ok(Json(ImportDocument {
        version: VERSION,
        result,
    })
    .into_response())
}

#[derive(Serialize)]
struct OracleDocument {
    version: &'static str,
    shape: ShapeSpec,
    order: usize,
    contrast: f64,
    labels: Vec<String>,
    entries: Vec<Vec<f64>>,
}

fn param(params: &HashMap<String, String>, key: &str, default: Option<f64>) -> Result<f64, ApiError> {
    match params.get(key) {
        Some(v) => v
            .parse::<f64>()
            .map_err(|e| ApiError::bad_request("malformed_request", format!("{key}: {e}"))),
        None => default.ok_or_else(|| ApiError::bad_request("malformed_request", format!("missing parameter `{key}`"))),
    }
}

async fn oracle_handler(Query(params): Query<HashMap<String, String>>) -> Result<Response, ApiError> {
    let contrast = param(&params, "contrast", None)?;
    let order = param(&params, "order", Some(4.0))?;
    if !(order >= 1.0 && order.fract() == 0.0) {
        return Err(ApiError::bad_request("malformed_request", "order must be a positive integer".into()));
    }
    let order = order as usize;
    let center = [param(&params, "cx", Some(0.0))?, param(&params, "cy", Some(0.0))?];
    let shape = match params.get("shape").map(String::as_str) {
        Some("disk") => ShapeSpec::disk(center, param(&params, "radius", None)?),
        Some("ellipse") => ShapeSpec::ellipse(
            center,
            param(&params, "a", None)?,
            param(&params, "b", None)?,
            param(&params, "tilt", Some(0.0))?,
        ),
        other => {
            return Err(ApiError::bad_request(
                "invalid_request",
                format!("no analytic tensor for shape {other:?}; expected disk or ellipse"),
            ))
        }
    };
    let g = match pipeline::exact_tensor(&shape, contrast, order) {
        Some(Ok(g)) => g,
        Some(Err(e)) => return Err(ComputeError::from(e).into()),
        None => unreachable!("disk and ellipse always have an oracle"),
    };
    Ok(Json(OracleDocument {
        version: VERSION,
        shape,
        order,
        contrast,
        labels: g.labels(),
        entries: g.rows(),
    })
    .into_response())
}
