//! JSON HTTP API over [`App`].
//!
//! Backend calls block, so every handler that may reach a backend runs on
//! the blocking pool.

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::{Path as UrlPath, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;
use tidss_core::incident::IncidentRecord;
use tidss_core::synthesis::SynthesisError;
use tidss_core::topsis::TopsisResult;

use crate::app::{App, Comparison, FusedPlan, WeightedAction};
use crate::config::WeightSource;
use crate::error::Error;
use crate::formats::{read_text, save_guidelines, DecisionMatrixFile, GuidelineDocument, PlanFile};
use crate::jobs::{JobStatus, PlanJob};

pub struct ApiError(Error);

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        ApiError(e)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = match &self.0 {
            Error::NotFound(_) => StatusCode::NOT_FOUND,
            Error::Synthesis(SynthesisError::BackendFailure(_)) => StatusCode::BAD_GATEWAY,
            Error::Io { .. } | Error::FixtureMissing(_) | Error::Config(_) => {
                StatusCode::INTERNAL_SERVER_ERROR
            }
            _ => StatusCode::UNPROCESSABLE_ENTITY,
        };
        (status, Json(json!({ "error": self.0.to_string() }))).into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

async fn blocking<T, F>(f: F) -> Result<T, ApiError>
where
    F: FnOnce() -> Result<T, Error> + Send + 'static,
    T: Send + 'static,
{
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError(Error::Config(format!("worker failed: {e}"))))?
        .map_err(ApiError)
}

#[derive(Serialize)]
pub struct ActionsResponse {
    pub weight_source: WeightSource,
    pub actions: Vec<WeightedAction>,
}

async fn actions(State(app): State<Arc<App>>) -> Json<ActionsResponse> {
    Json(ActionsResponse {
        weight_source: app.config.weights.clone(),
        actions: app.actions(),
    })
}

#[derive(Serialize)]
pub struct WeightsResponse {
    /// Label to weight, in matrix order.
    pub weights: serde_json::Map<String, serde_json::Value>,
    pub topsis: TopsisResult,
}

async fn topsis_weights(
    State(app): State<Arc<App>>,
    Json(body): Json<DecisionMatrixFile>,
) -> ApiResult<WeightsResponse> {
    let (topsis, table) = app.topsis(&body.into())?;
    let weights = table
        .entries()
        .iter()
        .map(|(label, w)| (label.clone(), json!(w)))
        .collect();
    Ok(Json(WeightsResponse { weights, topsis }))
}

#[derive(Deserialize)]
pub struct SynthesizeRequest {
    /// Guideline text; alternatively a server-side path.
    #[serde(default)]
    pub document: Option<String>,
    #[serde(default)]
    pub document_path: Option<PathBuf>,
    #[serde(default)]
    pub backend: Option<String>,
    /// Store the table as the configured guideline file.
    #[serde(default)]
    pub save: bool,
}

#[derive(Serialize)]
pub struct SynthesizeResponse {
    pub document: GuidelineDocument,
    pub saved: bool,
}

async fn synthesize(
    State(app): State<Arc<App>>,
    Json(body): Json<SynthesizeRequest>,
) -> ApiResult<SynthesizeResponse> {
    let response = blocking(move || {
        let text = match (body.document, body.document_path) {
            (Some(text), _) => text,
            (None, Some(path)) => read_text(&path)?,
            (None, None) => {
                return Err(Error::Config(
                    "request needs document or document_path".into(),
                ))
            }
        };
        let backend_id = app.backend_config(body.backend.as_deref())?.id.clone();
        let result = app.synthesize(&text, body.backend.as_deref())?;
        if body.save {
            let document = save_guidelines(&app.guidelines_path(None)?, result.table, &backend_id)?;
            return Ok(SynthesizeResponse {
                document,
                saved: true,
            });
        }
        Ok(SynthesizeResponse {
            document: GuidelineDocument {
                format_version: crate::formats::GUIDELINE_FORMAT_VERSION,
                revision: 0,
                backend: backend_id,
                table: result.table,
            },
            saved: false,
        })
    })
    .await?;
    Ok(Json(response))
}

#[derive(Deserialize)]
pub struct GenerateRequest {
    #[serde(default)]
    pub incident_id: Option<String>,
    #[serde(default)]
    pub incident: Option<IncidentRecord>,
    #[serde(default)]
    pub m: Option<usize>,
    #[serde(default)]
    pub backend: Option<String>,
    #[serde(default)]
    pub reprompts: Option<u32>,
}

async fn generate(
    State(app): State<Arc<App>>,
    Json(body): Json<GenerateRequest>,
) -> Result<Response, ApiError> {
    let job = blocking(move || {
        let incident = match (body.incident, body.incident_id) {
            (Some(record), _) => record,
            (None, Some(id)) => app.incident(&id, None)?,
            (None, None) => {
                return Err(Error::Config(
                    "request needs incident_id or incident".into(),
                ))
            }
        };
        let path = app.guidelines_path(None)?;
        let guidelines = app.guidelines(Some(&path))?;
        app.generate(
            &incident,
            &guidelines,
            &path.display().to_string(),
            body.backend.as_deref(),
            body.m,
            body.reprompts,
        )
    })
    .await?;
    let status = if job.status == JobStatus::Done {
        StatusCode::OK
    } else {
        StatusCode::BAD_GATEWAY
    };
    Ok((status, Json(job)).into_response())
}

#[derive(Deserialize)]
pub struct ScoreRequest {
    pub bits: Vec<u8>,
}

async fn score(
    State(app): State<Arc<App>>,
    Json(body): Json<ScoreRequest>,
) -> ApiResult<tidss_core::plan::ScoreBreakdown> {
    Ok(Json(app.score(body.bits)?))
}

#[derive(Deserialize)]
pub struct FuseRequest {
    pub plans: Vec<Vec<u8>>,
}

async fn fuse(State(app): State<Arc<App>>, Json(body): Json<FuseRequest>) -> ApiResult<FusedPlan> {
    Ok(Json(app.fuse(body.plans)?))
}

#[derive(Deserialize)]
pub struct CompareRequest {
    pub plans: Vec<PlanFile>,
    #[serde(default)]
    pub manual_label: Option<String>,
}

async fn compare(
    State(app): State<Arc<App>>,
    Json(body): Json<CompareRequest>,
) -> ApiResult<Comparison> {
    Ok(Json(
        app.compare(&body.plans, body.manual_label.as_deref())?,
    ))
}

async fn job(State(app): State<Arc<App>>, UrlPath(id): UrlPath<String>) -> ApiResult<PlanJob> {
    Ok(Json(blocking(move || app.jobs().load(&id)).await?))
}

pub fn router(app: Arc<App>) -> Router {
    Router::new()
        .route("/actions", get(actions))
        .route("/topsis/weights", post(topsis_weights))
        .route("/guidelines/synthesize", post(synthesize))
        .route("/plans/generate", post(generate))
        .route("/plans/score", post(score))
        .route("/plans/fuse", post(fuse))
        .route("/plans/compare", post(compare))
        .route("/jobs/:id", get(job))
        .with_state(app)
}

pub async fn serve(app: App, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(Arc::new(app))).await
}
