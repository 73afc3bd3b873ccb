//! HTTP interface over a shared [`StudyStore`].

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, RwLock};

use axum::body::Body;
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use tower_http::services::ServeDir;

use crate::error::StudyError;
use crate::model::StudyDefinition;
use crate::store::{is_contained_path, StudyStore};

pub const ADMIN_TOKEN_HEADER: &str = "x-admin-token";

#[derive(Debug, Clone, Default)]
pub struct ServiceConfig {
    /// Directory that roster `image_path`s are resolved against.
    pub image_root: Option<PathBuf>,
    /// Static annotation UI, served under `/ui`.
    pub ui_dir: Option<PathBuf>,
    /// Export requires this value in the `x-admin-token` header and is
    /// refused outright when unset.
    pub admin_token: Option<String>,
}

#[derive(Clone)]
struct AppState {
    store: Arc<RwLock<StudyStore>>,
    config: Arc<ServiceConfig>,
}

impl IntoResponse for StudyError {
    fn into_response(self) -> Response {
        let status = match &self {
            StudyError::UnknownStudy(_)
            | StudyError::UnknownUser(_)
            | StudyError::UnknownImage(_) => StatusCode::NOT_FOUND,
            StudyError::DuplicateStudy(_)
            | StudyError::AlreadyLabeled { .. }
            | StudyError::LeaseConflict { .. } => StatusCode::CONFLICT,
            StudyError::InvalidDefinition(_) | StudyError::InvalidLabel(_) => {
                StatusCode::UNPROCESSABLE_ENTITY
            }
            StudyError::Forbidden => StatusCode::FORBIDDEN,
            StudyError::CorruptLog { .. } | StudyError::Io(_) => StatusCode::INTERNAL_SERVER_ERROR,
        };
        let body = serde_json::json!({ "error": self.to_string(), "code": self.code() });
        (status, Json(body)).into_response()
    }
}

type ApiResult<T> = Result<T, StudyError>;

pub fn router(store: Arc<RwLock<StudyStore>>, config: ServiceConfig) -> Router {
    let ui = config.ui_dir.clone();
    let state = AppState {
        store,
        config: Arc::new(config),
    };
    let app = Router::new()
        .route("/studies", post(create_study))
        .route("/studies/{study_id}/next", get(next_task))
        .route("/studies/{study_id}/annotations", post(submit))
        .route("/studies/{study_id}/results", get(results))
        .route("/studies/{study_id}/export", get(export))
        .route("/studies/{study_id}/images/{image_id}", get(image))
        .with_state(state);
    match ui {
        Some(dir) => app.nest_service("/ui", ServeDir::new(dir)),
        None => app,
    }
}

/// Binds `addr` and serves until the process is stopped.
pub async fn serve(
    addr: SocketAddr,
    store: StudyStore,
    config: ServiceConfig,
) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    let app = router(Arc::new(RwLock::new(store)), config);
    axum::serve(listener, app).await
}

fn write(state: &AppState) -> std::sync::RwLockWriteGuard<'_, StudyStore> {
    state.store.write().unwrap_or_else(|e| e.into_inner())
}

fn read(state: &AppState) -> std::sync::RwLockReadGuard<'_, StudyStore> {
    state.store.read().unwrap_or_else(|e| e.into_inner())
}

async fn create_study(
    State(state): State<AppState>,
    Json(def): Json<StudyDefinition>,
) -> ApiResult<impl IntoResponse> {
    let id = def.study_id.clone();
    let total = def.roster.len();
    write(&state).create_study(def)?;
    Ok((
        StatusCode::CREATED,
        Json(serde_json::json!({ "study_id": id, "images": total })),
    ))
}

#[derive(Deserialize)]
struct NextQuery {
    user: String,
}

async fn next_task(
    State(state): State<AppState>,
    Path(study_id): Path<String>,
    Query(q): Query<NextQuery>,
) -> ApiResult<impl IntoResponse> {
    let task = write(&state).next_task(&study_id, &q.user)?;
    Ok(Json(task))
}

#[derive(Deserialize)]
struct Submission {
    image_id: String,
    user_id: String,
    label: String,
}

async fn submit(
    State(state): State<AppState>,
    Path(study_id): Path<String>,
    Json(s): Json<Submission>,
) -> ApiResult<impl IntoResponse> {
    let ack = write(&state).submit(&study_id, &s.image_id, &s.user_id, &s.label)?;
    let status = if ack.duplicate {
        StatusCode::OK
    } else {
        StatusCode::CREATED
    };
    Ok((status, Json(ack)))
}

async fn results(
    State(state): State<AppState>,
    Path(study_id): Path<String>,
) -> ApiResult<impl IntoResponse> {
    Ok(Json(read(&state).results(&study_id)?))
}

async fn export(
    State(state): State<AppState>,
    Path(study_id): Path<String>,
    headers: HeaderMap,
) -> ApiResult<impl IntoResponse> {
    let given = headers.get(ADMIN_TOKEN_HEADER).and_then(|v| v.to_str().ok());
    match (&state.config.admin_token, given) {
        (Some(token), Some(given)) if token == given => {}
        _ => return Err(StudyError::Forbidden),
    }
    let body = read(&state).export(&study_id)?;
    Ok(([(header::CONTENT_TYPE, "application/x-ndjson")], body))
}

async fn image(
    State(state): State<AppState>,
    Path((study_id, image_id)): Path<(String, String)>,
) -> ApiResult<Response> {
    let rel = read(&state).image_path(&study_id, &image_id)?.to_owned();
    let Some(root) = &state.config.image_root else {
        return Err(StudyError::UnknownImage(image_id));
    };
    if !is_contained_path(&rel) {
        return Err(StudyError::UnknownImage(image_id));
    }
    let bytes = match tokio::fs::read(root.join(&rel)).await {
        Ok(b) => b,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            return Err(StudyError::UnknownImage(image_id))
        }
        Err(e) => return Err(e.into()),
    };
    Ok((
        [
            (header::CONTENT_TYPE, content_type(&rel)),
            (header::CACHE_CONTROL, "no-store"),
        ],
        Body::from(bytes),
    )
        .into_response())
}

fn content_type(path: &str) -> &'static str {
    let ext = path.rsplit('.').next().unwrap_or("").to_ascii_lowercase();
    match ext.as_str() {
        "png" => "image/png",
        "jpg" | "jpeg" => "image/jpeg",
        "webp" => "image/webp",
        "gif" => "image/gif",
        "tif" | "tiff" => "image/tiff",
        _ => "application/octet-stream",
    }
}
