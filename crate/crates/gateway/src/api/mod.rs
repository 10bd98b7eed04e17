//! HTTP routes. Reads are open; every mutating route sits behind the bearer
//! token check, which runs before any body is read.

mod import;
mod media;
mod meta;
mod search;

use std::sync::Arc;

use axum::extract::{DefaultBodyLimit, Request, State};
use axum::http::{header, StatusCode};
use axum::middleware::{self, Next};
use axum::response::{IntoResponse, Response};
use axum::routing::{delete, get, post};
use axum::{Json, Router};
use serde::Serialize;
use sha2::{Digest, Sha256};

use mediahub_core::ingest::EnrichmentProvider;
use mediahub_core::library::{Hub, LibraryError};

pub use media::{DetailView, RevisionSummary, TranscriptView};
pub use meta::{FiltersView, Health};

/// Upper bound for upload bodies.
pub const MAX_UPLOAD_BYTES: usize = 256 * 1024 * 1024;

#[derive(Clone)]
pub struct AppState {
    pub hub: Arc<Hub>,
    token_digest: [u8; 32],
    pub enrichment: Option<Arc<dyn EnrichmentProvider>>,
}

impl AppState {
    /// `token` must be non-empty; the gateway has no tokenless write mode.
    pub fn new(hub: Arc<Hub>, token: &str) -> Self {
        assert!(!token.is_empty(), "write token must not be empty");
        Self {
            hub,
            token_digest: Sha256::digest(token.as_bytes()).into(),
            enrichment: None,
        }
    }

    pub fn with_enrichment(mut self, provider: Arc<dyn EnrichmentProvider>) -> Self {
        self.enrichment = Some(provider);
        self
    }

    /// Compares digests so the check does not leak the token length or a
    /// matching prefix through timing.
    fn accepts(&self, presented: &str) -> bool {
        let digest: [u8; 32] = Sha256::digest(presented.as_bytes()).into();
        digest
            .iter()
            .zip(self.token_digest.iter())
            .fold(0u8, |acc, (a, b)| acc | (a ^ b))
            == 0
    }
}

pub fn router(state: AppState) -> Router {
    let auth = middleware::from_fn_with_state(state.clone(), require_token);
    Router::new()
        .route("/search", get(search::search))
        .route(
            "/media/{id}",
            get(media::detail).merge(delete(media::delete).route_layer(auth.clone())),
        )
        .route("/filters", get(meta::filters))
        .route("/health", get(meta::health))
        .route(
            "/import",
            post(import::import)
                .layer(DefaultBodyLimit::max(MAX_UPLOAD_BYTES))
                .route_layer(auth.clone()),
        )
        .route("/documents", post(media::put_document).route_layer(auth))
        .with_state(state)
}

async fn require_token(State(state): State<AppState>, req: Request, next: Next) -> Response {
    let presented = req
        .headers()
        .get(header::AUTHORIZATION)
        .and_then(|v| v.to_str().ok())
        .and_then(|v| v.strip_prefix("Bearer "))
        .map(str::trim);
    match presented {
        Some(token) if state.accepts(token) => next.run(req).await,
        Some(_) => ApiError::new(
            StatusCode::UNAUTHORIZED,
            "bad-token",
            "write token rejected",
        )
        .into_response(),
        None => ApiError::new(
            StatusCode::UNAUTHORIZED,
            "missing-token",
            "bearer token required",
        )
        .into_response(),
    }
}

#[derive(Debug, Serialize)]
struct ErrorBody {
    code: &'static str,
    message: String,
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        Self {
            status,
            code,
            message: message.into(),
        }
    }

    fn bad_request(code: &'static str, message: impl ToString) -> Self {
        Self::new(StatusCode::BAD_REQUEST, code, message.to_string())
    }

    fn not_found(message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, "not-found", message)
    }

    fn unavailable(message: impl Into<String>) -> Self {
        Self::new(StatusCode::SERVICE_UNAVAILABLE, "unavailable", message)
    }
}

impl From<LibraryError> for ApiError {
    fn from(e: LibraryError) -> Self {
        use mediahub_core::graph::GraphError;
        use mediahub_core::text::TextError;
        match &e {
            LibraryError::Unavailable(_) => Self::unavailable(e.to_string()),
            LibraryError::Graph(GraphError::UnknownItem(_))
            | LibraryError::Text(TextError::UnknownMedia(_)) => Self::not_found(e.to_string()),
            LibraryError::Text(TextError::ConsentMissing) => Self::new(
                StatusCode::UNPROCESSABLE_ENTITY,
                "consent-missing",
                e.to_string(),
            ),
            LibraryError::Graph(GraphError::Io(_)) | LibraryError::Text(TextError::Io(_)) => {
                Self::new(StatusCode::INTERNAL_SERVER_ERROR, "io", e.to_string())
            }
            _ => Self::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid", e.to_string()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        if self.status.is_server_error() {
            tracing::error!(code = self.code, "{}", self.message);
        }
        let body = Json(
            serde_json::json!({ "error": ErrorBody { code: self.code, message: self.message } }),
        );
        (self.status, body).into_response()
    }
}
