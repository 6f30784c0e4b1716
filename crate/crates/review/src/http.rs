//! HTTP routes over [`ReviewService`].

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::rejection::{JsonRejection, PathRejection};
use axum::extract::{Path, Query, State};
use axum::response::{Html, IntoResponse};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use tower_http::services::ServeDir;

use crate::error::{Result, ReviewError};
use crate::service::{ListParams, ReviewService, ReviewSubmission};

type Shared = Arc<ReviewService>;
type Params = Query<HashMap<String, String>>;

const INDEX: &str = "<!doctype html><title>seqlint review</title>\
<p>The review API is served under <code>/api</code>. Start the service with a UI bundle directory to serve the interface here.</p>";

pub fn router(service: Shared, static_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/methods", get(methods))
        .route("/api/sentences", get(list))
        .route("/api/sentences/{id}", get(detail))
        .route("/api/sentences/{id}/review", post(review))
        .route("/api/stats", get(stats))
        .route("/api/export", post(export))
        .with_state(service);
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api.route("/", get(|| async { Html(INDEX) })),
    }
}

fn param<'a>(q: &'a HashMap<String, String>, key: &str) -> Option<&'a str> {
    q.get(key).map(String::as_str).filter(|v| !v.is_empty())
}

fn number(q: &HashMap<String, String>, key: &str) -> Result<Option<usize>> {
    param(q, key)
        .map(|v| {
            v.parse().map_err(|_| {
                ReviewError::Validation(format!("{key} must be a non-negative integer"))
            })
        })
        .transpose()
}

fn sentence_id(p: std::result::Result<Path<u64>, PathRejection>) -> Result<u64> {
    p.map(|Path(id)| id)
        .map_err(|e| ReviewError::Validation(format!("bad sentence id: {e}")))
}

async fn methods(State(s): State<Shared>) -> impl IntoResponse {
    Json(s.methods())
}

async fn list(State(s): State<Shared>, Query(q): Params) -> Result<impl IntoResponse> {
    let params = ListParams {
        sort: param(&q, "sort")
            .map(str::parse)
            .transpose()?
            .unwrap_or_default(),
        method: param(&q, "method").map(String::from),
        token_method: param(&q, "token_method").map(String::from),
        offset: number(&q, "offset")?.unwrap_or(0),
        limit: number(&q, "limit")?,
        filter: param(&q, "filter")
            .map(str::parse)
            .transpose()?
            .unwrap_or_default(),
    };
    Ok(Json(s.list_sentences(&params)?))
}

async fn detail(
    State(s): State<Shared>,
    id: std::result::Result<Path<u64>, PathRejection>,
    Query(q): Params,
) -> Result<impl IntoResponse> {
    let id = sentence_id(id)?;
    Ok(Json(s.get_sentence(
        id,
        param(&q, "method"),
        param(&q, "token_method"),
    )?))
}

async fn review(
    State(s): State<Shared>,
    id: std::result::Result<Path<u64>, PathRejection>,
    body: std::result::Result<Json<ReviewSubmission>, JsonRejection>,
) -> Result<impl IntoResponse> {
    let id = sentence_id(id)?;
    let Json(sub) = body.map_err(|e| ReviewError::Validation(e.body_text()))?;
    let out = tokio::task::spawn_blocking(move || s.submit_review(id, sub))
        .await
        .expect("review task panicked")?;
    Ok(Json(out))
}

async fn stats(State(s): State<Shared>) -> impl IntoResponse {
    Json(s.stats())
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExportRequest {
    #[serde(default)]
    path: Option<String>,
}

async fn export(State(s): State<Shared>, body: axum::body::Bytes) -> Result<impl IntoResponse> {
    let req: ExportRequest = if body.iter().all(u8::is_ascii_whitespace) {
        ExportRequest::default()
    } else {
        serde_json::from_slice(&body).map_err(|e| ReviewError::Validation(e.to_string()))?
    };
    let out = tokio::task::spawn_blocking(move || s.export(req.path.as_deref()))
        .await
        .expect("export task panicked")?;
    Ok(Json(out))
}

/// Serves until Ctrl-C or SIGTERM.
pub async fn serve(listener: tokio::net::TcpListener, app: Router) -> std::io::Result<()> {
    axum::serve(listener, app)
        .with_graceful_shutdown(shutdown_signal())
        .await
}

async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let term = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending().await,
        }
    };
    #[cfg(not(unix))]
    let term = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {},
        _ = term => {},
    }
}
