use std::path::PathBuf;

use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::Serialize;

use crate::SCHEMA;

pub type Result<T, E = ReviewError> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum ReviewError {
    #[error("no sentence with id {0}")]
    NotFound(u64),
    #[error("unknown method {name:?}; available: {}", available.join(", "))]
    UnknownMethod {
        name: String,
        available: Vec<String>,
    },
    #[error("invalid request: {0}")]
    Validation(String),
    #[error("dataset fingerprint mismatch: expected {expected}, got {got}")]
    Conflict { expected: String, got: String },
    #[error("state file {path} belongs to a different dataset (fingerprint {found}, dataset {expected})")]
    ForeignState {
        path: PathBuf,
        found: String,
        expected: String,
    },
    #[error("state file {path} is corrupt: {message}")]
    CorruptState { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] seqlint_core::Error),
}

impl ReviewError {
    pub fn status(&self) -> StatusCode {
        match self {
            ReviewError::NotFound(_) => StatusCode::NOT_FOUND,
            ReviewError::UnknownMethod { .. } | ReviewError::Validation(_) => {
                StatusCode::UNPROCESSABLE_ENTITY
            }
            ReviewError::Conflict { .. } | ReviewError::ForeignState { .. } => StatusCode::CONFLICT,
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            ReviewError::NotFound(_) => "not_found",
            ReviewError::UnknownMethod { .. } => "unknown_method",
            ReviewError::Validation(_) => "validation",
            ReviewError::Conflict { .. } | ReviewError::ForeignState { .. } => "conflict",
            ReviewError::CorruptState { .. } => "corrupt_state",
            ReviewError::Io { .. } => "io",
            ReviewError::Core(_) => "internal",
        }
    }
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    schema: &'static str,
    error: ErrorDetail<'a>,
}

#[derive(Serialize)]
struct ErrorDetail<'a> {
    code: &'static str,
    message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    available: Option<&'a [String]>,
}

impl IntoResponse for ReviewError {
    fn into_response(self) -> Response {
        let available = match &self {
            ReviewError::UnknownMethod { available, .. } => Some(available.as_slice()),
            _ => None,
        };
        let body = ErrorBody {
            schema: SCHEMA,
            error: ErrorDetail {
                code: self.code(),
                message: self.to_string(),
                available,
            },
        };
        (self.status(), Json(body)).into_response()
    }
}
