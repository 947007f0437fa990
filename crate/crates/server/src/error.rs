use axum::extract::rejection::JsonRejection;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use crucible_core::eval::run::RunError;
use crucible_core::{CanvasError, ModelError, StoreError};
use serde::Serialize;
use serde_json::{json, Value};

/// An error as sent to clients: status, a stable machine code, a message,
/// and optional structured details.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ApiError {
    #[serde(skip)]
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub details: Value,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code,
            message: message.into(),
            details: Value::Null,
        }
    }

    fn with(mut self, details: Value) -> Self {
        self.details = details;
        self
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(&self)).into_response()
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, "badRequest", e.body_text())
    }
}

impl From<ModelError> for ApiError {
    fn from(e: ModelError) -> Self {
        let span = e.span();
        ApiError::new(StatusCode::BAD_REQUEST, "modelError", e.to_string())
            .with(json!({ "line": span.line, "column": span.column }))
    }
}

impl From<CanvasError> for ApiError {
    fn from(e: CanvasError) -> Self {
        let message = e.to_string();
        let (status, code) = match &e {
            CanvasError::Guidance(verdict) => {
                return ApiError::new(StatusCode::CONFLICT, "guidanceViolation", message)
                    .with(serde_json::to_value(verdict).unwrap_or_default());
            }
            CanvasError::AbstractSig(_) => (StatusCode::CONFLICT, "abstractSig"),
            CanvasError::UnknownSig(_) => (StatusCode::BAD_REQUEST, "unknownSig"),
            CanvasError::UnknownAtom(_) => (StatusCode::NOT_FOUND, "unknownAtom"),
            CanvasError::UnknownRelation(_) => (StatusCode::BAD_REQUEST, "unknownRelation"),
            CanvasError::ArityMismatch { .. } => (StatusCode::BAD_REQUEST, "arityMismatch"),
            CanvasError::UnknownConnection(_) => (StatusCode::NOT_FOUND, "unknownConnection"),
            CanvasError::UnknownPred(_) => (StatusCode::NOT_FOUND, "unknownPred"),
            CanvasError::BadArgs(_) => (StatusCode::BAD_REQUEST, "badArgs"),
            CanvasError::BadPrefix(_) => (StatusCode::BAD_REQUEST, "badPrefix"),
        };
        ApiError::new(status, code, message)
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        let message = e.to_string();
        match e {
            StoreError::Model(m) => m.into(),
            StoreError::Canvas(c) => c.into(),
            StoreError::NotFound(_) => ApiError::new(StatusCode::NOT_FOUND, "projectNotFound", message),
            StoreError::UnknownTest(_) => ApiError::new(StatusCode::NOT_FOUND, "testNotFound", message),
            StoreError::DuplicateProjectName(_) => {
                ApiError::new(StatusCode::CONFLICT, "duplicateProjectName", message)
            }
            StoreError::DuplicateTestName(_) => ApiError::new(StatusCode::CONFLICT, "duplicateTestName", message),
            StoreError::CorruptProject { version, .. } => {
                ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "corruptProject", message)
                    .with(json!({ "formatVersion": version }))
            }
            StoreError::Io(_) => ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "io", message),
        }
    }
}

impl From<RunError> for ApiError {
    fn from(e: RunError) -> Self {
        let message = e.to_string();
        let RunError::StructuralBlock { report, .. } = e;
        ApiError::new(StatusCode::CONFLICT, "structuralBlock", message)
            .with(serde_json::to_value(report).unwrap_or_default())
    }
}
