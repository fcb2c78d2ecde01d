use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use encoder_lens_core::control::RunState;
use encoder_lens_core::Error as CoreError;
use serde_json::json;

#[derive(Debug, thiserror::Error)]
pub enum ApiError {
    #[error("{message}")]
    BadRequest { code: &'static str, message: String },

    #[error("{message}")]
    NotFound { code: &'static str, message: String },

    #[error("{message}")]
    Conflict { message: String, run_state: RunState, current_epoch: usize },

    #[error("{0}")]
    Internal(String),
}

impl ApiError {
    pub fn bad_request(code: &'static str, message: impl Into<String>) -> Self {
        ApiError::BadRequest { code, message: message.into() }
    }

    pub fn unknown_session(id: &str) -> Self {
        ApiError::NotFound { code: "unknown_session", message: format!("unknown session `{id}`") }
    }

    fn parts(&self) -> (StatusCode, &'static str) {
        match self {
            ApiError::BadRequest { code, .. } => (StatusCode::BAD_REQUEST, code),
            ApiError::NotFound { code, .. } => (StatusCode::NOT_FOUND, code),
            ApiError::Conflict { .. } => (StatusCode::CONFLICT, "illegal_transition"),
            ApiError::Internal(_) => (StatusCode::INTERNAL_SERVER_ERROR, "internal"),
        }
    }
}

impl From<CoreError> for ApiError {
    fn from(err: CoreError) -> Self {
        match &err {
            CoreError::NotFound { kind, .. } => {
                let code = match *kind {
                    "dataset" => "unknown_dataset",
                    "encoder" => "unknown_encoder",
                    _ => "not_found",
                };
                ApiError::NotFound { code, message: err.to_string() }
            }
            CoreError::InvalidConfig(_) | CoreError::Contract(_) => {
                ApiError::bad_request("invalid_config", err.to_string())
            }
            CoreError::Circuit(_) | CoreError::Transport(_) => ApiError::Internal(err.to_string()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, code) = self.parts();
        let mut body = json!({ "error": { "code": code, "message": self.to_string() } });
        if let ApiError::Conflict { run_state, current_epoch, .. } = &self {
            body["run_state"] = json!(run_state);
            body["current_epoch"] = json!(current_epoch);
        }
        (status, Json(body)).into_response()
    }
}
