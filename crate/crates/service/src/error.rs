use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use climakg_core::cypher::{ParseError, ParseErrorKind};
use climakg_core::QueryError;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCode {
    ParseError,
    PlanError,
    UnsupportedFeature,
    BadRequest,
    NotFound,
    ReadOnly,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ErrorBody {
    pub code: ErrorCode,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub offset: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApiError {
    pub status: StatusCode,
    pub body: ErrorBody,
}

impl ApiError {
    pub fn new(status: StatusCode, code: ErrorCode, message: impl Into<String>) -> Self {
        ApiError {
            status,
            body: ErrorBody { code, message: message.into(), offset: None },
        }
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, ErrorCode::BadRequest, message)
    }

    pub fn not_found(message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, ErrorCode::NotFound, message)
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, ErrorCode::BadRequest, message)
    }
}

impl From<ParseError> for ApiError {
    fn from(e: ParseError) -> Self {
        let code = match e.kind {
            ParseErrorKind::Syntax => ErrorCode::ParseError,
            ParseErrorKind::Unsupported => ErrorCode::UnsupportedFeature,
        };
        let mut err = ApiError::new(StatusCode::BAD_REQUEST, code, e.to_string());
        err.body.offset = Some(e.offset);
        err
    }
}

impl From<QueryError> for ApiError {
    fn from(e: QueryError) -> Self {
        match e {
            QueryError::Parse(p) => p.into(),
            QueryError::Plan(p) => ApiError::new(StatusCode::BAD_REQUEST, ErrorCode::PlanError, p.to_string()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}
