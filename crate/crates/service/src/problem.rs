use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use serde::Serialize;

use priosel_core::domain::{ValidationReport, Violation};
use priosel_core::io::IoError;
use priosel_core::solver::InfeasibilityReport;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldError {
    pub path: String,
    pub message: String,
}

impl From<&Violation> for FieldError {
    fn from(v: &Violation) -> Self {
        Self {
            path: v.path.clone(),
            message: v.message.clone(),
        }
    }
}

/// Error body, served as `application/problem+json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Problem {
    #[serde(rename = "type")]
    pub kind: &'static str,
    pub title: String,
    pub status: u16,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub errors: Vec<FieldError>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub run: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub infeasibility: Option<InfeasibilityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub current_version: Option<u64>,
}

#[derive(Debug)]
pub enum ApiError {
    Invalid { detail: String, errors: Vec<FieldError> },
    NotFound(String),
    Conflict { expected: u64, current: u64 },
    Infeasible { run: String, report: InfeasibilityReport },
    Internal(String),
}

impl ApiError {
    pub fn invalid(detail: impl Into<String>) -> Self {
        ApiError::Invalid {
            detail: detail.into(),
            errors: Vec::new(),
        }
    }

    pub fn field(path: impl Into<String>, message: impl Into<String>) -> Self {
        let path = path.into();
        let message = message.into();
        ApiError::Invalid {
            detail: format!("{path}: {message}"),
            errors: vec![FieldError { path, message }],
        }
    }

    pub fn report(r: &ValidationReport) -> Self {
        ApiError::Invalid {
            detail: "scenario is invalid".into(),
            errors: r.violations.iter().map(FieldError::from).collect(),
        }
    }

    pub fn problem(&self) -> Problem {
        let base = |kind, title: &str, status: StatusCode| Problem {
            kind,
            title: title.into(),
            status: status.as_u16(),
            detail: None,
            errors: Vec::new(),
            run: None,
            infeasibility: None,
            current_version: None,
        };
        match self {
            ApiError::Invalid { detail, errors } => Problem {
                detail: Some(detail.clone()),
                errors: errors.clone(),
                ..base("validation", "Invalid request", StatusCode::BAD_REQUEST)
            },
            ApiError::NotFound(what) => Problem {
                detail: Some(format!("{what} not found")),
                ..base("not-found", "Not found", StatusCode::NOT_FOUND)
            },
            ApiError::Conflict { expected, current } => Problem {
                detail: Some(format!(
                    "edit is based on version {expected}, current version is {current}"
                )),
                current_version: Some(*current),
                ..base("version-conflict", "Version conflict", StatusCode::CONFLICT)
            },
            ApiError::Infeasible { run, report } => Problem {
                detail: Some(format!(
                    "no selection satisfies every constraint; relax {}",
                    report.minimal_relaxation.join(", ")
                )),
                run: Some(run.clone()),
                infeasibility: Some(report.clone()),
                ..base("infeasible", "Infeasible selection", StatusCode::UNPROCESSABLE_ENTITY)
            },
            ApiError::Internal(msg) => Problem {
                detail: Some(msg.clone()),
                ..base("internal", "Internal error", StatusCode::INTERNAL_SERVER_ERROR)
            },
        }
    }
}

impl From<IoError> for ApiError {
    fn from(e: IoError) -> Self {
        match e {
            IoError::Invalid(r) => ApiError::report(&r),
            IoError::Decode { path, message } => ApiError::field(path, message),
            IoError::Io { .. } => ApiError::Internal(e.to_string()),
            other => ApiError::invalid(other.to_string()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        if let ApiError::Internal(msg) = &self {
            tracing::error!("{msg}");
        }
        let p = self.problem();
        let status = StatusCode::from_u16(p.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        let body = serde_json::to_vec(&p).unwrap_or_default();
        (status, [(header::CONTENT_TYPE, "application/problem+json")], body).into_response()
    }
}
