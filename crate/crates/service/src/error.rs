use axum::http::{header, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use compliance_core::validation::{Issue, Severity};
use compliance_core::Error;
use serde::Serialize;

/// Body of every non-2xx response.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ApiError {
    #[serde(serialize_with = "serialize_status")]
    pub status: StatusCode,
    pub code: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub details: Option<Vec<Issue>>,
}

fn serialize_status<S: serde::Serializer>(status: &StatusCode, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_u16(status.as_u16())
}

impl ApiError {
    pub fn new(status: StatusCode, code: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            status,
            code: code.into(),
            message: message.into(),
            details: None,
        }
    }

    pub fn not_found(message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, "not-found", message)
    }

    pub fn bad_request(code: &str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, code, message)
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message)
    }

    /// Generic error for a bare status produced outside the handlers.
    pub fn from_status(status: StatusCode, message: impl Into<String>) -> Self {
        let code = match status {
            StatusCode::BAD_REQUEST => "bad-request",
            StatusCode::UNAUTHORIZED => "unauthorized",
            StatusCode::NOT_FOUND => "not-found",
            StatusCode::METHOD_NOT_ALLOWED => "method-not-allowed",
            StatusCode::PAYLOAD_TOO_LARGE => "payload-too-large",
            StatusCode::UNSUPPORTED_MEDIA_TYPE => "unsupported-media-type",
            s if s.is_server_error() => "internal",
            _ => "http-error",
        };
        let mut message = message.into();
        if message.trim().is_empty() {
            message = status.canonical_reason().unwrap_or("request failed").to_owned();
        }
        Self::new(status, code, message.trim().to_owned())
    }

    /// One-line JSON form.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("error bodies serialize infallibly")
    }
}

fn status_of(e: &Error) -> StatusCode {
    match e {
        Error::NotFound(_) => StatusCode::NOT_FOUND,
        Error::VersionConflict { .. } | Error::MixedChecklist => StatusCode::CONFLICT,
        Error::CorruptJournal { .. } | Error::Io(_) => StatusCode::INTERNAL_SERVER_ERROR,
        _ => StatusCode::BAD_REQUEST,
    }
}

fn single_issue(code: &str, path: &str, message: String) -> Vec<Issue> {
    vec![Issue {
        code: code.to_owned(),
        path: path.to_owned(),
        message,
        severity: Severity::Error,
        question_id: None,
    }]
}

impl From<&Error> for ApiError {
    fn from(e: &Error) -> Self {
        let details = match e {
            Error::InvalidChecklist(_) | Error::InvalidAssessment(_) => e.issues().map(<[Issue]>::to_vec),
            Error::Schema { path, message } => Some(single_issue(e.code(), path, message.clone())),
            Error::BadStatus { path, .. } => Some(single_issue(e.code(), path, e.to_string())),
            _ => None,
        };
        let message = match e.issues() {
            Some(issues) => {
                let errors: Vec<&Issue> = issues.iter().filter(|i| i.severity == Severity::Error).collect();
                match errors.first() {
                    Some(first) if errors.len() == 1 => format!("{e}: {}", first.message),
                    Some(first) => format!("{e}: {} (and {} more)", first.message, errors.len() - 1),
                    None => e.to_string(),
                }
            }
            None => e.to_string(),
        };
        Self {
            status: status_of(e),
            code: e.code().to_owned(),
            message,
            details,
        }
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        Self::from(&e)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        if self.status.is_server_error() {
            tracing::error!(code = %self.code, "{}", self.message);
        }
        let mut response = (self.status, self.to_json()).into_response();
        response
            .headers_mut()
            .insert(header::CONTENT_TYPE, HeaderValue::from_static("application/json"));
        if self.status == StatusCode::UNAUTHORIZED {
            response
                .headers_mut()
                .insert(header::WWW_AUTHENTICATE, HeaderValue::from_static("Bearer"));
        }
        response
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use compliance_core::period::Period;

    #[test]
    fn status_mapping() {
        let cases = [
            (Error::NotFound("x".into()), 404, "not-found"),
            (Error::VersionConflict { id: "c".into(), version: "1".into() }, 409, "version-conflict"),
            (Error::MixedChecklist, 409, "mixed-checklist"),
            (Error::BadPeriod("2019-13".into()), 400, "bad-period"),
            (Error::DuplicatePeriod(Period::new(2019, 1).unwrap()), 400, "duplicate-period"),
            (Error::UnknownChecklist { id: "c".into(), version: "1".into() }, 400, "unknown-checklist"),
            (Error::Io(std::io::Error::other("disk")), 500, "io"),
        ];
        for (e, status, code) in cases {
            let api = ApiError::from(e);
            assert_eq!((api.status.as_u16(), api.code.as_str()), (status, code));
        }
    }

    #[test]
    fn schema_errors_carry_their_path() {
        let api = ApiError::from(Error::Schema {
            path: "answers[2]".into(),
            message: "missing field `status`".into(),
        });
        let details = api.details.unwrap();
        assert_eq!(details[0].path, "answers[2]");
        assert_eq!(details[0].code, "schema");
    }

    #[test]
    fn json_is_one_line() {
        let e = ApiError::bad_request("org-mismatch", "line one\nline two");
        let text = e.to_json();
        assert!(!text.contains('\n'));
        assert_eq!(
            text,
            r#"{"status":400,"code":"org-mismatch","message":"line one\nline two"}"#
        );
    }
}
