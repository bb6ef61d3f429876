use crate::period::Period;
use crate::validation::{Issue, Severity, ValidationReport};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("malformed document: {0}")]
    Syntax(String),

    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },

    #[error("invalid answer status {value:?} at {path}")]
    BadStatus { path: String, value: String },

    #[error("invalid period {0:?}, expected YYYY-MM")]
    BadPeriod(String),

    #[error("invalid timestamp {0:?}, expected RFC 3339")]
    BadTimestamp(String),

    #[error("invalid organisation id {0:?}")]
    BadOrgId(String),

    #[error("checklist failed validation")]
    InvalidChecklist(ValidationReport),

    #[error("assessment failed validation")]
    InvalidAssessment(ValidationReport),

    #[error("unknown question {0:?}")]
    UnknownQuestion(String),

    #[error("assessment targets checklist {found}, expected {expected}")]
    ChecklistMismatch { expected: String, found: String },

    #[error("reports belong to more than one organisation")]
    MixedOrg,

    #[error("reports or organisations reference more than one checklist")]
    MixedChecklist,

    #[error("more than one report for period {0}")]
    DuplicatePeriod(Period),

    #[error("invalid base IRI {0:?}")]
    InvalidBaseIri(String),

    #[error("checklist {id}@{version} is already registered with different content")]
    VersionConflict { id: String, version: String },

    #[error("checklist {id}@{version} is not registered")]
    UnknownChecklist { id: String, version: String },

    #[error("{0} not found")]
    NotFound(String),

    #[error("journal line {line}: {message}")]
    CorruptJournal { line: usize, message: String },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine code. Validation failures report the code of their
    /// first error-severity issue so callers see e.g. `missing-answer`.
    pub fn code(&self) -> &str {
        match self {
            Error::Syntax(_) => "syntax",
            Error::Schema { .. } => "schema",
            Error::BadStatus { .. } => "bad-status",
            Error::BadPeriod(_) => "bad-period",
            Error::BadTimestamp(_) => "bad-timestamp",
            Error::BadOrgId(_) => "bad-org-id",
            Error::InvalidChecklist(report) => first_error_code(report, "invalid-checklist"),
            Error::InvalidAssessment(report) => first_error_code(report, "invalid-assessment"),
            Error::UnknownQuestion(_) => "unknown-question",
            Error::ChecklistMismatch { .. } => "checklist-mismatch",
            Error::MixedOrg => "mixed-org",
            Error::MixedChecklist => "mixed-checklist",
            Error::DuplicatePeriod(_) => "duplicate-period",
            Error::InvalidBaseIri(_) => "invalid-base-iri",
            Error::VersionConflict { .. } => "version-conflict",
            Error::UnknownChecklist { .. } => "unknown-checklist",
            Error::NotFound(_) => "not-found",
            Error::CorruptJournal { .. } => "corrupt-journal",
            Error::Io(_) => "io",
        }
    }

    pub fn issues(&self) -> Option<&[Issue]> {
        match self {
            Error::InvalidChecklist(report) | Error::InvalidAssessment(report) => {
                Some(&report.issues)
            }
            _ => None,
        }
    }
}

fn first_error_code<'a>(report: &'a ValidationReport, fallback: &'a str) -> &'a str {
    report
        .issues
        .iter()
        .find(|issue| issue.severity == Severity::Error)
        .map(|issue| issue.code.as_str())
        .unwrap_or(fallback)
}
