//! Validation reports and the identifier / IRI syntax rules shared by the
//! document models.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Issue {
    pub code: String,
    pub path: String,
    pub message: String,
    pub severity: Severity,
    /// Question the issue concerns, when there is one. Lets clients place
    /// the message beside the offending question.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub question_id: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn errors(&self) -> impl Iterator<Item = &Issue> {
        self.issues
            .iter()
            .filter(|issue| issue.severity == Severity::Error)
    }

    pub fn has_code(&self, code: &str) -> bool {
        self.issues.iter().any(|issue| issue.code == code)
    }
}

#[derive(Debug, Default)]
pub(crate) struct IssueCollector {
    issues: Vec<Issue>,
}

impl IssueCollector {
    pub fn error(&mut self, code: &str, path: impl Into<String>, message: impl Into<String>) {
        self.push(code, path.into(), message.into(), Severity::Error, None);
    }

    pub fn warning(&mut self, code: &str, path: impl Into<String>, message: impl Into<String>) {
        self.push(code, path.into(), message.into(), Severity::Warning, None);
    }

    pub fn question_error(
        &mut self,
        code: &str,
        path: impl Into<String>,
        question_id: &str,
        message: impl Into<String>,
    ) {
        self.push(
            code,
            path.into(),
            message.into(),
            Severity::Error,
            Some(question_id.to_owned()),
        );
    }

    fn push(
        &mut self,
        code: &str,
        path: String,
        message: String,
        severity: Severity,
        question_id: Option<String>,
    ) {
        self.issues.push(Issue {
            code: code.to_owned(),
            path,
            message,
            severity,
            question_id,
        });
    }

    pub fn finish(self) -> ValidationReport {
        let ok = !self
            .issues
            .iter()
            .any(|issue| issue.severity == Severity::Error);
        ValidationReport {
            ok,
            issues: self.issues,
        }
    }
}

/// Section and question codes: lowercase ASCII letters, digits and hyphens,
/// 1 to 64 characters.
pub fn is_code(s: &str) -> bool {
    (1..=64).contains(&s.len())
        && s
            .bytes()
            .all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'-')
}

/// Organisation and checklist identifiers end up in URL paths, file names
/// and minted IRIs, so they are restricted to `[A-Za-z0-9._-]`, must not
/// start with a dot, and are at most 128 characters.
pub fn is_identifier(s: &str) -> bool {
    (1..=128).contains(&s.len())
        && !s.starts_with('.')
        && s
            .bytes()
            .all(|b| b.is_ascii_alphanumeric() || matches!(b, b'.' | b'_' | b'-'))
}

/// Dotted numeric version such as `1.0.0`.
pub fn is_dotted_version(s: &str) -> bool {
    !s.is_empty()
        && s.len() <= 64
        && s
            .split('.')
            .all(|part| !part.is_empty() && part.bytes().all(|b| b.is_ascii_digit()))
}

/// Absolute IRI: a scheme followed by `:` and a non-empty remainder free of
/// whitespace, control characters and the characters Turtle forbids inside
/// `<...>`.
pub fn is_absolute_iri(s: &str) -> bool {
    let Some((scheme, rest)) = s.split_once(':') else {
        return false;
    };
    let mut scheme_chars = scheme.chars();
    let scheme_ok = scheme_chars
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic())
        && scheme_chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'));
    scheme_ok
        && !rest.is_empty()
        && !rest.chars().any(|c| {
            c.is_whitespace()
                || c.is_control()
                || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\')
        })
}
