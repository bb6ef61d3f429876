//! One organisation's answers for one month against one checklist version.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize, Serializer};

use crate::checklist::Checklist;
use crate::error::{Error, Result};
use crate::json;
use crate::period::Period;
use crate::validation::{is_absolute_iri, is_identifier, IssueCollector, ValidationReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AnswerStatus {
    Compliant,
    NonCompliant,
    NotApplicable,
}

impl AnswerStatus {
    pub const ALL: [AnswerStatus; 3] = [
        AnswerStatus::Compliant,
        AnswerStatus::NonCompliant,
        AnswerStatus::NotApplicable,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AnswerStatus::Compliant => "compliant",
            AnswerStatus::NonCompliant => "non_compliant",
            AnswerStatus::NotApplicable => "not_applicable",
        }
    }
}

impl fmt::Display for AnswerStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AnswerStatus {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        Self::ALL.into_iter().find(|status| status.as_str() == s).ok_or(())
    }
}

impl Serialize for AnswerStatus {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Answer {
    pub question_id: String,
    pub status: AnswerStatus,
    pub note: Option<String>,
    pub evidence_uri: Option<String>,
}

impl Answer {
    pub fn new(question_id: impl Into<String>, status: AnswerStatus) -> Self {
        Self {
            question_id: question_id.into(),
            status,
            note: None,
            evidence_uri: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assessment {
    pub org_id: String,
    pub checklist_id: String,
    pub checklist_version: String,
    pub period: Period,
    pub submitted_at: DateTime<Utc>,
    pub answers: Vec<Answer>,
}

// Wire form. Fields stay strings so that bad statuses, periods and
// timestamps surface as their own error codes rather than generic schema
// errors.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct AssessmentDoc {
    org_id: String,
    checklist_id: String,
    checklist_version: String,
    period: String,
    submitted_at: String,
    answers: Vec<AnswerDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AnswerDoc {
    question_id: String,
    status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    note: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    evidence_uri: Option<String>,
}

impl From<&Assessment> for AssessmentDoc {
    fn from(a: &Assessment) -> Self {
        Self {
            org_id: a.org_id.clone(),
            checklist_id: a.checklist_id.clone(),
            checklist_version: a.checklist_version.clone(),
            period: a.period.to_string(),
            submitted_at: format_timestamp(&a.submitted_at),
            answers: a
                .answers
                .iter()
                .map(|answer| AnswerDoc {
                    question_id: answer.question_id.clone(),
                    status: answer.status.as_str().to_owned(),
                    note: answer.note.clone(),
                    evidence_uri: answer.evidence_uri.clone(),
                })
                .collect(),
        }
    }
}

impl TryFrom<AssessmentDoc> for Assessment {
    type Error = Error;

    fn try_from(doc: AssessmentDoc) -> Result<Self> {
        let period = doc.period.parse()?;
        let submitted_at = parse_timestamp(&doc.submitted_at)?;
        let answers = doc
            .answers
            .into_iter()
            .enumerate()
            .map(|(i, answer)| {
                let status = answer.status.parse().map_err(|()| Error::BadStatus {
                    path: format!("answers[{i}].status"),
                    value: answer.status.clone(),
                })?;
                Ok(Answer {
                    question_id: answer.question_id,
                    status,
                    note: answer.note,
                    evidence_uri: answer.evidence_uri,
                })
            })
            .collect::<Result<_>>()?;
        Ok(Assessment {
            org_id: doc.org_id,
            checklist_id: doc.checklist_id,
            checklist_version: doc.checklist_version,
            period,
            submitted_at,
            answers,
        })
    }
}

impl Serialize for Assessment {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        AssessmentDoc::from(self).serialize(serializer)
    }
}

/// RFC 3339 in UTC with a `Z` suffix; sub-second digits only when present.
pub fn format_timestamp(t: &DateTime<Utc>) -> String {
    t.to_rfc3339_opts(SecondsFormat::AutoSi, true)
}

pub fn parse_timestamp(s: &str) -> Result<DateTime<Utc>> {
    DateTime::parse_from_rfc3339(s)
        .map(|t| t.with_timezone(&Utc))
        .map_err(|_| Error::BadTimestamp(s.to_owned()))
}

/// Decodes an assessment document. Coverage against a checklist is checked
/// separately by [`validate_assessment`].
pub fn parse_assessment(document: &[u8]) -> Result<Assessment> {
    let doc: AssessmentDoc = json::decode(document)?;
    doc.try_into()
}

impl Assessment {
    pub fn to_canonical_json(&self) -> String {
        json::canonical(self)
    }

    pub fn checklist_key(&self) -> String {
        format!("{}@{}", self.checklist_id, self.checklist_version)
    }
}

/// Checks coverage of `c` by `a`: exactly one answer per checklist question.
/// Fails only when `a` targets a different checklist id or version.
pub fn validate_assessment(a: &Assessment, c: &Checklist) -> Result<ValidationReport> {
    if a.checklist_id != c.id || a.checklist_version != c.version {
        return Err(Error::ChecklistMismatch {
            expected: c.key(),
            found: a.checklist_key(),
        });
    }

    let mut issues = IssueCollector::default();
    if !is_identifier(&a.org_id) {
        issues.error(
            "bad-org-id",
            "org_id",
            format!("organisation id {:?} is not a valid identifier", a.org_id),
        );
    }

    let known: HashSet<&str> = c.questions().map(|(_, q)| q.id.as_str()).collect();
    let mut seen: HashMap<&str, usize> = HashMap::new();
    for (i, answer) in a.answers.iter().enumerate() {
        let qid = answer.question_id.as_str();
        let path = format!("answers[{i}]");
        if !known.contains(qid) {
            issues.question_error(
                "unknown-question",
                format!("{path}.question_id"),
                qid,
                format!("question {qid:?} is not in checklist {}", c.key()),
            );
        } else if let Some(first) = seen.get(qid) {
            issues.question_error(
                "duplicate-answer",
                format!("{path}.question_id"),
                qid,
                format!("question {qid:?} already answered at answers[{first}]"),
            );
        } else {
            seen.insert(qid, i);
        }
        if let Some(uri) = &answer.evidence_uri {
            if !is_absolute_iri(uri) {
                issues.question_error(
                    "bad-iri",
                    format!("{path}.evidence_uri"),
                    qid,
                    format!("{uri:?} is not an absolute IRI"),
                );
            }
        }
    }

    for (_, question) in c.questions() {
        if !seen.contains_key(question.id.as_str()) {
            issues.question_error(
                "missing-answer",
                "answers",
                &question.id,
                format!("no answer for question {:?}", question.id),
            );
        }
    }

    Ok(issues.finish())
}
