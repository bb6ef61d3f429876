//! Three-layer compliance scoring: a total, one score per section, and the
//! list of non-compliant answers.
//!
//! Every question counts once. A section's score is compliant answers over
//! applicable answers (`not_applicable` is excluded from both); the total is
//! the same ratio summed over all sections, so larger sections weigh more.
//! Ratios are kept as exact counts and rounded only for display.

use std::cmp::Ordering;
use std::collections::HashMap;

use num_rational::Rational64;
use serde::Serialize;

use crate::assessment::{validate_assessment, Answer, AnswerStatus, Assessment};
use crate::checklist::Checklist;
use crate::error::{Error, Result};
use crate::json;
use crate::period::Period;

/// `numerator / denominator` with `0 <= numerator <= denominator` and
/// `denominator > 0`. Not reduced: `3/6` keeps its counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Ratio {
    numerator: u32,
    denominator: u32,
}

impl Ratio {
    pub fn new(numerator: u32, denominator: u32) -> Option<Self> {
        (denominator > 0 && numerator <= denominator).then_some(Self {
            numerator,
            denominator,
        })
    }

    pub fn numerator(self) -> u32 {
        self.numerator
    }

    pub fn denominator(self) -> u32 {
        self.denominator
    }

    /// Compares the rational values, so `1/2` and `3/6` are equal here even
    /// though they are distinct `Ratio`s.
    pub fn cmp_value(self, other: Ratio) -> Ordering {
        let lhs = u64::from(self.numerator) * u64::from(other.denominator);
        let rhs = u64::from(other.numerator) * u64::from(self.denominator);
        lhs.cmp(&rhs)
    }

    pub fn to_rational(self) -> Rational64 {
        Rational64::new(i64::from(self.numerator), i64::from(self.denominator))
    }

    /// Whole percent, rounded half away from zero.
    pub fn percent(self) -> u32 {
        let n = u64::from(self.numerator);
        let d = u64::from(self.denominator);
        ((200 * n + d) / (2 * d)) as u32
    }
}

/// Integer percentage with a `%` suffix, e.g. `2/3` renders `67%`.
pub fn render_percent(r: Ratio) -> String {
    format!("{}%", r.percent())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectionScore {
    pub section_id: String,
    pub title: String,
    pub applicable: u32,
    pub compliant: u32,
    /// Absent when the section has no applicable answers ("not assessed").
    pub ratio: Option<Ratio>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Finding {
    pub section_id: String,
    pub question_id: String,
    pub question_text: String,
    pub status: AnswerStatus,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplianceReport {
    pub org_id: String,
    pub period: Period,
    pub checklist_id: String,
    pub checklist_version: String,
    pub total: Option<Ratio>,
    pub sections: Vec<SectionScore>,
    pub findings: Vec<Finding>,
}

fn ensure_valid(a: &Assessment, c: &Checklist) -> Result<()> {
    let report = validate_assessment(a, c)?;
    if report.ok {
        Ok(())
    } else {
        Err(Error::InvalidAssessment(report))
    }
}

fn answers_by_question(a: &Assessment) -> HashMap<&str, &Answer> {
    a.answers
        .iter()
        .map(|answer| (answer.question_id.as_str(), answer))
        .collect()
}

pub fn score_assessment(a: &Assessment, c: &Checklist) -> Result<ComplianceReport> {
    ensure_valid(a, c)?;
    let answers = answers_by_question(a);

    let sections: Vec<SectionScore> = c
        .sections
        .iter()
        .map(|section| {
            let (mut applicable, mut compliant) = (0u32, 0u32);
            for question in &section.questions {
                match answers[question.id.as_str()].status {
                    AnswerStatus::Compliant => {
                        applicable += 1;
                        compliant += 1;
                    }
                    AnswerStatus::NonCompliant => applicable += 1,
                    AnswerStatus::NotApplicable => {}
                }
            }
            SectionScore {
                section_id: section.id.clone(),
                title: section.title.clone(),
                applicable,
                compliant,
                ratio: Ratio::new(compliant, applicable),
            }
        })
        .collect();

    let compliant = sections.iter().map(|s| s.compliant).sum();
    let applicable = sections.iter().map(|s| s.applicable).sum();

    Ok(ComplianceReport {
        org_id: a.org_id.clone(),
        period: a.period,
        checklist_id: c.id.clone(),
        checklist_version: c.version.clone(),
        total: Ratio::new(compliant, applicable),
        sections,
        findings: collect_findings(a, c),
    })
}

/// One finding per `non_compliant` answer, in checklist order.
pub fn extract_findings(a: &Assessment, c: &Checklist) -> Result<Vec<Finding>> {
    ensure_valid(a, c)?;
    Ok(collect_findings(a, c))
}

fn collect_findings(a: &Assessment, c: &Checklist) -> Vec<Finding> {
    let answers = answers_by_question(a);
    c.questions()
        .filter_map(|(section, question)| {
            let answer = answers[question.id.as_str()];
            (answer.status == AnswerStatus::NonCompliant).then(|| Finding {
                section_id: section.id.clone(),
                question_id: question.id.clone(),
                question_text: question.text.clone(),
                status: answer.status,
                note: answer.note.clone(),
            })
        })
        .collect()
}

/// `{"compliant","applicable","percent"}` as used by report, trend and
/// benchmark documents.
#[derive(Debug, Serialize)]
pub(crate) struct RatioWire {
    compliant: u32,
    applicable: u32,
    percent: u32,
}

impl From<Ratio> for RatioWire {
    fn from(r: Ratio) -> Self {
        Self {
            compliant: r.numerator,
            applicable: r.denominator,
            percent: r.percent(),
        }
    }
}

#[derive(Serialize)]
struct ReportWire<'a> {
    org_id: &'a str,
    period: Period,
    checklist: ChecklistRef<'a>,
    total: Option<RatioWire>,
    sections: Vec<SectionWire<'a>>,
    findings: Vec<FindingWire<'a>>,
}

#[derive(Serialize)]
struct ChecklistRef<'a> {
    id: &'a str,
    version: &'a str,
}

#[derive(Serialize)]
struct SectionWire<'a> {
    id: &'a str,
    title: &'a str,
    compliant: u32,
    applicable: u32,
    percent: Option<u32>,
}

#[derive(Serialize)]
struct FindingWire<'a> {
    section_id: &'a str,
    question_id: &'a str,
    text: &'a str,
    note: Option<&'a str>,
}

impl ComplianceReport {
    /// The machine-readable report document. Byte-stable for equal reports.
    pub fn to_json(&self) -> String {
        let wire = ReportWire {
            org_id: &self.org_id,
            period: self.period,
            checklist: ChecklistRef {
                id: &self.checklist_id,
                version: &self.checklist_version,
            },
            total: self.total.map(RatioWire::from),
            sections: self
                .sections
                .iter()
                .map(|s| SectionWire {
                    id: &s.section_id,
                    title: &s.title,
                    compliant: s.compliant,
                    applicable: s.applicable,
                    percent: s.ratio.map(Ratio::percent),
                })
                .collect(),
            findings: self
                .findings
                .iter()
                .map(|f| FindingWire {
                    section_id: &f.section_id,
                    question_id: &f.question_id,
                    text: &f.question_text,
                    note: f.note.as_deref(),
                })
                .collect(),
        };
        json::canonical(&wire)
    }

    pub fn section(&self, section_id: &str) -> Option<&SectionScore> {
        self.sections.iter().find(|s| s.section_id == section_id)
    }
}
