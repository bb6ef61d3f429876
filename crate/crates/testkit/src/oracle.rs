//! Naive reference computations, written without the engine's lookup maps
//! or ratio type.

use compliance_core::assessment::{AnswerStatus, Assessment};
use compliance_core::checklist::Checklist;
use num_rational::Rational64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectionCounts {
    pub section_id: String,
    pub compliant: u32,
    pub applicable: u32,
    pub non_compliant_ids: Vec<String>,
}

fn status_of(a: &Assessment, question_id: &str) -> AnswerStatus {
    let mut found = None;
    for answer in &a.answers {
        if answer.question_id == question_id {
            assert!(found.is_none(), "duplicate answer {question_id}");
            found = Some(answer.status);
        }
    }
    found.unwrap_or_else(|| panic!("no answer for {question_id}"))
}

/// Per-section counts by linear scan over the answer list for every
/// question.
pub fn section_counts(c: &Checklist, a: &Assessment) -> Vec<SectionCounts> {
    let mut out = Vec::new();
    for section in &c.sections {
        let mut counts = SectionCounts {
            section_id: section.id.clone(),
            compliant: 0,
            applicable: 0,
            non_compliant_ids: Vec::new(),
        };
        for question in &section.questions {
            match status_of(a, &question.id) {
                AnswerStatus::Compliant => {
                    counts.compliant += 1;
                    counts.applicable += 1;
                }
                AnswerStatus::NonCompliant => {
                    counts.applicable += 1;
                    counts.non_compliant_ids.push(question.id.clone());
                }
                AnswerStatus::NotApplicable => {}
            }
        }
        out.push(counts);
    }
    out
}

/// `(compliant, applicable)` summed over every question.
pub fn total_counts(c: &Checklist, a: &Assessment) -> (u32, u32) {
    section_counts(c, a)
        .iter()
        .fold((0, 0), |(k, n), s| (k + s.compliant, n + s.applicable))
}

pub fn fraction(compliant: u32, applicable: u32) -> Option<Rational64> {
    (applicable > 0).then(|| Rational64::new(i64::from(compliant), i64::from(applicable)))
}
