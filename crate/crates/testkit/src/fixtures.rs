use chrono::{DateTime, TimeZone, Utc};
use compliance_core::assessment::{Answer, AnswerStatus, Assessment};
use compliance_core::checklist::Checklist;
use compliance_core::period::Period;

/// Section percent labels of the published sample assessment, in checklist
/// order.
pub const TABLE2_PERCENTS: [&str; 8] = ["67%", "40%", "100%", "100%", "83%", "100%", "50%", "100%"];

/// Ratio class behind each label.
pub const TABLE2_CLASSES: [(u32, u32); 8] = [(2, 3), (2, 5), (1, 1), (1, 1), (5, 6), (1, 1), (3, 6), (1, 1)];

/// The published non-compliant data-breach questions.
pub const TABLE3_FINDINGS: [(&str, &str); 3] = [
    ("db-2", "Are plans and procedures regularly reviewed?"),
    ("db-3", "Are all data breaches fully documented?"),
    (
        "db-6",
        "Are there cooperation procedures in place between data controllers, suppliers and other partners to deal with data breaches?",
    ),
];

pub const BREACH_SECTION: &str = "data-breach";

pub fn period(s: &str) -> Period {
    s.parse().expect("fixture period")
}

pub fn submitted(p: Period) -> DateTime<Utc> {
    Utc.with_ymd_and_hms(i32::from(p.year()), u32::from(p.month()), 28, 12, 0, 0)
        .single()
        .expect("fixture timestamp")
}

/// `(compliant, applicable)` with `applicable <= n` and
/// `compliant / applicable == num / den`, found by trying every pair.
/// Prefers the largest `applicable`, then the smallest `compliant`.
pub fn counts_for_class(n: u32, num: u32, den: u32) -> Option<(u32, u32)> {
    (1..=n)
        .rev()
        .find_map(|a| (0..=a).find(|&k| k * den == num * a).map(|k| (k, a)))
}

/// Builds an assessment by asking `status` for every question in checklist
/// order: `(section index, question index within section)`.
pub fn assessment_with(
    checklist: &Checklist,
    org: &str,
    period: Period,
    mut status: impl FnMut(usize, usize) -> AnswerStatus,
) -> Assessment {
    let answers = checklist
        .sections
        .iter()
        .enumerate()
        .flat_map(|(si, s)| s.questions.iter().enumerate().map(move |(qi, q)| (si, qi, q)))
        .map(|(si, qi, q)| Answer::new(q.id.clone(), status(si, qi)))
        .collect();
    Assessment {
        org_id: org.to_owned(),
        checklist_id: checklist.id.clone(),
        checklist_version: checklist.version.clone(),
        period,
        submitted_at: submitted(period),
        answers,
    }
}

/// Assessment over the default checklist whose section scores reproduce the
/// published percentages. In the breach section the non-compliant answers
/// are exactly the published findings; elsewhere the trailing questions are
/// the non-compliant ones.
pub fn table2_assessment(checklist: &Checklist, org: &str, period: Period) -> Assessment {
    let plan: Vec<(u32, u32)> = checklist
        .sections
        .iter()
        .zip(TABLE2_CLASSES)
        .map(|(s, (num, den))| counts_for_class(s.questions.len() as u32, num, den).expect("reachable class"))
        .collect();
    let breach_ids: Vec<&str> = TABLE3_FINDINGS.iter().map(|(id, _)| *id).collect();

    assessment_with(checklist, org, period, |si, qi| {
        let section = &checklist.sections[si];
        let (k, a) = plan[si];
        let (k, a, qi) = (k as usize, a as usize, qi);
        if qi >= a {
            return AnswerStatus::NotApplicable;
        }
        let failing = if section.id == BREACH_SECTION && a - k == breach_ids.len() {
            breach_ids.contains(&section.questions[qi].id.as_str())
        } else {
            qi >= k
        };
        if failing {
            AnswerStatus::NonCompliant
        } else {
            AnswerStatus::Compliant
        }
    })
}

/// Breach section: only the published findings fail; every other answer is
/// compliant.
pub fn table3_assessment(checklist: &Checklist, org: &str, period: Period) -> Assessment {
    let mut a = assessment_with(checklist, org, period, |_, _| AnswerStatus::Compliant);
    for answer in &mut a.answers {
        if TABLE3_FINDINGS.iter().any(|(id, _)| *id == answer.question_id) {
            answer.status = AnswerStatus::NonCompliant;
            answer.note = Some(format!("remediation owner assigned for {}", answer.question_id));
        }
    }
    a
}

pub const SIX_MONTHS: [&str; 6] = ["2019-01", "2019-02", "2019-03", "2019-04", "2019-05", "2019-06"];

/// Six monthly assessments with every section assessed and fewer failures
/// each month.
pub fn six_month_assessments(checklist: &Checklist, org: &str) -> Vec<Assessment> {
    SIX_MONTHS
        .iter()
        .enumerate()
        .map(|(m, p)| {
            let mut g = 0usize;
            assessment_with(checklist, org, period(p), |_, _| {
                g += 1;
                if (g * 7) % 12 < 6 - m {
                    AnswerStatus::NonCompliant
                } else {
                    AnswerStatus::Compliant
                }
            })
        })
        .collect()
}
