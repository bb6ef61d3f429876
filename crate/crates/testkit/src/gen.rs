//! Random inputs: checklists of at most 4 sections by 5 questions and
//! assessments over them.

use chrono::{DateTime, TimeZone, Utc};
use compliance_core::assessment::{Answer, AnswerStatus, Assessment};
use compliance_core::checklist::{Checklist, Question, Section};
use compliance_core::period::Period;
use compliance_core::scoring::Ratio;
use compliance_core::trend::BenchmarkRow;
use proptest::collection::{btree_set, vec};
use proptest::option;
use proptest::prelude::*;
use proptest::sample::Index;

pub const MAX_SECTIONS: usize = 4;
pub const MAX_QUESTIONS: usize = 5;

fn text() -> impl Strategy<Value = String> {
    "[A-Za-z][A-Za-z0-9 ,?'é\"\\\\]{0,24}"
}

fn question_shape() -> impl Strategy<Value = (String, Option<String>)> {
    (text(), option::of(text()))
}

type SectionShape = (String, Option<String>, Vec<(String, Option<String>)>);

fn section_shape() -> impl Strategy<Value = SectionShape> {
    (
        text(),
        option::of("https://w3id\\.org/dpv#[A-Z][A-Za-z]{1,12}"),
        vec(question_shape(), 1..=MAX_QUESTIONS),
    )
}

pub fn checklist() -> impl Strategy<Value = Checklist> {
    ("[a-z][a-z0-9-]{0,8}", 1u8..4, 0u8..10, vec(section_shape(), 1..=MAX_SECTIONS)).prop_map(
        |(id, major, minor, sections)| Checklist {
            id,
            version: format!("{major}.{minor}"),
            jurisdiction: "IE".to_owned(),
            title: "Generated checklist".to_owned(),
            sections: sections
                .into_iter()
                .enumerate()
                .map(|(si, (title, dpv_concept, questions))| Section {
                    id: format!("s{si}"),
                    title,
                    dpv_concept,
                    questions: questions
                        .into_iter()
                        .enumerate()
                        .map(|(qi, (text, guidance))| Question {
                            id: format!("q{si}-{qi}"),
                            text,
                            guidance,
                        })
                        .collect(),
                })
                .collect(),
        },
    )
}

pub fn status() -> impl Strategy<Value = AnswerStatus> {
    prop::sample::select(AnswerStatus::ALL.to_vec())
}

pub fn period() -> impl Strategy<Value = Period> {
    (2000u16..2040, 1u8..=12).prop_map(|(y, m)| Period::new(y, m).unwrap())
}

pub fn timestamp() -> impl Strategy<Value = DateTime<Utc>> {
    (946_684_800i64..2_208_988_800, 0u32..1000)
        .prop_map(|(secs, millis)| Utc.timestamp_opt(secs, millis * 1_000_000).unwrap())
}

/// One answer per question, statuses and notes random, answer order
/// shuffled.
pub fn assessment_for(c: &Checklist, org: String, period: Period) -> impl Strategy<Value = Assessment> {
    let ids: Vec<String> = c.questions().map(|(_, q)| q.id.clone()).collect();
    let n = ids.len();
    let (checklist_id, version) = (c.id.clone(), c.version.clone());
    (
        vec(status(), n),
        vec(option::of(text()), n),
        vec(option::of("https://evidence\\.example/[a-z]{1,8}"), n),
        timestamp(),
    )
        .prop_map(move |(statuses, notes, evidence, submitted_at)| {
            let answers = ids
                .iter()
                .zip(statuses)
                .zip(notes.into_iter().zip(evidence))
                .map(|((id, status), (note, evidence_uri))| Answer {
                    question_id: id.clone(),
                    status,
                    note,
                    evidence_uri,
                })
                .collect::<Vec<_>>();
            (answers, submitted_at)
        })
        .prop_flat_map(|(answers, submitted_at)| (Just(answers).prop_shuffle(), Just(submitted_at)))
        .prop_map(move |(answers, submitted_at)| Assessment {
            org_id: org.clone(),
            checklist_id: checklist_id.clone(),
            checklist_version: version.clone(),
            period,
            submitted_at,
            answers,
        })
}

pub fn scored_case() -> impl Strategy<Value = (Checklist, Assessment)> {
    (checklist(), period()).prop_flat_map(|(c, p)| {
        let a = assessment_for(&c, "org-a".to_owned(), p);
        (Just(c), a)
    })
}

/// A scored case plus the id of one of its questions.
pub fn edit_case() -> impl Strategy<Value = (Checklist, Assessment, String)> {
    (scored_case(), any::<Index>()).prop_map(|((c, a), ix)| {
        let ids: Vec<&str> = c.questions().map(|(_, q)| q.id.as_str()).collect();
        let id = ids[ix.index(ids.len())].to_owned();
        (c, a, id)
    })
}

/// Up to six assessments for one organisation in distinct months.
pub fn series_case() -> impl Strategy<Value = (Checklist, Vec<Assessment>)> {
    (checklist(), period(), btree_set(0u32..36, 0..=6)).prop_flat_map(|(c, start, offsets)| {
        let periods: Vec<Period> = offsets
            .into_iter()
            .map(|k| (0..k).fold(start, |p, _| p.succ().unwrap_or(p)))
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect();
        let assessments: Vec<_> = periods
            .into_iter()
            .map(|p| assessment_for(&c, "org-a".to_owned(), p))
            .collect();
        (Just(c), assessments)
    })
}

pub fn benchmark_rows() -> impl Strategy<Value = Vec<BenchmarkRow>> {
    btree_set("[a-c]{1,3}", 0..8)
        .prop_flat_map(|orgs| {
            let n = orgs.len();
            (
                Just(orgs.into_iter().collect::<Vec<_>>()),
                vec(option::of((1u32..=12).prop_flat_map(|d| (0..=d, Just(d)))), n),
            )
        })
        .prop_map(|(orgs, totals)| {
            orgs.into_iter()
                .zip(totals)
                .map(|(org_id, total)| BenchmarkRow {
                    org_id,
                    latest_period: total.map(|_| Period::new(2019, 1).unwrap()),
                    total: total.and_then(|(n, d)| Ratio::new(n, d)),
                })
                .collect::<Vec<_>>()
        })
        .prop_shuffle()
}
