//! Property bodies. Each takes one generated input and fails with a
//! `TestCaseError` on a counterexample.

use std::cmp::Ordering;
use std::time::{Duration, Instant};

use compliance_core::assessment::{parse_assessment, AnswerStatus, Assessment};
use compliance_core::checklist::{parse_checklist, validate_checklist, Checklist};
use compliance_core::scoring::{extract_findings, score_assessment, ComplianceReport, Ratio};
use compliance_core::trend::{benchmark_order, build_trend, rank, trend_delta, BenchmarkRow};
use num_rational::Rational64;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

use crate::gen;
use crate::oracle::{fraction, section_counts, total_counts};

type Outcome = Result<(), TestCaseError>;

fn score(c: &Checklist, a: &Assessment) -> Result<ComplianceReport, TestCaseError> {
    score_assessment(a, c).map_err(|e| TestCaseError::fail(format!("scoring refused a valid assessment: {e}")))
}

fn with_status(a: &Assessment, question_id: &str, status: AnswerStatus) -> Assessment {
    let mut a = a.clone();
    for answer in &mut a.answers {
        if answer.question_id == question_id {
            answer.status = status;
        }
    }
    a
}

fn value(r: Option<Ratio>) -> Option<Rational64> {
    r.map(Ratio::to_rational)
}

fn owning_section(c: &Checklist, question_id: &str) -> String {
    c.questions()
        .find(|(_, q)| q.id == question_id)
        .map(|(s, _)| s.id.clone())
        .expect("generated id")
}

pub fn score_bounds((c, a): (Checklist, Assessment)) -> Outcome {
    let report = score(&c, &a)?;
    let zero = Rational64::from_integer(0);
    let one = Rational64::from_integer(1);
    for (section, s) in c.sections.iter().zip(&report.sections) {
        prop_assert!(s.compliant <= s.applicable);
        prop_assert!(s.applicable as usize <= section.questions.len());
        if let Some(r) = value(s.ratio) {
            prop_assert!(zero <= r && r <= one, "section ratio {} out of bounds", r);
        }
        prop_assert_eq!(s.ratio.is_some(), s.applicable > 0);
    }
    if let Some(r) = value(report.total) {
        prop_assert!(zero <= r && r <= one, "total {} out of bounds", r);
    }
    Ok(())
}

/// non_compliant to compliant never lowers the owning section or the total,
/// and raises both since their denominators stay fixed and positive.
pub fn flip_up((c, a, id): (Checklist, Assessment, String)) -> Outcome {
    let before = score(&c, &with_status(&a, &id, AnswerStatus::NonCompliant))?;
    let after = score(&c, &with_status(&a, &id, AnswerStatus::Compliant))?;
    let owner = owning_section(&c, &id);
    for (b, f) in before.sections.iter().zip(&after.sections) {
        if b.section_id == owner {
            prop_assert_eq!(b.applicable, f.applicable);
            prop_assert!(value(f.ratio).unwrap() > value(b.ratio).unwrap());
        } else {
            prop_assert_eq!(b, f);
        }
    }
    prop_assert!(value(after.total).unwrap() > value(before.total).unwrap());
    Ok(())
}

/// not_applicable to compliant never lowers the owning section or the total.
pub fn enter((c, a, id): (Checklist, Assessment, String)) -> Outcome {
    let before = score(&c, &with_status(&a, &id, AnswerStatus::NotApplicable))?;
    let after = score(&c, &with_status(&a, &id, AnswerStatus::Compliant))?;
    let owner = owning_section(&c, &id);
    let b = before.section(&owner).unwrap();
    let f = after.section(&owner).unwrap();
    prop_assert_eq!(f.applicable, b.applicable + 1);
    if let Some(r) = value(b.ratio) {
        prop_assert!(value(f.ratio).unwrap() >= r);
    }
    if let Some(r) = value(before.total) {
        prop_assert!(value(after.total).unwrap() >= r);
    }
    Ok(())
}

/// Changing a not_applicable answer to any status leaves every other
/// section untouched.
pub fn na_isolation(((c, a, id), status): ((Checklist, Assessment, String), AnswerStatus)) -> Outcome {
    let before = score(&c, &with_status(&a, &id, AnswerStatus::NotApplicable))?;
    let after = score(&c, &with_status(&a, &id, status))?;
    let owner = owning_section(&c, &id);
    for (b, f) in before.sections.iter().zip(&after.sections) {
        if b.section_id != owner {
            prop_assert_eq!(b, f);
        }
    }
    Ok(())
}

pub fn findings_consistency((c, a): (Checklist, Assessment)) -> Outcome {
    let report = score(&c, &a)?;
    let findings = extract_findings(&a, &c).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert_eq!(&findings, &report.findings);
    for s in &report.sections {
        let in_section = findings.iter().filter(|f| f.section_id == s.section_id).count();
        prop_assert_eq!(in_section as u32, s.applicable - s.compliant);
    }
    for f in &findings {
        prop_assert_eq!(f.status, AnswerStatus::NonCompliant);
        let (section, question) = c.question_lookup(&f.question_id).unwrap();
        prop_assert_eq!(&section.id, &f.section_id);
        prop_assert_eq!(&question.text, &f.question_text);
    }
    Ok(())
}

pub fn oracle_counts((c, a): (Checklist, Assessment)) -> Outcome {
    let report = score(&c, &a)?;
    let expected = section_counts(&c, &a);
    prop_assert_eq!(report.sections.len(), expected.len());
    for (s, e) in report.sections.iter().zip(&expected) {
        prop_assert_eq!(&s.section_id, &e.section_id);
        prop_assert_eq!((s.compliant, s.applicable), (e.compliant, e.applicable));
        prop_assert_eq!(value(s.ratio), fraction(e.compliant, e.applicable));
        let found: Vec<&str> = report
            .findings
            .iter()
            .filter(|f| f.section_id == s.section_id)
            .map(|f| f.question_id.as_str())
            .collect();
        prop_assert_eq!(found, e.non_compliant_ids.iter().map(String::as_str).collect::<Vec<_>>());
    }
    let (k, n) = total_counts(&c, &a);
    prop_assert_eq!(report.total.map(|r| (r.numerator(), r.denominator())), (n > 0).then_some((k, n)));
    Ok(())
}

pub fn determinism((c, a): (Checklist, Assessment)) -> Outcome {
    let first = score(&c, &a)?;
    let second = score(&c, &a)?;
    prop_assert_eq!(first.to_json(), second.to_json());
    prop_assert_eq!(first, second);
    Ok(())
}

fn reports(c: &Checklist, assessments: &[Assessment]) -> Result<Vec<ComplianceReport>, TestCaseError> {
    assessments.iter().map(|a| score(c, a)).collect()
}

pub fn trend_permutation(((c, assessments), shuffled): ((Checklist, Vec<Assessment>), Vec<usize>)) -> Outcome {
    let sorted = reports(&c, &assessments)?;
    let permuted: Vec<ComplianceReport> = shuffled.iter().map(|&i| sorted[i].clone()).collect();
    let expected = build_trend("org-a", &sorted).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let got = build_trend("org-a", &permuted).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert_eq!(&got, &expected);
    prop_assert!(got.points.windows(2).all(|w| w[0].period < w[1].period));
    Ok(())
}

/// The deltas sum to last minus first whenever every total is present; an
/// absent total makes exactly its adjacent deltas undefined.
pub fn telescoping((c, assessments): (Checklist, Vec<Assessment>)) -> Outcome {
    let series = build_trend("org-a", &reports(&c, &assessments)?).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let deltas = trend_delta(&series);
    prop_assert_eq!(deltas.len(), series.points.len().saturating_sub(1));
    for (d, w) in deltas.iter().zip(series.points.windows(2)) {
        prop_assert_eq!(d.period, w[1].period);
        prop_assert_eq!(d.change.is_some(), w[0].total.is_some() && w[1].total.is_some());
    }
    if series.points.iter().all(|p| p.total.is_some()) && !series.points.is_empty() {
        let sum = deltas
            .iter()
            .fold(Rational64::from_integer(0), |acc, d| acc + d.change.unwrap());
        let first = value(series.points[0].total).unwrap();
        let last = value(series.points.last().unwrap().total).unwrap();
        prop_assert_eq!(sum, last - first);
    }
    Ok(())
}

fn reference_key(r: &BenchmarkRow) -> (bool, Rational64, String) {
    (
        r.total.is_none(),
        -value(r.total).unwrap_or_default(),
        r.org_id.clone(),
    )
}

pub fn benchmark_total_order(rows: Vec<BenchmarkRow>) -> Outcome {
    for a in &rows {
        prop_assert_eq!(benchmark_order(a, a), Ordering::Equal);
        for b in &rows {
            prop_assert_eq!(benchmark_order(a, b), benchmark_order(b, a).reverse());
            prop_assert_eq!(benchmark_order(a, b), reference_key(a).cmp(&reference_key(b)));
            for c in &rows {
                if benchmark_order(a, b) != Ordering::Greater && benchmark_order(b, c) != Ordering::Greater {
                    prop_assert_ne!(benchmark_order(a, c), Ordering::Greater);
                }
            }
        }
    }
    let ranked = rank(rows.clone());
    prop_assert!(ranked.windows(2).all(|w| benchmark_order(&w[0], &w[1]) == Ordering::Less));
    prop_assert_eq!(ranked.len(), rows.len());
    Ok(())
}

pub fn checklist_round_trip(c: Checklist) -> Outcome {
    prop_assert!(validate_checklist(&c).ok);
    let text = c.to_canonical_json();
    let back = parse_checklist(text.as_bytes()).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert_eq!(&back, &c);
    prop_assert_eq!(back.to_canonical_json(), text);
    Ok(())
}

pub fn assessment_round_trip((_, a): (Checklist, Assessment)) -> Outcome {
    let text = a.to_canonical_json();
    let back = parse_assessment(text.as_bytes()).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert_eq!(&back, &a);
    prop_assert_eq!(back.to_canonical_json(), text);
    Ok(())
}

/// Random permutation of `0..n` for each series case.
pub fn series_with_permutation() -> impl Strategy<Value = ((Checklist, Vec<Assessment>), Vec<usize>)> {
    gen::series_case().prop_flat_map(|(c, assessments)| {
        let order: Vec<usize> = (0..assessments.len()).collect();
        (Just((c, assessments)), Just(order).prop_shuffle())
    })
}

#[derive(Debug)]
pub struct PropertyOutcome {
    pub name: &'static str,
    pub cases: u32,
    pub elapsed: Duration,
    pub result: Result<(), String>,
}

fn check<S: Strategy>(
    name: &'static str,
    cases: u32,
    strategy: S,
    body: impl Fn(S::Value) -> Outcome,
) -> PropertyOutcome {
    let mut runner = TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    });
    let start = Instant::now();
    let result = runner.run(&strategy, body).map_err(|e| e.to_string());
    PropertyOutcome {
        name,
        cases,
        elapsed: start.elapsed(),
        result,
    }
}

/// Runs every property with `cases` random inputs each.
pub fn run_suite(cases: u32) -> Vec<PropertyOutcome> {
    vec![
        check("score-bounds", cases, gen::scored_case(), score_bounds),
        check("flip-up-monotonicity", cases, gen::edit_case(), flip_up),
        check("enter-monotonicity", cases, gen::edit_case(), enter),
        check("na-section-isolation", cases, (gen::edit_case(), gen::status()), na_isolation),
        check("findings-score-consistency", cases, gen::scored_case(), findings_consistency),
        check("brute-force-count-oracle", cases, gen::scored_case(), oracle_counts),
        check("scoring-determinism", cases, gen::scored_case(), determinism),
        check("trend-permutation-invariance", cases, series_with_permutation(), trend_permutation),
        check("trend-delta-telescoping", cases, gen::series_case(), telescoping),
        check("benchmark-total-order", cases, gen::benchmark_rows(), benchmark_total_order),
        check("checklist-round-trip", cases, gen::checklist(), checklist_round_trip),
        check("assessment-round-trip", cases, gen::scored_case(), assessment_round_trip),
    ]
}
