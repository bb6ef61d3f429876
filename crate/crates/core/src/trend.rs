//! Per-organisation score series over months, month-on-month changes, and
//! cross-organisation benchmarks.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_rational::Rational64;
use num_traits::Signed;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::json;
use crate::period::Period;
use crate::scoring::{ComplianceReport, Ratio, RatioWire};
use crate::store::StoreSnapshot;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrendPoint {
    pub period: Period,
    pub total: Option<Ratio>,
    pub sections: Vec<(String, Option<Ratio>)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrendSeries {
    pub org_id: String,
    /// `None` only for an empty series.
    pub checklist_id: Option<String>,
    /// Strictly ascending by period.
    pub points: Vec<TrendPoint>,
}

/// Builds the series for `org_id` from one report per period, in any order.
pub fn build_trend(org_id: &str, reports: &[ComplianceReport]) -> Result<TrendSeries> {
    if reports.iter().any(|r| r.org_id != org_id) {
        return Err(Error::MixedOrg);
    }
    let checklist_id = reports.first().map(|r| r.checklist_id.clone());
    if reports
        .iter()
        .any(|r| Some(&r.checklist_id) != checklist_id.as_ref())
    {
        return Err(Error::MixedChecklist);
    }

    let mut by_period = BTreeMap::new();
    for report in reports {
        let point = TrendPoint {
            period: report.period,
            total: report.total,
            sections: report
                .sections
                .iter()
                .map(|s| (s.section_id.clone(), s.ratio))
                .collect(),
        };
        if by_period.insert(report.period, point).is_some() {
            return Err(Error::DuplicatePeriod(report.period));
        }
    }

    Ok(TrendSeries {
        org_id: org_id.to_owned(),
        checklist_id,
        points: by_period.into_values().collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrendDelta {
    /// The later of the two periods compared.
    pub period: Period,
    /// Exact change of the total ratio (1 = 100 percent points). `None` when
    /// either total is absent.
    pub change: Option<Rational64>,
}

impl TrendDelta {
    pub fn percent_points(&self) -> Option<Rational64> {
        self.change.map(|c| c * Rational64::from_integer(100))
    }

    /// Signed percent points with one decimal, e.g. `+7.4`; `n/a` when the
    /// change is undefined.
    pub fn render(&self) -> String {
        self.change.map_or_else(|| "n/a".to_owned(), render_points)
    }
}

/// Renders a ratio change as signed percent points to one decimal place,
/// rounding half away from zero. Zero renders without a sign.
pub fn render_points(change: Rational64) -> String {
    let tenths = change * Rational64::from_integer(1000);
    let (p, q) = (tenths.numer().abs(), *tenths.denom());
    let rounded = (2 * p + q) / (2 * q);
    if rounded == 0 {
        return "0.0".to_owned();
    }
    let sign = if change.is_negative() { '-' } else { '+' };
    format!("{sign}{}.{}", rounded / 10, rounded % 10)
}

pub fn trend_delta(series: &TrendSeries) -> Vec<TrendDelta> {
    series
        .points
        .windows(2)
        .map(|pair| TrendDelta {
            period: pair[1].period,
            change: match (pair[0].total, pair[1].total) {
                (Some(before), Some(after)) => Some(after.to_rational() - before.to_rational()),
                _ => None,
            },
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchmarkRow {
    pub org_id: String,
    pub latest_period: Option<Period>,
    pub total: Option<Ratio>,
}

/// Benchmark sort key: total descending by value, organisations without a
/// total last, ties broken by org id ascending.
pub fn benchmark_order(a: &BenchmarkRow, b: &BenchmarkRow) -> Ordering {
    let by_total = match (a.total, b.total) {
        (Some(x), Some(y)) => y.cmp_value(x),
        (Some(_), None) => Ordering::Less,
        (None, Some(_)) => Ordering::Greater,
        (None, None) => Ordering::Equal,
    };
    by_total.then_with(|| a.org_id.cmp(&b.org_id))
}

pub fn rank(mut rows: Vec<BenchmarkRow>) -> Vec<BenchmarkRow> {
    rows.sort_by(benchmark_order);
    rows
}

/// Compares each organisation's latest report. Organisations without data
/// yield rows with no period and no total. Organisations whose latest
/// reports use different checklist ids are not comparable and are refused.
pub fn benchmark(orgs: &[String], snapshot: &StoreSnapshot) -> Result<Vec<BenchmarkRow>> {
    let mut checklist_id: Option<String> = None;
    let mut rows = Vec::with_capacity(orgs.len());
    let mut seen = std::collections::HashSet::new();
    for org in orgs {
        if !seen.insert(org.as_str()) {
            continue;
        }
        let row = match snapshot.latest_report(org)? {
            Some(report) => {
                match &checklist_id {
                    Some(id) if *id != report.checklist_id => return Err(Error::MixedChecklist),
                    Some(_) => {}
                    None => checklist_id = Some(report.checklist_id.clone()),
                }
                BenchmarkRow {
                    org_id: org.clone(),
                    latest_period: Some(report.period),
                    total: report.total,
                }
            }
            None => BenchmarkRow {
                org_id: org.clone(),
                latest_period: None,
                total: None,
            },
        };
        rows.push(row);
    }
    Ok(rank(rows))
}

#[derive(Serialize)]
struct TrendWire<'a> {
    org_id: &'a str,
    checklist_id: Option<&'a str>,
    points: Vec<PointWire<'a>>,
}

#[derive(Serialize)]
struct PointWire<'a> {
    period: Period,
    total: Option<RatioWire>,
    sections: Vec<SectionPointWire<'a>>,
}

#[derive(Serialize)]
struct SectionPointWire<'a> {
    id: &'a str,
    compliant: u32,
    applicable: u32,
    percent: Option<u32>,
}

impl TrendSeries {
    pub fn to_json(&self) -> String {
        let wire = TrendWire {
            org_id: &self.org_id,
            checklist_id: self.checklist_id.as_deref(),
            points: self
                .points
                .iter()
                .map(|p| PointWire {
                    period: p.period,
                    total: p.total.map(RatioWire::from),
                    sections: p
                        .sections
                        .iter()
                        .map(|(id, ratio)| SectionPointWire {
                            id,
                            compliant: ratio.map_or(0, Ratio::numerator),
                            applicable: ratio.map_or(0, Ratio::denominator),
                            percent: ratio.map(Ratio::percent),
                        })
                        .collect(),
                })
                .collect(),
        };
        json::canonical(&wire)
    }
}

#[derive(Serialize)]
struct BenchmarkWire<'a> {
    rows: Vec<RowWire<'a>>,
}

#[derive(Serialize)]
struct RowWire<'a> {
    org_id: &'a str,
    latest_period: Option<Period>,
    total: Option<RatioWire>,
}

pub fn benchmark_json(rows: &[BenchmarkRow]) -> String {
    json::canonical(&BenchmarkWire {
        rows: rows
            .iter()
            .map(|r| RowWire {
                org_id: &r.org_id,
                latest_period: r.latest_period,
                total: r.total.map(RatioWire::from),
            })
            .collect(),
    })
}
