//! Fixed-width plain-text renderings. Columns are padded to their widest
//! cell; lines end in LF with no trailing spaces.

use compliance_core::scoring::{render_percent, ComplianceReport, Ratio};
use compliance_core::trend::{trend_delta, BenchmarkRow, TrendSeries};

const NOT_ASSESSED: &str = "not assessed";

#[derive(Clone, Copy)]
enum Align {
    Left,
    Right,
}

fn table(header: &[(&str, Align)], rows: &[Vec<String>]) -> String {
    let widths: Vec<usize> = header
        .iter()
        .enumerate()
        .map(|(i, (h, _))| {
            rows.iter()
                .map(|r| r[i].chars().count())
                .chain(std::iter::once(h.chars().count()))
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |cells: Vec<&str>| {
        let mut out = String::new();
        for (i, cell) in cells.iter().enumerate() {
            if i > 0 {
                out.push_str("  ");
            }
            let pad = widths[i] - cell.chars().count();
            match header[i].1 {
                Align::Left => {
                    out.push_str(cell);
                    out.push_str(&" ".repeat(pad));
                }
                Align::Right => {
                    out.push_str(&" ".repeat(pad));
                    out.push_str(cell);
                }
            }
        }
        out.truncate(out.trim_end().len());
        out.push('\n');
        out
    };
    let mut out = line(header.iter().map(|(h, _)| *h).collect());
    for row in rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
    }
    out
}

fn percent(r: Option<Ratio>) -> String {
    r.map_or_else(|| NOT_ASSESSED.to_owned(), render_percent)
}

fn counts(r: Option<Ratio>) -> String {
    r.map_or_else(|| "-".to_owned(), |r| format!("{}/{}", r.numerator(), r.denominator()))
}

/// Total line, section table, findings table.
pub fn report(r: &ComplianceReport) -> String {
    let mut out = format!(
        "Organisation: {}\nPeriod: {}\nChecklist: {}@{}\n\n",
        r.org_id, r.period, r.checklist_id, r.checklist_version
    );
    out.push_str(&format!("Total score: {}", percent(r.total)));
    if let Some(total) = r.total {
        out.push_str(&format!(" ({})", counts(Some(total))));
    }
    out.push_str("\n\n");

    let rows: Vec<Vec<String>> = r
        .sections
        .iter()
        .map(|s| vec![s.title.clone(), s.compliant.to_string(), s.applicable.to_string(), percent(s.ratio)])
        .collect();
    out.push_str(&table(
        &[
            ("Section", Align::Left),
            ("Compliant", Align::Right),
            ("Applicable", Align::Right),
            ("Score", Align::Right),
        ],
        &rows,
    ));

    out.push_str(&format!("\nFindings: {}\n", r.findings.len()));
    if !r.findings.is_empty() {
        let title = |id: &str| {
            r.sections
                .iter()
                .find(|s| s.section_id == id)
                .map_or_else(|| id.to_owned(), |s| s.title.clone())
        };
        let rows: Vec<Vec<String>> = r
            .findings
            .iter()
            .map(|f| {
                vec![
                    title(&f.section_id),
                    f.question_id.clone(),
                    f.question_text.clone(),
                    f.note.clone().unwrap_or_default(),
                ]
            })
            .collect();
        out.push_str(&table(
            &[
                ("Section", Align::Left),
                ("Question", Align::Left),
                ("Text", Align::Left),
                ("Note", Align::Left),
            ],
            &rows,
        ));
    }
    out
}

pub fn trend(series: &TrendSeries) -> String {
    let mut out = format!("Organisation: {}\n", series.org_id);
    if series.points.is_empty() {
        out.push_str("No assessments.\n");
        return out;
    }
    out.push('\n');
    let deltas = trend_delta(series);
    let rows: Vec<Vec<String>> = series
        .points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let change = match i {
                0 => String::new(),
                _ => deltas[i - 1].render(),
            };
            vec![p.period.to_string(), counts(p.total), percent(p.total), change]
        })
        .collect();
    out.push_str(&table(
        &[
            ("Period", Align::Left),
            ("Answers", Align::Right),
            ("Total", Align::Right),
            ("Change", Align::Right),
        ],
        &rows,
    ));
    out
}

pub fn benchmark(rows: &[BenchmarkRow]) -> String {
    let cells: Vec<Vec<String>> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            vec![
                (i + 1).to_string(),
                r.org_id.clone(),
                r.latest_period.map_or_else(|| "-".to_owned(), |p| p.to_string()),
                percent(r.total),
            ]
        })
        .collect();
    table(
        &[
            ("Rank", Align::Right),
            ("Organisation", Align::Left),
            ("Latest", Align::Left),
            ("Total", Align::Right),
        ],
        &cells,
    )
}
