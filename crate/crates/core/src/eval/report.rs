//! Table rendering: one row per morbidity, one column per representation,
//! mean F1 scaled by 100, then an `Average` row.

use std::fmt::Write;

use super::experiment::ExperimentReport;
use crate::corpus::MORBIDITIES;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Markdown,
    Csv,
}

fn cell_text(value: Option<f64>) -> String {
    value.map_or_else(|| "n/a".to_string(), |v| format!("{:.2}", v * 100.0))
}

/// Morbidities in the standard reporting order, followed by any others in
/// the order they were evaluated.
fn row_order(report: &ExperimentReport) -> Vec<String> {
    let mut rows: Vec<String> = MORBIDITIES
        .iter()
        .filter(|m| report.morbidities.iter().any(|r| r == *m))
        .map(|m| m.to_string())
        .collect();
    for m in &report.morbidities {
        if !rows.contains(m) {
            rows.push(m.clone());
        }
    }
    rows
}

fn table(report: &ExperimentReport) -> (Vec<String>, Vec<Vec<String>>) {
    let mut header = vec!["Morbidity".to_string()];
    header.extend(report.representations.iter().cloned());
    let mut body = Vec::new();
    for m in row_order(report) {
        let mut row = vec![m.clone()];
        for rep in &report.representations {
            row.push(cell_text(report.cell(&m, rep).and_then(|c| c.mean())));
        }
        body.push(row);
    }
    let mut avg = vec!["Average".to_string()];
    for rep in &report.representations {
        avg.push(cell_text(report.average(rep)));
    }
    body.push(avg);
    (header, body)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn render_report(report: &ExperimentReport, format: ReportFormat) -> String {
    let (header, body) = table(report);
    let mut out = String::new();
    match format {
        ReportFormat::Csv => {
            for row in std::iter::once(&header).chain(&body) {
                let fields: Vec<String> = row.iter().map(|s| csv_field(s)).collect();
                writeln!(out, "{}", fields.join(",")).unwrap();
            }
        }
        ReportFormat::Markdown => {
            let widths: Vec<usize> = (0..header.len())
                .map(|c| {
                    std::iter::once(&header)
                        .chain(&body)
                        .map(|r| r[c].chars().count())
                        .max()
                        .unwrap_or(0)
                })
                .collect();
            let line = |row: &[String]| -> String {
                let cells: Vec<String> = row
                    .iter()
                    .enumerate()
                    .map(|(c, s)| {
                        if c == 0 {
                            format!("{s:<w$}", w = widths[c])
                        } else {
                            format!("{s:>w$}", w = widths[c])
                        }
                    })
                    .collect();
                format!("| {} |", cells.join(" | "))
            };
            writeln!(out, "{}", line(&header)).unwrap();
            let rule: Vec<String> = widths
                .iter()
                .enumerate()
                .map(|(c, &w)| {
                    if c == 0 {
                        "-".repeat(w)
                    } else {
                        format!("{}:", "-".repeat(w.saturating_sub(1)))
                    }
                })
                .collect();
            writeln!(out, "| {} |", rule.join(" | ")).unwrap();
            for row in &body {
                writeln!(out, "{}", line(row)).unwrap();
            }
        }
    }
    out
}
