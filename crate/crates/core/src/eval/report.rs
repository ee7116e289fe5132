use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use super::{EvalError, EvalRow};

/// Column order of every rendered table.
pub const COLUMNS: [&str; 6] = ["model", "LCS", "Correspond.", "Intermediate.", "Direct.", "FAD"];

const MARKDOWN_HEADER: [&str; 6] = ["Model", "LCS ↑", "Correspond. ↑", "Intermediate. ↑", "Direct. ↑", "FAD ↓"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Markdown,
}

impl FromStr for ReportFormat {
    type Err = EvalError;

    fn from_str(s: &str) -> Result<Self, EvalError> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "markdown" | "md" => Ok(Self::Markdown),
            _ => Err(EvalError::Report(format!("unknown report format '{s}'"))),
        }
    }
}

/// The printed part of an [`EvalRow`]: model name and the five metrics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub model_name: String,
    pub values: [Option<f64>; 5],
}

impl From<&EvalRow> for ReportRow {
    fn from(r: &EvalRow) -> Self {
        Self {
            model_name: r.model_name.clone(),
            values: [r.lcs, Some(r.correspondence), Some(r.intermediateness), Some(r.directionality), r.fad],
        }
    }
}

fn fmt_value(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |v| format!("{v:.3}"))
}

/// Best printed value per column: max for the first four, min for FAD.
/// Compared at print precision so visually tied entries are all marked.
fn best_per_column(rows: &[ReportRow]) -> [Option<String>; 5] {
    std::array::from_fn(|c| {
        let printed = rows.iter().filter_map(|r| r.values[c]).map(|v| (v, fmt_value(Some(v))));
        let best = if c == 4 {
            printed.min_by(|a, b| a.0.total_cmp(&b.0))
        } else {
            printed.max_by(|a, b| a.0.total_cmp(&b.0))
        };
        best.map(|(_, s)| s)
    })
}

pub fn render_report(rows: &[EvalRow], format: ReportFormat) -> Result<String, EvalError> {
    if rows.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    let rows: Vec<ReportRow> = rows.iter().map(ReportRow::from).collect();
    match format {
        ReportFormat::Csv => render_csv(&rows),
        ReportFormat::Markdown => Ok(render_markdown(&rows)),
    }
}

fn render_csv(rows: &[ReportRow]) -> Result<String, EvalError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| EvalError::Report(e.to_string());
    w.write_record(COLUMNS).map_err(err)?;
    for r in rows {
        let mut rec = vec![r.model_name.clone()];
        rec.extend(r.values.iter().map(|&v| fmt_value(v)));
        w.write_record(&rec).map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| EvalError::Report(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| EvalError::Report(e.to_string()))
}

fn render_markdown(rows: &[ReportRow]) -> String {
    // a lone row has nothing to be best against
    let best = if rows.len() > 1 { best_per_column(rows) } else { Default::default() };
    let mut out = String::new();
    let _ = writeln!(out, "| {} |", MARKDOWN_HEADER.join(" | "));
    let _ = writeln!(out, "|---|{}", "---:|".repeat(5));
    for r in rows {
        let cells: Vec<String> = r
            .values
            .iter()
            .zip(&best)
            .map(|(&v, b)| {
                let s = fmt_value(v);
                if v.is_some() && b.as_deref() == Some(s.as_str()) {
                    format!("**{s}**")
                } else {
                    s
                }
            })
            .collect();
        let name = r.model_name.replace('|', "\\|");
        let _ = writeln!(out, "| {name} | {} |", cells.join(" | "));
    }
    out
}

/// Parse CSV produced by [`render_report`] back into rows.
pub fn parse_csv_report(text: &str) -> Result<Vec<ReportRow>, EvalError> {
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let headers = rd.headers().map_err(|e| EvalError::Report(e.to_string()))?;
    if headers.iter().ne(COLUMNS) {
        return Err(EvalError::Report(format!("unexpected header {:?}", headers.iter().collect::<Vec<_>>())));
    }
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec.map_err(|e| EvalError::Report(e.to_string()))?;
        let mut values = [None; 5];
        for (slot, field) in values.iter_mut().zip(rec.iter().skip(1)) {
            if field != "-" {
                let v = field.parse().map_err(|_| EvalError::Report(format!("bad number '{field}'")))?;
                *slot = Some(v);
            }
        }
        rows.push(ReportRow { model_name: rec[0].to_string(), values });
    }
    Ok(rows)
}
