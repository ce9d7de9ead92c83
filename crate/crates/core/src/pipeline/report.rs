//! Report rendering: JSON (lossless), CSV (full precision), and aligned text
//! tables with "mean ± std" cells.

use std::fmt::Write as _;

use crate::error::Error;
use crate::Result;

use super::grid::GridResult;
use super::run::{MeanStd, RunResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
    Table,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            "table" => Ok(ReportFormat::Table),
            other => Err(Error::validation(format!("unknown report format: {other}"))),
        }
    }
}

/// Stable column order: utility first, then diversity, then privacy sorted by
/// key (general before sensitive, ascending n within each).
fn column_order(cells: &[(String, RunResult)]) -> Vec<String> {
    let fixed = [
        "gold_f1",
        "synthetic_f1",
        "delta",
        "gold_diversity",
        "synthetic_diversity",
    ];
    let mut columns: Vec<String> = fixed.iter().map(|s| s.to_string()).collect();
    let mut extra: Vec<String> = cells
        .iter()
        .filter_map(|(_, r)| r.aggregates.as_ref())
        .flat_map(|a| a.keys().cloned())
        .filter(|k| !fixed.contains(&k.as_str()))
        .filter(|k| k.contains("recall"))
        .collect();
    extra.sort();
    extra.dedup();
    columns.extend(extra);
    columns
}

fn cell_text(ms: Option<&MeanStd>) -> String {
    match ms {
        Some(ms) => format!("{:.3} ± {:.3}", ms.mean, ms.std),
        None => "—".to_string(),
    }
}

/// One row per grid cell. Partial runs render with empty metric cells rather
/// than misleading means.
pub fn emit_report(grid: &GridResult, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Json => Ok(serde_json::to_string_pretty(grid)? + "\n"),
        ReportFormat::Csv => emit_csv(grid),
        ReportFormat::Table => emit_table(grid),
    }
}

fn emit_csv(grid: &GridResult) -> Result<String> {
    let columns = column_order(&grid.cells);
    let mut out = String::from("cell");
    for column in &columns {
        write!(out, ",{column}_mean,{column}_std").unwrap();
    }
    out.push('\n');
    for (label, run) in &grid.cells {
        write!(out, "{label}").unwrap();
        for column in &columns {
            match run.aggregates.as_ref().and_then(|a| a.get(column)) {
                Some(ms) => write!(out, ",{},{}", ms.mean, ms.std).unwrap(),
                None => out.push_str(",,"),
            }
        }
        out.push('\n');
    }
    Ok(out)
}

fn emit_table(grid: &GridResult) -> Result<String> {
    let columns = column_order(&grid.cells);
    let mut rows: Vec<Vec<String>> = Vec::with_capacity(grid.cells.len() + 1);
    let mut header = vec!["cell".to_string()];
    header.extend(columns.iter().cloned());
    rows.push(header);
    for (label, run) in &grid.cells {
        let mut row = vec![label.clone()];
        for column in &columns {
            row.push(cell_text(run.aggregates.as_ref().and_then(|a| a.get(column))));
        }
        rows.push(row);
    }

    let n_cols = rows[0].len();
    let widths: Vec<usize> = (0..n_cols)
        .map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for (i, row) in rows.iter().enumerate() {
        let line: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(cell, w)| format!("{cell:<width$}", width = w))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
        if i == 0 {
            let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
            out.push_str(&rule.join("  "));
            out.push('\n');
        }
    }
    Ok(out)
}
