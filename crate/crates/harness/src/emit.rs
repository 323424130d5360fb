//! CSV and JSON output of experiment reports.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use crate::experiment::{ExperimentReport, SessionRecord};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

pub const CSV_COLUMNS: [&str; 9] = [
    "suite",
    "method",
    "a",
    "session",
    "an_cost",
    "al_cost",
    "steps",
    "solver_ms",
    "completed",
];

#[derive(Serialize)]
struct CsvRow<'a> {
    suite: &'a str,
    method: &'a str,
    a: u32,
    session: usize,
    an_cost: usize,
    al_cost: usize,
    steps: usize,
    solver_ms: f64,
    completed: bool,
}

impl<'a> From<&'a SessionRecord> for CsvRow<'a> {
    fn from(r: &'a SessionRecord) -> Self {
        CsvRow {
            suite: &r.suite,
            method: &r.method,
            a: r.a,
            session: r.session,
            an_cost: r.an_cost,
            al_cost: r.al_cost,
            steps: r.steps,
            solver_ms: r.solver_ms,
            completed: r.completed,
        }
    }
}

pub fn csv_string(report: &ExperimentReport) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    w.write_record(CSV_COLUMNS)?;
    for r in &report.rows {
        w.serialize(CsvRow::from(r))?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub fn json_string(report: &ExperimentReport) -> Result<String> {
    Ok(serde_json::to_string_pretty(report)?)
}

pub fn parse_json(text: &str) -> Result<ExperimentReport> {
    Ok(serde_json::from_str(text)?)
}

/// Writes `<dir>/<name>.<ext>` and returns the path.
pub fn emit(report: &ExperimentReport, format: Format, dir: &Path) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let (ext, body) = match format {
        Format::Csv => ("csv", csv_string(report)?),
        Format::Json => ("json", json_string(report)?),
    };
    let path = dir.join(format!("{}.{ext}", report.name));
    std::fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}
