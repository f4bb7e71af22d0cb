use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{Map, Value};

use super::config::{ExperimentConfig, ExperimentKind, OutputFormat};
use crate::error::{Error, Result};

pub const ARTIFACT: &str = "rdbench";
pub const REPORT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Significant digits kept for every float written to a report.
pub const FLOAT_DIGITS: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
}

/// A flat table written as CSV next to the JSON report.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Table {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentReport {
    pub kind: ExperimentKind,
    pub config: ExperimentConfig,
    pub status: Status,
    pub payload: Value,
    pub table: Option<Table>,
}

/// Rounds to [`FLOAT_DIGITS`] significant digits.
pub fn round_float(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", FLOAT_DIGITS - 1, x)
        .parse()
        .expect("formatted float parses")
}

fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            *v = serde_json::Number::from_f64(round_float(x)).map_or(Value::Null, Value::Number);
        }
        Value::Array(a) => a.iter_mut().for_each(round_floats),
        Value::Object(o) => o.values_mut().for_each(round_floats),
        _ => {}
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Number(n) if n.is_f64() => round_float(n.as_f64().expect("f64 number")).to_string(),
        other => other.to_string(),
    }
}

impl ExperimentReport {
    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Pass => 0,
            Status::Fail => 2,
        }
    }

    pub fn to_value(&self) -> Value {
        let mut o = Map::new();
        o.insert("artifact".into(), ARTIFACT.into());
        o.insert("version".into(), REPORT_VERSION.into());
        o.insert("kind".into(), self.kind.name().into());
        o.insert(
            "config".into(),
            serde_json::to_value(&self.config).expect("config serializes"),
        );
        o.insert(
            "status".into(),
            serde_json::to_value(self.status).expect("status serializes"),
        );
        o.insert("payload".into(), self.payload.clone());
        let mut v = Value::Object(o);
        round_floats(&mut v);
        v
    }

    /// Pretty JSON with a trailing newline. Two reports built from the same
    /// inputs serialize to the same bytes.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_value()).expect("report serializes");
        s.push('\n');
        s
    }

    /// CSV for the report's table; a header-only file when it has no rows.
    pub fn to_csv(&self) -> Option<String> {
        let t = self.table.as_ref()?;
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&t.header).expect("in-memory write");
        for row in &t.rows {
            w.write_record(row.iter().map(cell)).expect("in-memory write");
        }
        Some(String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8"))
    }
}

/// Writes one report format to `path`.
pub fn emit_report(report: &ExperimentReport, format: OutputFormat, path: &Path) -> Result<()> {
    let text = match format {
        OutputFormat::Json => report.to_json(),
        OutputFormat::Csv => report
            .to_csv()
            .ok_or_else(|| Error::usage(format!("{} reports have no CSV table", report.kind.name())))?,
    };
    fs::write(path, text)?;
    Ok(())
}

/// Writes every configured format into `dir` and returns the paths written.
/// Formats the report has no data for are skipped.
pub fn persist(report: &ExperimentReport, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let stem = report.config.stem();
    let mut written = Vec::new();
    for &f in &report.config.output.formats {
        let path = match f {
            OutputFormat::Json => dir.join(format!("{stem}.json")),
            OutputFormat::Csv if report.table.is_some() => dir.join(format!("{stem}.csv")),
            OutputFormat::Csv => continue,
        };
        emit_report(report, f, &path)?;
        written.push(path);
    }
    Ok(written)
}
