//! Result tables and their CSV / JSON encodings.

use std::io::Write;

use serde_json::{json, Map, Value};

use crate::AppError;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Uint(u64),
    Float(f64),
    Bool(bool),
    Text(String),
}

impl Cell {
    /// Floats use 17 significant digits so they round-trip exactly.
    pub fn to_csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Uint(v) => v.to_string(),
            Cell::Float(v) => format_float(*v),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Uint(v) => json!(v),
            Cell::Float(v) if v.is_finite() => json!(v),
            Cell::Float(_) => Value::Null,
            Cell::Bool(v) => json!(v),
            Cell::Text(s) => json!(s),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Cell::Float(v) => Some(v),
            Cell::Int(v) => Some(v as f64),
            Cell::Uint(v) => Some(v as f64),
            _ => None,
        }
    }
}

pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:.16e}")
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Uint(v as u64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Uint(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResultTable {
    pub experiment: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Resolved configuration, echoed verbatim.
    pub config: Value,
    /// Derived quantities (fits, medians, thresholds) as ordered key/value pairs.
    pub summary: Vec<(String, Value)>,
    pub wall_time_s: f64,
}

impl ResultTable {
    pub fn new(experiment: &str, columns: &[&str], config: Value) -> Self {
        Self {
            experiment: experiment.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            config,
            summary: Vec::new(),
            wall_time_s: 0.0,
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width does not match columns");
        self.rows.push(row);
    }

    pub fn add_summary(&mut self, key: impl Into<String>, value: impl Into<Value>) {
        self.summary.push((key.into(), value.into()));
    }

    pub fn summary_value(&self, key: &str) -> Option<&Value> {
        self.summary.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Values of a numeric column.
    pub fn floats(&self, name: &str) -> Vec<f64> {
        let Some(k) = self.column(name) else {
            return Vec::new();
        };
        self.rows.iter().filter_map(|r| r[k].as_f64()).collect()
    }

    fn meta(&self) -> Value {
        let summary: Map<String, Value> = self.summary.iter().cloned().collect();
        json!({
            "generator": format!("splitstep {}", env!("CARGO_PKG_VERSION")),
            "experiment": self.experiment,
            "config": self.config,
            "summary": summary,
            "wall_time_s": self.wall_time_s,
        })
    }

    /// `#`-prefixed metadata lines followed by a header row and data rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), AppError> {
        let mut out = out;
        writeln!(out, "# generator: splitstep {}", env!("CARGO_PKG_VERSION"))?;
        writeln!(out, "# experiment: {}", self.experiment)?;
        writeln!(out, "# config: {}", self.config)?;
        for (k, v) in &self.summary {
            writeln!(out, "# summary.{k}: {}", summary_text(v))?;
        }
        writeln!(out, "# wall_time_s: {:.3}", self.wall_time_s)?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::to_csv)).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    /// `{meta, columns, rows}`.
    pub fn to_json(&self) -> Value {
        json!({
            "meta": self.meta(),
            "columns": self.columns,
            "rows": self.rows.iter().map(|r| r.iter().map(Cell::to_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> Result<(), AppError> {
        serde_json::to_writer_pretty(&mut out, &self.to_json()).map_err(|e| AppError::Io(e.into()))?;
        writeln!(out)?;
        Ok(())
    }
}

fn summary_text(v: &Value) -> String {
    match v {
        Value::Number(n) => match n.as_f64() {
            Some(f) if n.is_f64() => format_float(f),
            _ => n.to_string(),
        },
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn csv_err(e: csv::Error) -> AppError {
    AppError::Io(std::io::Error::other(e))
}
