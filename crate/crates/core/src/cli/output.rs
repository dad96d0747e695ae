use std::io::Write;
use std::path::Path;

use serde_json::{json, Map, Value};

use super::args::Format;
use crate::error::Result;
use crate::numerics::{format_ratio, ratio_to_f64, ExactScalar};

/// Bumped whenever a column set or the JSON layout changes.
pub const SCHEMA_VERSION: u32 = 1;

pub fn artifact() -> String {
    format!("polymix {}", env!("CARGO_PKG_VERSION"))
}

/// 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

#[derive(Clone, Debug)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Exact(ExactScalar),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => fmt_f64(*v),
            Cell::Exact(r) => format_ratio(r),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Float(v) if v.is_finite() => json!(v),
            Cell::Float(v) => json!(fmt_f64(*v)),
            Cell::Exact(r) => json!(format_ratio(r)),
            Cell::Text(s) => json!(s),
        }
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<ExactScalar> for Cell {
    fn from(v: ExactScalar) -> Self {
        Cell::Exact(v)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// Column-ordered table with a metadata header block.
#[derive(Clone, Debug)]
pub struct Table {
    pub command: String,
    pub meta: Map<String, Value>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(command: &str, columns: &[&'static str]) -> Self {
        Table { command: command.into(), meta: Map::new(), columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn meta(&mut self, key: &str, value: impl serde::Serialize) {
        self.meta.insert(key.into(), serde_json::to_value(value).expect("serializable"));
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut s = format!("# artifact: {}\n# schema_version: {SCHEMA_VERSION}\n# command: {}\n", artifact(), self.command);
                for (k, v) in &self.meta {
                    let v = match v {
                        Value::String(t) => t.clone(),
                        other => other.to_string(),
                    };
                    s.push_str(&format!("# {k}: {v}\n"));
                }
                s.push_str(&self.columns.join(","));
                s.push('\n');
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(Cell::csv).collect();
                    s.push_str(&cells.join(","));
                    s.push('\n');
                }
                s
            }
            Format::Json => {
                let rows: Vec<Value> = self.rows.iter().map(|r| Value::Array(r.iter().map(Cell::json).collect())).collect();
                let doc = json!({
                    "schema_version": SCHEMA_VERSION,
                    "artifact": artifact(),
                    "command": self.command,
                    "meta": self.meta,
                    "columns": self.columns,
                    "rows": rows,
                });
                let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
                s.push('\n');
                s
            }
        }
    }

    pub fn write(&self, out: Option<&Path>, format: Format) -> Result<()> {
        let text = self.render(format);
        match out {
            Some(path) => std::fs::write(path, text)?,
            None => std::io::stdout().lock().write_all(text.as_bytes())?,
        }
        Ok(())
    }
}

/// Decimal companion of an exact column.
pub fn exact_pair(r: ExactScalar) -> [Cell; 2] {
    let f = ratio_to_f64(&r);
    [Cell::Exact(r), Cell::Float(f)]
}
