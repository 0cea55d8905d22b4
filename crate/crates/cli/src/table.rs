//! Flat CSV tables with a `#` metadata header.

use crate::error::{CliError, CliResult};
use serde_json::Value;
use std::fmt::Write as _;
use std::path::Path;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    F(f64),
    I(u64),
    S(String),
}

impl Cell {
    fn render(&self, out: &mut String) {
        match self {
            // `{:e}` is the shortest representation that round-trips
            Cell::F(v) => write!(out, "{v:e}").unwrap(),
            Cell::I(v) => write!(out, "{v}").unwrap(),
            Cell::S(s) => {
                if s.contains([',', '"', '\n']) {
                    write!(out, "\"{}\"", s.replace('"', "\"\"")).unwrap();
                } else {
                    out.push_str(s);
                }
            }
        }
    }

    /// Sweep parameters: numbers stay numeric, anything else is compact JSON.
    pub fn from_json(v: &Value) -> Cell {
        match v {
            Value::Number(n) => match n.as_u64() {
                Some(u) => Cell::I(u),
                None => Cell::F(n.as_f64().unwrap_or(f64::NAN)),
            },
            Value::String(s) => Cell::S(s.clone()),
            other => Cell::S(other.to_string()),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::F(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::I(v)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    /// (name, unit)
    pub columns: Vec<(String, String)>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<(String, String)>) -> Self {
        Self { columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, meta: &[(String, String)]) -> String {
        let mut out = String::new();
        for (k, v) in meta {
            writeln!(out, "# {k}: {v}").unwrap();
        }
        let units: Vec<String> = self.columns.iter().map(|(n, u)| format!("{n}={u}")).collect();
        writeln!(out, "# units: {}", units.join(" ")).unwrap();
        let names: Vec<&str> = self.columns.iter().map(|(n, _)| n.as_str()).collect();
        writeln!(out, "{}", names.join(",")).unwrap();
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                cell.render(&mut out);
            }
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path, meta: &[(String, String)]) -> CliResult<()> {
        std::fs::write(path, self.render(meta)).map_err(|e| CliError::io(path, e))
    }
}

/// Data lines of a rendered table, without the `#` header.
pub fn data_lines(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}
