// SPDX-License-Identifier: AGPL-3.0-only

//! Tabular output files.
//!
//! CSV files start with `#` header lines (tool, version, command, config
//! hash, notes), then one header row and the data rows; footer lines are
//! `#`-prefixed as well. JSON files hold the same data in one object whose
//! `records` array mirrors the CSV rows. Both are UTF-8 with LF endings.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use crate::config::OutputFormat;
use crate::error::{Error, Result};

pub const TOOL: &str = "quasigraph";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => format!("{x:e}"),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(i) => json!(i),
            Cell::Float(x) if x.is_finite() => json!(x),
            Cell::Float(x) => json!(x.to_string()),
            Cell::Text(s) => json!(s),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<i64> for Cell {
    fn from(x: i64) -> Self {
        Cell::Int(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: String,
    pub config_hash: String,
    pub notes: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub footer: Vec<(String, Cell)>,
}

impl Report {
    pub fn new(command: &str, config_hash: &str, columns: &[&str]) -> Self {
        Self {
            command: command.to_string(),
            config_hash: config_hash.to_string(),
            notes: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            footer: Vec::new(),
        }
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn push(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::InternalConsistency(format!(
                "row has {} cells, table has {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn footer(&mut self, key: &str, value: impl Into<Cell>) {
        self.footer.push((key.to_string(), value.into()));
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# tool: {TOOL}");
        let _ = writeln!(out, "# version: {VERSION}");
        let _ = writeln!(out, "# command: {}", self.command);
        let _ = writeln!(out, "# config_hash: {}", self.config_hash);
        for n in &self.notes {
            let _ = writeln!(out, "# {}", n.replace('\n', " "));
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(Cell::csv).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        for (k, v) in &self.footer {
            let _ = writeln!(out, "# {k}: {}", v.csv());
        }
        out
    }

    pub fn to_json(&self) -> String {
        let records: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let obj: Map<String, Value> = self.columns.iter().cloned().zip(r.iter().map(Cell::json)).collect();
                Value::Object(obj)
            })
            .collect();
        let footer: Map<String, Value> = self.footer.iter().map(|(k, v)| (k.clone(), v.json())).collect();
        let doc = json!({
            "tool": TOOL,
            "version": VERSION,
            "command": self.command,
            "config_hash": self.config_hash,
            "notes": self.notes,
            "columns": self.columns,
            "records": records,
            "footer": footer,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
        }
    }

    /// Writes `<dir>/<stem>.<ext>`, creating the directory.
    pub fn write(&self, dir: &Path, stem: &str, format: OutputFormat) -> Result<PathBuf> {
        std::fs::create_dir_all(dir)
            .map_err(|e| Error::Config(format!("cannot create {}: {e}", dir.display())))?;
        let path = dir.join(format!("{stem}.{}", format.extension()));
        std::fs::write(&path, self.render(format))
            .map_err(|e| Error::Numerical(format!("cannot write {}: {e}", path.display())))?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::new("spectrum", "abc123", &["m", "lambda", "note"]);
        r.note("window [0, 10]");
        r.push(vec![Cell::from(0i64), Cell::from(2.5), Cell::from("a,b")]).unwrap();
        r.push(vec![Cell::from(-3i64), Cell::from(f64::NAN), Cell::from("plain")]).unwrap();
        r.footer("records", 2usize);
        r
    }

    #[test]
    fn csv_layout() {
        let text = sample().to_csv();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# tool: quasigraph");
        assert!(lines[3].starts_with("# config_hash: abc123"));
        assert_eq!(lines[5], "m,lambda,note");
        assert_eq!(lines[6], "0,2.5e0,\"a,b\"");
        assert_eq!(lines.last().unwrap(), &"# records: 2");
        assert!(!text.contains('\r'));
    }

    #[test]
    fn json_mirrors_rows() {
        let v: Value = serde_json::from_str(&sample().to_json()).unwrap();
        assert_eq!(v["config_hash"], "abc123");
        assert_eq!(v["records"][0]["lambda"], 2.5);
        assert_eq!(v["records"][1]["m"], -3);
        assert_eq!(v["records"][1]["lambda"], "NaN");
        assert_eq!(v["footer"]["records"], 2);
    }

    #[test]
    fn row_width_checked() {
        let mut r = Report::new("x", "h", &["a"]);
        assert!(r.push(vec![]).is_err());
    }
}
