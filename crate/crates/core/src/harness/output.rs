use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::OutputFormat;
use crate::error::{Error, Result};

/// A numeric table written as CSV or as a JSON array of row objects.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Table {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write!(out, "{v}").expect("writing to a string");
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<serde_json::Map<String, serde_json::Value>> = self
            .rows
            .iter()
            .map(|row| {
                self.columns
                    .iter()
                    .zip(row)
                    .map(|(c, &v)| (c.clone(), number(v)))
                    .collect()
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&rows).expect("tables always serialize");
        s.push('\n');
        s
    }
}

/// Integral values stay integers in JSON; non-finite values become null.
fn number(v: f64) -> serde_json::Value {
    if v.fract() == 0.0 && v.abs() < 9.0e15 {
        serde_json::Value::from(v as i64)
    } else {
        serde_json::Number::from_f64(v).map_or(serde_json::Value::Null, serde_json::Value::Number)
    }
}

/// Files written into one output directory, in order of creation.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    written: Vec<PathBuf>,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self> {
        std::fs::create_dir_all(root).map_err(|e| Error::io(root, e))?;
        Ok(OutputDir {
            root: root.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn write_text(&mut self, name: &str, text: &str) -> Result<PathBuf> {
        let path = self.root.join(name);
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        self.written.push(path.clone());
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf> {
        let mut s = serde_json::to_string_pretty(value).expect("reports always serialize");
        s.push('\n');
        self.write_text(name, &s)
    }

    /// Writes `stem.csv` or `stem.json`.
    pub fn write_table(&mut self, stem: &str, table: &Table, format: OutputFormat) -> Result<PathBuf> {
        match format {
            OutputFormat::Csv => self.write_text(&format!("{stem}.csv"), &table.to_csv()),
            OutputFormat::Json => self.write_text(&format!("{stem}.json"), &table.to_json()),
        }
    }

    pub fn into_files(self) -> Vec<PathBuf> {
        self.written
    }
}
