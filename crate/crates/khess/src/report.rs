//! Deterministic report emission: pretty JSON, CSV tables, and sidecar
//! schema files documenting the CSV columns. Identical inputs produce
//! byte-identical files.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::Result;

/// One CSV column with its documentation line for the sidecar schema.
#[derive(Debug, Clone, Serialize)]
pub struct ColumnSpec {
    pub name: String,
    pub description: String,
}

impl ColumnSpec {
    pub fn new(name: &str, description: &str) -> Self {
        ColumnSpec {
            name: name.to_string(),
            description: description.to_string(),
        }
    }
}

/// A CSV table plus its column documentation.
#[derive(Debug, Clone)]
pub struct CsvTable {
    pub columns: Vec<ColumnSpec>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(columns: Vec<ColumnSpec>) -> Self {
        CsvTable {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Shortest round-trip decimal form (deterministic).
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v}")
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    std::fs::write(path, bytes)?;
    Ok(())
}

/// Writes `<stem>.csv` and the sidecar `<stem>.csv.schema.json`.
pub fn write_csv_with_schema(stem: &Path, table: &CsvTable) -> Result<(PathBuf, PathBuf)> {
    let csv_path = stem.with_extension("csv");
    let mut out = Vec::new();
    writeln!(
        out,
        "{}",
        table
            .columns
            .iter()
            .map(|c| c.name.as_str())
            .collect::<Vec<_>>()
            .join(",")
    )?;
    for row in &table.rows {
        writeln!(out, "{}", row.join(","))?;
    }
    std::fs::write(&csv_path, out)?;

    let schema_path = stem.with_extension("csv.schema.json");
    write_json(&schema_path, &table.columns)?;
    Ok((csv_path, schema_path))
}
