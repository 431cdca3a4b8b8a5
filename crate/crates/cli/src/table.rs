//! Rectangular numeric tables and their CSV form.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: &'static str,
    pub unit: &'static str,
}

pub const fn col(name: &'static str, unit: &'static str) -> Column {
    Column { name, unit }
}

pub const TIME: &str = "1/omega0";
pub const ENERGY: &str = "hbar*omega0";
pub const INV_ENERGY: &str = "1/(hbar*omega0)";
pub const ENTROPY: &str = "k_B";
pub const HEAT_CAPACITY: &str = "k_B";
pub const NONE: &str = "1";

#[derive(Debug, Clone, PartialEq)]
pub struct OutputTable {
    /// File stem of the CSV.
    pub name: String,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<f64>>,
}

impl OutputTable {
    pub fn new(name: impl Into<String>, columns: Vec<Column>) -> Self {
        Self { name: name.into(), columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        self.rows.push(row);
    }

    /// Checks that the table is rectangular and every value is finite.
    pub fn validate(&self) -> Result<()> {
        let err = |reason: String| Err(CliError::Table { table: self.name.clone(), reason });
        if self.columns.is_empty() {
            return err("no columns".into());
        }
        for (k, row) in self.rows.iter().enumerate() {
            if row.len() != self.columns.len() {
                return err(format!("row {k} has {} values for {} columns", row.len(), self.columns.len()));
            }
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return err(format!("row {k}, column {} is not finite ({})", self.columns[j].name, row[j]));
            }
        }
        Ok(())
    }

    pub fn file_name(&self) -> String {
        format!("{}.csv", self.name)
    }

    /// Unit line, header and rows with 17 significant digits.
    pub fn write_csv(&self, dir: &Path) -> Result<PathBuf> {
        self.validate()?;
        let path = dir.join(self.file_name());
        let io_err = |source| CliError::Io { path: path.clone(), source };
        let mut out = BufWriter::new(File::create(&path).map_err(io_err)?);
        let units: Vec<String> = self.columns.iter().map(|c| format!("{} [{}]", c.name, c.unit)).collect();
        writeln!(out, "# {}", units.join(", ")).map_err(io_err)?;
        let mut w = csv::Writer::from_writer(out);
        let csv_err = |source| CliError::Csv { path: path.clone(), source };
        w.write_record(self.columns.iter().map(|c| c.name)).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| format!("{v:.16e}"))).map_err(csv_err)?;
        }
        w.flush().map_err(io_err)?;
        Ok(path)
    }
}

/// Parses a CSV written by [`OutputTable::write_csv`] back into its header
/// and rows.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let csv_err = |source| CliError::Csv { path: path.into(), source };
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(path).map_err(csv_err)?;
    let header = r.headers().map_err(csv_err)?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let row = rec
            .iter()
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|e| CliError::Table { table: path.display().to_string(), reason: format!("{s:?}: {e}") })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}
