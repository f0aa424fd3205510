//! Deterministic CSV/JSON export.
//!
//! Every output is a [`Table`] plus a JSON header. In CSV mode the table goes
//! to `<stem>.csv` and the header to `<stem>.json`; in JSON mode both live in
//! `<stem>.json`. Numbers use 17 significant digits and LF line endings.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::Result;
use crate::grid::ComplexField2D;
use crate::states::PositionWavefunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Column-oriented numeric table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Columns `q, re, im`.
    pub fn wavefunction(phi: &PositionWavefunction) -> Self {
        let mut t = Self::new(&["q", "re", "im"]);
        for (q, z) in phi.grid.coords().into_iter().zip(&phi.values) {
            t.push(vec![q, z.re, z.im]);
        }
        t
    }

    /// Row-major triplets `i, j, re, im`.
    pub fn matrix(m: &Array2<Complex64>) -> Self {
        let mut t = Self::new(&["i", "j", "re", "im"]);
        for ((i, j), z) in m.indexed_iter() {
            t.push(vec![i as f64, j as f64, z.re, z.im]);
        }
        t
    }

    /// Columns `q, p, re, im` in row-major order.
    pub fn field(f: &ComplexField2D) -> Self {
        let mut t = Self::new(&["q", "p", "re", "im"]);
        let qs = f.grid.qgrid.coords();
        let ps = f.grid.pgrid.coords();
        for ((i, j), z) in f.values.indexed_iter() {
            t.push(vec![qs[i], ps[j], z.re, z.im]);
        }
        t
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            for (k, x) in row.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{}", format_number(*x));
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!({ "columns": self.columns, "rows": self.rows })
    }
}

/// Writes `table` and `header` under `dir/stem.*`; returns the files written.
pub fn write_output(dir: &Path, stem: &str, header: &Value, table: &Table, format: Format) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let json_path = dir.join(format!("{stem}.json"));
    match format {
        Format::Csv => {
            let csv_path = dir.join(format!("{stem}.csv"));
            fs::write(&csv_path, table.to_csv())?;
            fs::write(&json_path, pretty(header)?)?;
            Ok(vec![csv_path, json_path])
        }
        Format::Json => {
            let doc = json!({ "header": header, "data": table.to_json() });
            fs::write(&json_path, pretty(&doc)?)?;
            Ok(vec![json_path])
        }
    }
}

/// Writes a standalone JSON document.
pub fn write_json(path: &Path, value: &Value) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, pretty(value)?)?;
    Ok(())
}

fn pretty(value: &Value) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Parses a CSV produced by [`Table::to_csv`].
pub fn parse_csv(text: &str) -> Option<Table> {
    let mut lines = text.lines();
    let columns: Vec<String> = lines.next()?.split(',').map(str::to_string).collect();
    let mut rows = Vec::new();
    for line in lines.filter(|l| !l.is_empty()) {
        let row: Option<Vec<f64>> = line.split(',').map(|x| x.parse().ok()).collect();
        rows.push(row?);
    }
    Some(Table { columns, rows })
}
