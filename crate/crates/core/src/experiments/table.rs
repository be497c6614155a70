//! Result tables and their CSV form.
//!
//! Layout: `#`-prefixed preamble (tool version, experiment, config hash,
//! seed, resolved config, notes), one header line, then data rows. The
//! last column of every table is `wall_time_s`; everything before it is a
//! deterministic function of the config.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use super::config::SweepConfig;
use crate::error::Result;

pub const TOOL_VERSION: &str = concat!("holonoise ", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Text(String),
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Cell::Int(i) => Some(i as f64),
            Cell::Real(x) => Some(x),
            Cell::Text(_) => None,
        }
    }

    fn render(&self, out: &mut String) {
        // `{:?}` on f64 is the shortest string that parses back to the same
        // bits, so the CSV carries full precision.
        match self {
            Cell::Int(i) => write!(out, "{i}"),
            Cell::Real(x) => write!(out, "{x:?}"),
            Cell::Text(s) => write!(out, "{s}"),
        }
        .expect("write to string");
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Real(x)
    }
}

impl From<u32> for Cell {
    fn from(x: u32) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x as i64)
    }
}

/// One table row: data cells plus the wall time spent producing them.
#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub cells: Vec<Cell>,
    pub wall_time_s: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    /// Data columns; `wall_time_s` is appended on output.
    pub columns: Vec<&'static str>,
    pub rows: Vec<Row>,
    /// Extra preamble lines, e.g. skipped grid points.
    pub notes: Vec<String>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: Vec<&'static str>) -> Self {
        Self {
            name: name.into(),
            columns,
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Row) {
        debug_assert_eq!(row.cells.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }

    /// Numeric values of column `name`.
    pub fn values(&self, name: &str) -> Vec<f64> {
        let i = self
            .column(name)
            .unwrap_or_else(|| panic!("no column {name}"));
        self.rows
            .iter()
            .map(|r| r.cells[i].as_f64().unwrap_or(f64::NAN))
            .collect()
    }

    /// Data rows as CSV lines without the wall-time column.
    pub fn data_lines(&self) -> Vec<String> {
        self.rows.iter().map(|r| render_cells(&r.cells)).collect()
    }

    pub fn to_csv(&self, cfg: &SweepConfig) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# tool: {TOOL_VERSION}");
        let _ = writeln!(s, "# table: {}", self.name);
        let _ = writeln!(s, "# config_sha256: {}", cfg.hash());
        let _ = writeln!(s, "# seed: {}", cfg.seed);
        for line in cfg.canonical().lines() {
            let _ = writeln!(s, "# config: {line}");
        }
        for note in &self.notes {
            let _ = writeln!(s, "# note: {note}");
        }
        let _ = writeln!(s, "{},wall_time_s", self.columns.join(","));
        for r in &self.rows {
            s.push_str(&render_cells(&r.cells));
            let _ = writeln!(s, ",{:.6}", r.wall_time_s);
        }
        s
    }

    pub fn write_csv(&self, cfg: &SweepConfig, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(self.to_csv(cfg).as_bytes())?;
        Ok(())
    }
}

fn render_cells(cells: &[Cell]) -> String {
    let mut s = String::new();
    for (i, c) in cells.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        c.render(&mut s);
    }
    s
}

/// Drops the preamble and the trailing wall-time column of a CSV produced
/// by [`Table::to_csv`], leaving header and data.
pub fn strip_wall_time(csv: &str) -> Vec<String> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| match l.rfind(',') {
            Some(i) => l[..i].to_string(),
            None => l.to_string(),
        })
        .collect()
}
