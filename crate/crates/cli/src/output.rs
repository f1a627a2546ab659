//! Tables and their CSV/JSON serialization.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde_json::{Map, Number, Value};

use crate::config::Format;
use crate::error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Text(String),
    Empty,
}

impl Cell {
    /// CSV field text; floats carry 17 significant digits.
    pub fn field(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) if x.is_nan() => "nan".into(),
            Cell::Float(x) if x.is_infinite() => if *x > 0.0 { "inf".into() } else { "-inf".into() },
            Cell::Float(x) => format!("{x:.16e}"),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(i) => Value::from(*i),
            Cell::Float(x) => Number::from_f64(*x).map(Value::Number).unwrap_or(Value::Null),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as u64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(x: Option<T>) -> Self {
        x.map(Into::into).unwrap_or(Cell::Empty)
    }
}

/// One point of tidy plot data.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotPoint {
    pub series: String,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Describes the computation behind the rows, written in the CSV header.
    pub method_tag: String,
    pub plot: Vec<PlotPoint>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>, method_tag: impl Into<String>) -> Self {
        Self { columns, rows: Vec::new(), method_tag: method_tag.into(), plot: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self, config_hash: &str) -> String {
        let mut out = header_comment(config_hash, &self.method_tag);
        out.push_str(&csv_records(&self.columns, &self.rows));
        out
    }

    pub fn to_json(&self) -> String {
        let records: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = Map::new();
                for (name, cell) in self.columns.iter().zip(row) {
                    obj.insert((*name).to_string(), cell.json());
                }
                Value::Object(obj)
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&Value::Array(records)).expect("JSON serializes");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format, config_hash: &str) -> String {
        match format {
            Format::Csv => self.to_csv(config_hash),
            Format::Json => self.to_json(),
        }
    }

    pub fn plot_csv(&self, config_hash: &str) -> String {
        let rows: Vec<Vec<Cell>> = self
            .plot
            .iter()
            .map(|p| vec![p.series.clone().into(), p.x.into(), p.y.into()])
            .collect();
        let mut out = header_comment(config_hash, &self.method_tag);
        out.push_str(&csv_records(&["series", "x", "y"], &rows));
        out
    }
}

/// Header line plus rows, quoted as needed.
pub fn csv_records(columns: &[&str], rows: &[Vec<Cell>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(columns).expect("in-memory write");
    for row in rows {
        w.write_record(row.iter().map(Cell::field)).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("fields are UTF-8")
}

pub fn header_comment(config_hash: &str, method_tag: &str) -> String {
    format!("# lr-horizon {VERSION} config={config_hash} method={method_tag}\n")
}

/// Write to `path`, or stdout when absent.
pub fn emit(path: Option<&Path>, content: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, content).map_err(|e| CliError::Input(format!("cannot write {}: {e}", p.display()))),
        None => io::stdout()
            .lock()
            .write_all(content.as_bytes())
            .map_err(|e| CliError::Input(format!("cannot write to stdout: {e}"))),
    }
}

/// Header and rows of a previously written table; `#` comment lines are skipped.
pub fn read_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<String>>), CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let bad = |e: csv::Error| CliError::Input(format!("malformed table: {e}"));
    let header: Vec<String> = reader.headers().map_err(bad)?.iter().map(String::from).collect();
    if header.iter().all(|h| h.is_empty()) {
        return Err(CliError::Input("input table is empty".into()));
    }
    let rows = reader
        .records()
        .map(|r| r.map(|rec| rec.iter().map(String::from).collect()).map_err(bad))
        .collect::<Result<_, _>>()?;
    Ok((header, rows))
}
