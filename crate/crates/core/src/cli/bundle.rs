//! Report bundles: CSV tables with JSON schema sidecars, plus a JSON
//! manifest carrying the effective config and provenance.

use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use crate::estimators::ConstantsReport;
use crate::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;
const MANIFEST: &str = "bundle.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnKind {
    Int,
    Float,
    Str,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub kind: ColumnKind,
}

/// A cell; `Missing` is written as an empty field (for example the
/// statistics of a failed replicate).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Str(String),
    Missing,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            // Shortest round-trip representation: stable and lossless.
            Cell::Float(x) => x.to_string(),
            Cell::Str(s) => s.clone(),
            Cell::Missing => String::new(),
        }
    }

    fn parse(field: &str, kind: ColumnKind) -> Option<Cell> {
        if field.is_empty() && kind != ColumnKind::Str {
            return Some(Cell::Missing);
        }
        match kind {
            ColumnKind::Int => field.parse().ok().map(Cell::Int),
            ColumnKind::Float => field.parse().ok().map(Cell::Float),
            ColumnKind::Str => Some(Cell::Str(field.to_string())),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(i) => Some(*i as f64),
            Cell::Float(x) => Some(*x),
            _ => None,
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
        Cell::Int(x as i64)
    }
}
impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Str(x.to_string())
    }
}
impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Str(x)
    }
}
impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Str(x.to_string())
    }
}

/// A tidy table: one observation per row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[(&str, ColumnKind)]) -> Self {
        Self {
            name: name.to_string(),
            columns: columns.iter().map(|(n, k)| Column { name: n.to_string(), kind: *k }).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len(), "row width for table {}", self.name);
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    /// Checks cell kinds against the schema.
    pub fn validate(&self) -> Result<()> {
        for (r, row) in self.rows.iter().enumerate() {
            if row.len() != self.columns.len() {
                return Err(Error::Io(format!("table {}: row {r} has {} cells, schema has {}", self.name, row.len(), self.columns.len())));
            }
            for (cell, col) in row.iter().zip(&self.columns) {
                let ok = matches!(
                    (cell, col.kind),
                    (Cell::Missing, ColumnKind::Int | ColumnKind::Float)
                        | (Cell::Int(_), ColumnKind::Int)
                        | (Cell::Float(_), ColumnKind::Float)
                        | (Cell::Str(_), ColumnKind::Str)
                );
                if !ok {
                    return Err(Error::Io(format!("table {}: row {r}, column {} does not match kind {:?}", self.name, col.name, col.kind)));
                }
            }
        }
        Ok(())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(self.columns.iter().map(|c| c.name.as_str())).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).map_err(io)?;
        }
        String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.to_string()))?).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn from_csv(name: &str, columns: Vec<Column>, text: &str) -> Result<Self> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let header: Vec<String> = r.headers().map_err(io)?.iter().map(str::to_string).collect();
        let expected: Vec<&str> = columns.iter().map(|c| c.name.as_str()).collect();
        if header != expected {
            return Err(Error::Io(format!("table {name}: header {header:?} does not match schema {expected:?}")));
        }
        let mut rows = Vec::new();
        for (i, rec) in r.records().enumerate() {
            let rec = rec.map_err(io)?;
            let row = rec
                .iter()
                .zip(&columns)
                .map(|(f, c)| {
                    Cell::parse(f, c.kind)
                        .ok_or_else(|| Error::Io(format!("table {name}: row {i}, column {}: cannot parse {f:?} as {:?}", c.name, c.kind)))
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        let t = Table { name: name.to_string(), columns, rows };
        t.validate()?;
        Ok(t)
    }
}

fn io(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// SHA-256 of the effective config.
    pub config_hash: String,
    pub code_version: String,
    pub started_unix: u64,
    pub finished_unix: u64,
}

impl Provenance {
    pub fn start(config: &RunConfig) -> Self {
        let now = unix_now();
        Self { config_hash: config.hash(), code_version: env!("CARGO_PKG_VERSION").to_string(), started_unix: now, finished_unix: now }
    }
}

fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct TableSchema {
    schema_version: u32,
    table: String,
    columns: Vec<Column>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Manifest {
    schema_version: u32,
    command: String,
    config: RunConfig,
    provenance: Provenance,
    tables: Vec<String>,
    constants: Option<ConstantsReport>,
    notes: Vec<String>,
}

/// Everything a command produced.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportBundle {
    pub command: String,
    pub config: RunConfig,
    pub provenance: Provenance,
    pub tables: Vec<Table>,
    pub constants: Option<ConstantsReport>,
    pub notes: Vec<String>,
}

impl ReportBundle {
    pub fn new(command: &str, config: &RunConfig) -> Self {
        Self {
            command: command.to_string(),
            config: config.clone(),
            provenance: Provenance::start(config),
            tables: Vec::new(),
            constants: None,
            notes: Vec::new(),
        }
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn finish(&mut self) {
        self.provenance.finished_unix = unix_now();
    }

    /// Writes `<name>.csv` and `<name>.schema.json` per table plus the
    /// manifest, validating every table first.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for t in &self.tables {
            t.validate()?;
            std::fs::write(dir.join(format!("{}.csv", t.name)), t.to_csv()?)?;
            let schema = TableSchema { schema_version: SCHEMA_VERSION, table: t.name.clone(), columns: t.columns.clone() };
            std::fs::write(dir.join(format!("{}.schema.json", t.name)), to_json(&schema)?)?;
        }
        let manifest = Manifest {
            schema_version: SCHEMA_VERSION,
            command: self.command.clone(),
            config: self.config.clone(),
            provenance: self.provenance.clone(),
            tables: self.tables.iter().map(|t| t.name.clone()).collect(),
            constants: self.constants.clone(),
            notes: self.notes.clone(),
        };
        std::fs::write(dir.join(MANIFEST), to_json(&manifest)?)?;
        Ok(())
    }

    /// Reads a bundle back, checking schema versions, headers and cell kinds.
    pub fn read(dir: &Path) -> Result<Self> {
        let manifest: Manifest = from_json(&std::fs::read_to_string(dir.join(MANIFEST))?)?;
        if manifest.schema_version != SCHEMA_VERSION {
            return Err(Error::Io(format!("unsupported schema_version {}", manifest.schema_version)));
        }
        let mut tables = Vec::new();
        for name in &manifest.tables {
            let schema: TableSchema = from_json(&std::fs::read_to_string(dir.join(format!("{name}.schema.json")))?)?;
            if schema.schema_version != SCHEMA_VERSION || &schema.table != name {
                return Err(Error::Io(format!("schema sidecar for {name} is inconsistent")));
            }
            let text = std::fs::read_to_string(dir.join(format!("{name}.csv")))?;
            tables.push(Table::from_csv(name, schema.columns, &text)?);
        }
        Ok(Self {
            command: manifest.command,
            config: manifest.config,
            provenance: manifest.provenance,
            tables,
            constants: manifest.constants,
            notes: manifest.notes,
        })
    }
}

fn to_json<T: Serialize>(x: &T) -> Result<String> {
    serde_json::to_string_pretty(x).map_err(|e| Error::Io(e.to_string()))
}

fn from_json<T: for<'de> Deserialize<'de>>(s: &str) -> Result<T> {
    serde_json::from_str(s).map_err(|e| Error::Io(e.to_string()))
}
