//! CSV tables and JSON sidecars.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use crate::error::Result;

#[derive(Debug, Clone)]
pub enum Cell {
    Int(i64),
    Uint(u64),
    Float(f64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    /// Floats use the shortest round-trip form, with an exponent at the
    /// extremes.
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Uint(v) => v.to_string(),
            Cell::Float(v) => format!("{v:?}"),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }
}

macro_rules! cell_from {
    ($($t:ty => $v:ident as $c:ty),*) => {
        $(impl From<$t> for Cell {
            fn from(x: $t) -> Self {
                Cell::$v(x as $c)
            }
        })*
    };
}

cell_from!(i64 => Int as i64, i32 => Int as i64, u64 => Uint as u64, u32 => Uint as u64, usize => Uint as u64, f64 => Float as f64);

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

/// A CSV table with a description for every column.
#[derive(Debug, Clone)]
pub struct Table {
    columns: Vec<(String, String)>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[(&str, &str)]) -> Self {
        Self {
            columns: columns.iter().map(|(n, d)| (n.to_string(), d.to_string())).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_path(path)?;
        w.write_record(self.columns.iter().map(|(n, _)| n))?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn column_docs(&self) -> Value {
        Value::Object(self.columns.iter().map(|(n, d)| (n.clone(), Value::String(d.clone()))).collect())
    }
}

/// Everything a command returns besides its table.
pub struct Outcome {
    pub table: Table,
    pub details: Value,
}

impl Outcome {
    pub fn new(table: Table) -> Self {
        Self { table, details: Value::Null }
    }

    pub fn with_details(mut self, details: Value) -> Self {
        self.details = details;
        self
    }
}

pub struct Paths {
    pub csv: PathBuf,
    pub json: PathBuf,
}

impl Paths {
    pub fn from_prefix(prefix: &Path) -> Self {
        let with = |ext: &str| {
            let mut s = prefix.as_os_str().to_owned();
            s.push(ext);
            PathBuf::from(s)
        };
        Self { csv: with(".csv"), json: with(".json") }
    }

    pub fn ensure_parent(&self) -> Result<()> {
        if let Some(p) = self.csv.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(p)?;
        }
        Ok(())
    }
}

pub fn sidecar(
    command: &str,
    config: &Value,
    runtime: &Map<String, Value>,
    outcome: &Outcome,
    wall_time: f64,
) -> Value {
    json!({
        "tool": "ergolab",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "config": config,
        "runtime": runtime,
        "wall_time_seconds": wall_time,
        "rows": outcome.table.len(),
        "columns": outcome.table.column_docs(),
        "details": outcome.details,
    })
}

pub fn write_json(path: &Path, v: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(v).expect("json values serialize");
    fs::write(path, text + "\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_quoting_and_floats() {
        let dir = tempfile::tempdir().unwrap();
        let mut t = Table::new(&[("label", "text"), ("x", "value")]);
        t.push(vec!["a,b \"q\"".into(), 0.1f64.into()]);
        t.push(vec![Cell::Empty, (1.0f64 / 3.0).into()]);
        let p = dir.path().join("t.csv");
        t.write_csv(&p).unwrap();
        let text = fs::read_to_string(&p).unwrap();
        assert_eq!(text, "label,x\r\n\"a,b \"\"q\"\"\",0.1\r\n,0.3333333333333333\r\n");
    }

    #[test]
    fn prefix_paths() {
        let p = Paths::from_prefix(Path::new("runs/u2.v1"));
        assert_eq!(p.csv, PathBuf::from("runs/u2.v1.csv"));
        assert_eq!(p.json, PathBuf::from("runs/u2.v1.json"));
    }
}
