//! Schema-versioned CSV and JSON output.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use ahcenter::minkowski::{embed, HyperbolicPoint};
use serde::Serialize;

use crate::config::Format;
use crate::error::CliError;

pub const SCHEMA_VERSION: &str = "1.0";

/// A point of `Hⁿ` in polar form with its Minkowski embedding.
#[derive(Clone, Debug, Serialize)]
pub struct PointRecord {
    pub r: f64,
    pub dir: Vec<f64>,
    pub embedding: Vec<f64>,
}

impl From<&HyperbolicPoint<f64>> for PointRecord {
    fn from(p: &HyperbolicPoint<f64>) -> Self {
        Self { r: p.r, dir: p.dir.as_slice().to_vec(), embedding: embed(p).as_slice().to_vec() }
    }
}

#[derive(Clone)]
pub struct Output {
    dir: PathBuf,
    formats: Vec<Format>,
}

impl Output {
    pub fn new(dir: &Path, formats: &[Format]) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Self { dir: dir.to_path_buf(), formats: formats.to_vec() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn json<T: Serialize>(&self, name: &str, value: &T) -> Result<(), CliError> {
        if !self.formats.contains(&Format::Json) {
            return Ok(());
        }
        let path = self.dir.join(format!("{name}.json"));
        let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::io(&path, e))?;
        text.push('\n');
        fs::write(&path, text).map_err(|e| CliError::io(&path, e))
    }

    /// Writes a CSV table after a `#` schema line; missing values are left empty.
    pub fn csv(&self, name: &str, header: &[String], rows: &[Vec<Cell>]) -> Result<(), CliError> {
        if !self.formats.contains(&Format::Csv) {
            return Ok(());
        }
        let path = self.dir.join(format!("{name}.csv"));
        let mut file = fs::File::create(&path).map_err(|e| CliError::io(&path, e))?;
        writeln!(file, "# schema_version={SCHEMA_VERSION}").map_err(|e| CliError::io(&path, e))?;
        let mut w = csv::Writer::from_writer(file);
        w.write_record(header).map_err(|e| CliError::io(&path, e))?;
        for row in rows {
            w.write_record(row.iter().map(Cell::render)).map_err(|e| CliError::io(&path, e))?;
        }
        w.flush().map_err(|e| CliError::io(&path, e))
    }
}

pub enum Cell {
    Num(f64),
    Int(usize),
    Text(String),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Self::Num(x) => format!("{x:e}"),
            Self::Int(i) => i.to_string(),
            Self::Text(s) => s.clone(),
            Self::Empty => String::new(),
        }
    }

    pub fn opt(x: Option<f64>) -> Self {
        x.map_or(Self::Empty, Self::Num)
    }

    pub fn text(s: impl ToString) -> Self {
        Self::Text(s.to_string())
    }
}

pub fn header(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}
