//! CSV tables with `#`-prefixed provenance lines.

use std::fmt::Display;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

/// One CSV cell; reals are written with 17 significant digits.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Real(f64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_owned())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Real)
    }
}

/// `d.ddddddddddddddddde±x`: 17 significant digits, round-trips any `f64`.
pub fn format_real(v: f64) -> String {
    format!("{v:.16e}")
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Real(v) => format_real(*v),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

/// A named table: comment lines, a header row and rows of equal arity.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputTable {
    name: String,
    comments: Vec<String>,
    columns: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl OutputTable {
    /// `name` is the file stem used by [`OutputTable::write_into`].
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            comments: Vec::new(),
            columns: columns.iter().map(|c| (*c).to_owned()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    /// Adds a `# key = value` line.
    pub fn comment(&mut self, key: &str, value: impl Display) -> &mut Self {
        self.comments.push(format!("{key} = {value}"));
        self
    }

    pub fn comments(&mut self, lines: &[(String, String)]) -> &mut Self {
        for (k, v) in lines {
            self.comment(k, v);
        }
        self
    }

    /// Panics if the arity differs from the header: tables are built by this crate only.
    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row arity must match the header of table {}",
            self.name
        );
        self.rows.push(row);
    }

    pub fn push_reals(&mut self, row: &[f64]) {
        self.push(row.iter().map(|&v| Cell::Real(v)).collect());
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        for line in &self.comments {
            buf.extend_from_slice(b"# ");
            buf.extend_from_slice(line.as_bytes());
            buf.push(b'\n');
        }
        let mut writer = csv::WriterBuilder::new()
            .delimiter(b',')
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(buf);
        let io_err = "writing CSV to memory cannot fail";
        writer.write_record(&self.columns).expect(io_err);
        for row in &self.rows {
            writer
                .write_record(row.iter().map(Cell::render))
                .expect(io_err);
        }
        writer.into_inner().expect(io_err)
    }

    pub fn path_in(&self, dir: &Path) -> PathBuf {
        dir.join(format!("{}.csv", self.name))
    }

    pub fn write_into(&self, dir: &Path) -> io::Result<PathBuf> {
        let path = self.path_in(dir);
        fs::write(&path, self.to_bytes())?;
        Ok(path)
    }
}

/// Writes every table into `dir` (created if missing). On failure, files
/// already written by this call are removed.
pub fn write_all(tables: &[OutputTable], dir: &Path) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::with_capacity(tables.len());
    for table in tables {
        match table.write_into(dir) {
            Ok(path) => written.push(path),
            Err(e) => {
                for path in &written {
                    let _ = fs::remove_file(path);
                }
                return Err(e);
            }
        }
    }
    Ok(written)
}
