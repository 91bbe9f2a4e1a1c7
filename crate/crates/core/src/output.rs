//! CSV emission and ingestion shared by runs, sweeps and plots.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::RunError;

/// `printf("%.9e")` formatting: `1.825000000e+00`, `nan`, `inf`.
pub fn sci(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{x:.9e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

/// A table of text cells with a header row.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub path: PathBuf,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            path: PathBuf::new(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_numbers(&mut self, row: &[f64]) {
        self.rows.push(row.iter().map(|&x| sci(x)).collect());
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Result<usize, RunError> {
        self.header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| RunError::MissingColumn {
                path: self.path.clone(),
                column: name.to_string(),
            })
    }

    /// Numeric column; unparsable cells become NaN.
    pub fn column(&self, name: &str) -> Result<Vec<f64>, RunError> {
        let i = self.column_index(name)?;
        Ok(self
            .rows
            .iter()
            .map(|r| r.get(i).and_then(|c| c.parse().ok()).unwrap_or(f64::NAN))
            .collect())
    }

    pub fn text_column(&self, name: &str) -> Result<Vec<String>, RunError> {
        let i = self.column_index(name)?;
        Ok(self
            .rows
            .iter()
            .map(|r| r.get(i).cloned().unwrap_or_default())
            .collect())
    }

    /// Comma-separated, LF-terminated text with a header row.
    pub fn to_csv(&self) -> Result<String, RunError> {
        let csv_err = |e: csv::Error| RunError::Csv {
            path: self.path.clone(),
            message: e.to_string(),
        };
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.header).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| RunError::Csv {
            path: self.path.clone(),
            message: e.to_string(),
        })?;
        Ok(String::from_utf8(bytes).expect("cells are UTF-8"))
    }

    pub fn write(&self, path: &Path) -> Result<(), RunError> {
        let text = Table {
            path: path.to_path_buf(),
            ..self.clone()
        }
        .to_csv()?;
        write_text(path, &text)
    }

    pub fn read(path: &Path) -> Result<Self, RunError> {
        let csv_err = |e: csv::Error| RunError::Csv {
            path: path.to_path_buf(),
            message: e.to_string(),
        };
        let mut r = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_path(path)
            .map_err(csv_err)?;
        let header = r.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            rows.push(rec.map_err(csv_err)?.iter().map(str::to_string).collect());
        }
        Ok(Self {
            path: path.to_path_buf(),
            header,
            rows,
        })
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<(), RunError> {
    fs::write(path, text).map_err(|e| RunError::io(path, e))
}

pub fn create_dir(path: &Path) -> Result<(), RunError> {
    fs::create_dir_all(path).map_err(|e| RunError::io(path, e))
}
