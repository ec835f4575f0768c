//! Artifact formats and atomic file writes.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::RunError;
use crate::fock::DensityMatrix;

/// On-disk density matrix: rows of `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub mode_dims: Vec<usize>,
    pub entries: Vec<Vec<[f64; 2]>>,
}

impl From<&DensityMatrix> for MatrixFile {
    fn from(rho: &DensityMatrix) -> Self {
        let m = rho.entries();
        let entries = (0..m.nrows())
            .map(|i| {
                (0..m.ncols())
                    .map(|j| [m[(i, j)].re, m[(i, j)].im])
                    .collect()
            })
            .collect();
        MatrixFile {
            mode_dims: rho.mode_dims().to_vec(),
            entries,
        }
    }
}

impl MatrixFile {
    pub fn to_density_matrix(&self) -> Result<DensityMatrix, RunError> {
        let d = self.entries.len();
        if self.entries.iter().any(|row| row.len() != d) {
            return Err(RunError::Config("density matrix must be square".into()));
        }
        let m = DMatrix::from_fn(d, d, |i, j| {
            let [re, im] = self.entries[i][j];
            Complex64::new(re, im)
        });
        Ok(DensityMatrix::new(m, self.mode_dims.clone())?)
    }

    pub fn read(path: &Path) -> Result<DensityMatrix, RunError> {
        let text = std::fs::read_to_string(path).map_err(|e| RunError::io(path, e))?;
        let file: MatrixFile = serde_json::from_str(&text)
            .map_err(|e| RunError::Config(format!("{}: {e}", path.display())))?;
        file.to_density_matrix()
    }
}

/// Writes `bytes` to a temporary file in the target directory, then renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), RunError> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| RunError::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| RunError::io(path, e))?;
    tmp.as_file()
        .sync_all()
        .map_err(|e| RunError::io(path, e))?;
    tmp.persist(path).map_err(|e| RunError::io(path, e.error))?;
    Ok(())
}

pub fn to_json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("artifact types serialize");
    bytes.push(b'\n');
    bytes
}

/// Output format for tabular artifacts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Int(u64),
    Real(f64),
    Missing,
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Missing, Cell::Real)
    }
}

/// Named columns of numbers, rendered as CSV or as a JSON array of objects.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// CSV with a header row; reals use the shortest round-trip representation.
    pub fn to_csv(&self) -> String {
        let mut text = self.columns.join(",");
        text.push('\n');
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    text.push(',');
                }
                match cell {
                    Cell::Int(v) => write!(text, "{v}").unwrap(),
                    Cell::Real(v) => write!(text, "{v:?}").unwrap(),
                    Cell::Missing => {}
                }
            }
            text.push('\n');
        }
        text
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let obj = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(name, cell)| {
                        let v = match *cell {
                            Cell::Int(v) => serde_json::Value::from(v),
                            Cell::Real(v) => serde_json::Value::from(v),
                            Cell::Missing => serde_json::Value::Null,
                        };
                        (name.to_string(), v)
                    })
                    .collect();
                serde_json::Value::Object(obj)
            })
            .collect();
        serde_json::Value::Array(rows)
    }

    pub fn render(&self, format: Format) -> Vec<u8> {
        match format {
            Format::Csv => self.to_csv().into_bytes(),
            Format::Json => to_json_bytes(&self.to_json()),
        }
    }
}
