//! In-memory table of named, finite, real-valued columns.

use std::collections::HashSet;
use std::io::{Read, Write};
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("duplicate column `{0}`")]
    DuplicateColumn(String),
    #[error("column `{name}` has {got} rows, expected {expected}")]
    RaggedColumn { name: String, got: usize, expected: usize },
    #[error("column `{column}` row {row}: value {value} is not finite")]
    NonFinite { column: String, row: usize, value: f64 },
    #[error("unknown column `{0}`")]
    UnknownColumn(String),
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("table has no rows")]
    Empty,
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Column-major table. All columns share one length; every value is finite;
/// column names are unique.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DataTable {
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
    rows: usize,
}

impl DataTable {
    pub fn new(columns: Vec<(String, Vec<f64>)>) -> Result<Self, DataError> {
        let mut t = DataTable::default();
        for (name, values) in columns {
            t.push_column(name, values)?;
        }
        Ok(t)
    }

    pub fn push_column(&mut self, name: impl Into<String>, values: Vec<f64>) -> Result<(), DataError> {
        let name = name.into();
        if self.names.contains(&name) {
            return Err(DataError::DuplicateColumn(name));
        }
        if !self.names.is_empty() && values.len() != self.rows {
            return Err(DataError::RaggedColumn {
                name,
                got: values.len(),
                expected: self.rows,
            });
        }
        if let Some((row, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(DataError::NonFinite {
                column: name,
                row,
                value,
            });
        }
        self.rows = values.len();
        self.names.push(name);
        self.columns.push(values);
        Ok(())
    }

    /// Replaces the values of an existing column.
    pub fn replace_column(&mut self, name: &str, values: Vec<f64>) -> Result<(), DataError> {
        let i = self.position(name)?;
        if values.len() != self.rows {
            return Err(DataError::RaggedColumn {
                name: name.to_string(),
                got: values.len(),
                expected: self.rows,
            });
        }
        if let Some((row, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(DataError::NonFinite {
                column: name.to_string(),
                row,
                value,
            });
        }
        self.columns[i] = values;
        Ok(())
    }

    pub fn n_rows(&self) -> usize {
        self.rows
    }

    pub fn n_cols(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn has_column(&self, name: &str) -> bool {
        self.names.iter().any(|n| n == name)
    }

    pub fn column(&self, name: &str) -> Result<&[f64], DataError> {
        Ok(&self.columns[self.position(name)?])
    }

    pub fn column_at(&self, i: usize) -> &[f64] {
        &self.columns[i]
    }

    fn position(&self, name: &str) -> Result<usize, DataError> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| DataError::UnknownColumn(name.to_string()))
    }

    /// New table with the given rows, in the order given.
    pub fn select_rows(&self, rows: &[usize]) -> DataTable {
        DataTable {
            names: self.names.clone(),
            columns: self
                .columns
                .iter()
                .map(|c| rows.iter().map(|&r| c[r]).collect())
                .collect(),
            rows: rows.len(),
        }
    }

    /// New table restricted to `names`, in that order.
    pub fn select_columns<S: AsRef<str>>(&self, names: &[S]) -> Result<DataTable, DataError> {
        let mut t = DataTable::default();
        for n in names {
            t.push_column(n.as_ref(), self.column(n.as_ref())?.to_vec())?;
        }
        if names.is_empty() {
            t.rows = 0;
        }
        Ok(t)
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self, DataError> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(reader);
        let headers: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        let mut seen = HashSet::new();
        for h in &headers {
            if !seen.insert(h.as_str()) {
                return Err(DataError::DuplicateColumn(h.clone()));
            }
        }
        let mut cols: Vec<Vec<f64>> = vec![Vec::new(); headers.len()];
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let line = rec.position().map_or(i + 2, |p| p.line() as usize);
            if rec.len() != headers.len() {
                return Err(DataError::Malformed {
                    line,
                    message: format!("expected {} fields, found {}", headers.len(), rec.len()),
                });
            }
            for (j, field) in rec.iter().enumerate() {
                let v: f64 = field.parse().map_err(|_| DataError::Malformed {
                    line,
                    message: format!("`{field}` in column `{}` is not a number", headers[j]),
                })?;
                if !v.is_finite() {
                    return Err(DataError::Malformed {
                        line,
                        message: format!("non-finite value in column `{}`", headers[j]),
                    });
                }
                cols[j].push(v);
            }
        }
        DataTable::new(headers.into_iter().zip(cols).collect())
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self, DataError> {
        Self::read_csv(std::fs::File::open(path)?)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), DataError> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(&self.names)?;
        for r in 0..self.rows {
            w.write_record(self.columns.iter().map(|c| c[r].to_string()))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("csv output is UTF-8")
    }
}
