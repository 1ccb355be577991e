//! Generators and loaders for the four case-study datasets.

pub mod ldr;
pub mod ohm;
pub mod quantum;
pub mod tides;

use thiserror::Error;

use crate::data::DataError;

#[derive(Debug, Error)]
pub enum PhenomenaError {
    #[error("range for {name} must satisfy {min} <= low <= high, got [{low}, {high}]")]
    BadRange {
        name: &'static str,
        low: f64,
        high: f64,
        min: f64,
    },
    #[error("{file}: line {line}: {message}")]
    Malformed { file: String, line: usize, message: String },
    #[error("{file}: unit mismatch: column `{found}`, expected {expected}")]
    UnitMismatch {
        file: String,
        found: String,
        expected: String,
    },
    #[error("{file}: expected header {expected}, found `{found}`")]
    BadHeader {
        file: String,
        expected: String,
        found: String,
    },
    #[error("{0}: table has no rows")]
    Empty(String),
    #[error("no day of year is present in all three tide files")]
    NoCommonDays,
    #[error("not a density matrix: {0}")]
    InvalidDensity(String),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
