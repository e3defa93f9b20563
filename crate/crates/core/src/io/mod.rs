//! Interchange formats.
//!
//! * [`csif`]: binary matrices (16-byte header, little-endian `f64` payload).
//! * [`csv`]: one cell per line, `s,k,re,im` or `s,k,value`, 1-based indices.
//! * [`features`]: raw row-major payload plus a key/value sidecar.
//! * [`report`]: the key/value processing report written by the CLI.
//!
//! Readers reject malformed input; they never repair it.

pub mod csif;
pub mod csv;
pub mod features;
pub mod report;

use num_complex::Complex64;
use thiserror::Error;

use crate::matrix::Grid;

/// A matrix read from or written to a file.
#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    Complex(Grid<Complex64>),
    Real(Grid<f64>),
}

impl Payload {
    pub fn dims(&self) -> (usize, usize) {
        match self {
            Payload::Complex(g) => g.dims(),
            Payload::Real(g) => g.dims(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Payload::Complex(_) => "complex",
            Payload::Real(_) => "real",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FormatError {
    #[error("bad magic at byte 0: expected \"CSIF\", found {found:?}")]
    BadMagic { found: [u8; 4] },

    #[error("unsupported CSIF version {found} at byte 4 (expected 1)")]
    UnsupportedVersion { found: u16 },

    #[error("invalid CSIF flags {flags:#06x} at byte 6: exactly one of bit 0 (complex) and bit 1 (real) must be set")]
    BadFlags { flags: u16 },

    #[error("CSIF header at byte 8 declares an empty {rows}x{cols} matrix")]
    EmptyShape { rows: u32, cols: u32 },

    #[error("truncated input: expected {expected} bytes, found {actual}")]
    Truncated { expected: u64, actual: u64 },

    #[error("trailing data: expected {expected} bytes, found {actual}")]
    TrailingBytes { expected: u64, actual: u64 },

    #[error("expected a {expected} matrix, found a {found} one")]
    PayloadKind {
        expected: &'static str,
        found: &'static str,
    },

    #[error("line {line}: header must be `s,k,re,im` or `s,k,value`, found {found:?}")]
    CsvHeader { line: u64, found: String },

    #[error("line {line}: expected {expected} fields, found {found}")]
    Ragged { line: u64, expected: usize, found: usize },

    #[error("line {line}, column {column}: {value:?} is not a number")]
    NonNumeric {
        line: u64,
        column: usize,
        value: String,
    },

    #[error("line {line}: index {value:?} must be an integer >= 1")]
    BadIndex { line: u64, value: String },

    #[error("line {line}: duplicate cell (s={symbol}, k={subcarrier}), first seen on line {first_line}")]
    Duplicate {
        line: u64,
        symbol: usize,
        subcarrier: usize,
        first_line: u64,
    },

    #[error("missing cell (s={symbol}, k={subcarrier})")]
    Missing { symbol: usize, subcarrier: usize },

    #[error("no data rows")]
    NoData,

    #[error("line {line}: {message}")]
    Malformed { line: u64, message: String },
}
