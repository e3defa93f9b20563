use thiserror::Error;

use crate::io::FormatError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is {rows}x{cols}; need at least {min_rows} row(s) and {min_cols} column(s)")]
    Shape {
        rows: usize,
        cols: usize,
        min_rows: usize,
        min_cols: usize,
    },

    #[error("expected {expected} values for a {rows}x{cols} matrix, got {found}")]
    ValueCount {
        rows: usize,
        cols: usize,
        expected: usize,
        found: usize,
    },

    /// Coordinates are 0-based (symbol row, subcarrier column).
    #[error("non-finite value at symbol {symbol}, subcarrier {subcarrier}")]
    NonFinite { symbol: usize, subcarrier: usize },

    #[error("negative amplitude at symbol {symbol}, subcarrier {subcarrier}")]
    NegativeAmplitude { symbol: usize, subcarrier: usize },

    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("phase vector is empty")]
    EmptyVector,

    #[error("non-finite phase at index {index}")]
    NonFiniteVector { index: usize },

    #[error("invalid subcarrier map: {0}")]
    SubcarrierMap(String),

    #[error("degenerate subcarrier map: first and last index are both {0}")]
    DegenerateMap(i64),

    #[error("invalid Savitzky-Golay parameters: order {order}, window {window} ({reason})")]
    SgSpec {
        order: usize,
        window: usize,
        reason: &'static str,
    },

    #[error("{what} has length {len}, need at least {needed}")]
    TooShort {
        what: &'static str,
        len: usize,
        needed: usize,
    },

    #[error("{what}: expected length {expected}, found {found}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("unknown method {name:?}; valid methods: {valid}")]
    UnknownMethod { name: String, valid: String },

    #[error("invalid channel: {0}")]
    Channel(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Format(#[from] FormatError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
