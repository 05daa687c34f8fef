use std::fmt;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} bits, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// Resource guard: the requested register would exceed the configured limit.
    #[error("n = {n} exceeds the register limit of {limit}")]
    RegisterLimit { n: usize, limit: usize },

    #[error("index {index} out of range for a table of {len} entries")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("truth table disagrees with the partial function at index {index}")]
    Inconsistent { index: usize },

    #[error(transparent)]
    Parse(#[from] ParseError),

    /// Argument outside the domain where a formula is defined.
    #[error("domain violation: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Measurement found no probability mass; the state has been corrupted.
    #[error("measurement marginal has zero total probability")]
    DegenerateDistribution,
}

/// A `.bfn` parse failure, located by 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    MissingHeader,
    BadHeader(String),
    MissingTable,
    WrongLength { expected: usize, found: usize },
    IllegalChar(char),
    TrailingContent,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::MissingHeader => write!(f, "missing `n=<decimal>` header"),
            ParseErrorKind::BadHeader(msg) => write!(f, "bad header: {msg}"),
            ParseErrorKind::MissingTable => write!(f, "missing truth-table line"),
            ParseErrorKind::WrongLength { expected, found } => {
                write!(f, "table has length {found}, expected {expected}")
            }
            ParseErrorKind::IllegalChar(c) => {
                write!(f, "illegal character {c:?} (expected '0', '1' or '-')")
            }
            ParseErrorKind::TrailingContent => write!(f, "unexpected content after the table"),
        }
    }
}
