//! Readers and writers for hypergraph, graph, partition and run-record files.
//!
//! The byte-level layouts are documented in FORMAT.md at the repository root.

pub mod hmetis;
pub mod metis;
pub mod partition_file;
pub mod records;
pub mod weights;

use thiserror::Error;

pub use hmetis::{read_hypergraph, write_hypergraph};
pub use metis::{read_graph, write_graph};
pub use partition_file::{read_partition, write_partition};
pub use records::{append_run_record, append_run_records, format_g6, read_run_records, RunRecord};
pub use weights::{derive_weights, WeightSpec};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Model(#[from] crate::error::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Invalid(String),
}

pub type FormatResult<T> = std::result::Result<T, FormatError>;

pub(crate) fn parse_error(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Parse {
        line,
        message: message.into(),
    }
}

/// Parses one whitespace-separated integer token.
pub(crate) fn parse_int<T: std::str::FromStr>(token: &str, line: usize, what: &str) -> FormatResult<T> {
    token
        .parse()
        .map_err(|_| parse_error(line, format!("expected {what}, found `{token}`")))
}

/// Weight as an integer for writing, or an error if it has a fraction.
pub(crate) fn integral(w: f64) -> FormatResult<i64> {
    if w.fract() == 0.0 && w.abs() < 9.0e15 {
        Ok(w as i64)
    } else {
        Err(FormatError::Invalid(format!("weight {w} is not an integer")))
    }
}

/// Non-comment lines with their 1-based line numbers.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim_start().starts_with('%'))
}
