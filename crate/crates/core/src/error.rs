use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot open {what} file {path}: {source}")]
    Open {
        what: &'static str,
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("invalid schema: {0}")]
    Schema(String),

    #[error("row {row}, column {column:?}: {message}")]
    Parse {
        row: usize,
        column: String,
        message: String,
    },

    #[error("dataset has zero cases")]
    EmptyDataset,

    #[error("dimension mismatch: expected {expected} rows, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("matrix must be full: empty prediction at row {row}, column {column:?}")]
    IncompleteMatrix { row: usize, column: String },

    #[error("label {label:?} at row {row}, column {column:?} is not a known class")]
    UnknownLabel {
        label: String,
        row: usize,
        column: String,
    },

    #[error("measure requires ground truth labels")]
    MissingGroundTruth,

    #[error("measure requires binary target (found {classes} classes)")]
    BinaryOnly { classes: usize },

    #[error("undefined input: {0}")]
    UndefinedInput(&'static str),

    #[error("measure undefined on subgroup: {0}")]
    UndefinedSubgroup(&'static str),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid description: {0}")]
    Description(String),

    #[error("exhaustive search needs {candidates} candidates, budget is {budget}")]
    OracleTooLarge { candidates: u128, budget: u128 },
}

impl Error {
    /// Process exit code: 2 for usage/configuration problems, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Open { .. }
            | Error::Schema(_)
            | Error::Config(_)
            | Error::Description(_)
            | Error::MissingGroundTruth
            | Error::BinaryOnly { .. }
            | Error::OracleTooLarge { .. } => 2,
            _ => 1,
        }
    }
}
