use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the library can report.
///
/// Variants are grouped by the exit code the CLI maps them to; see
/// [`Error::exit_code`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Csv { path: PathBuf, message: String },
    #[error("{path}: missing column `{column}`")]
    MissingColumn { path: PathBuf, column: String },
    #[error("{path}, row {row}: duplicate id `{id}`")]
    DuplicateId { path: PathBuf, row: u64, id: String },
    #[error("{path}, row {row}: empty {field} field")]
    EmptyField {
        path: PathBuf,
        row: u64,
        field: &'static str,
    },
    #[error("{path}, row {row}: unknown label `{label}` (expected AI or HUMAN)")]
    UnknownLabel {
        path: PathBuf,
        row: u64,
        label: String,
    },
    #[error("review `{0}` has no label")]
    Unlabeled(String),
    #[error("id `{id}` missing from {source_name}")]
    MissingId { id: String, source_name: String },
    #[error("id `{id}` in {source_name} does not appear in the gold data")]
    UnexpectedId { id: String, source_name: String },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("training data contains a single class; both classes are required")]
    SingleClass,
    #[error("non-finite feature value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
    #[error("{folds} folds requested but the smallest class has {smallest} samples")]
    TooManyFolds { folds: usize, smallest: usize },
    #[error("bundle format: {0}")]
    Format(String),
    #[error("bundle version {found} is not supported by this build (expects {expected})")]
    Version { found: String, expected: String },
    #[error("bundle checksum mismatch")]
    Checksum,
    #[error("configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 1 usage/config, 2 data, 3 internal.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 1,
            Error::Io { .. }
            | Error::Csv { .. }
            | Error::MissingColumn { .. }
            | Error::DuplicateId { .. }
            | Error::EmptyField { .. }
            | Error::UnknownLabel { .. }
            | Error::Unlabeled(_)
            | Error::MissingId { .. }
            | Error::UnexpectedId { .. }
            | Error::InvalidInput(_)
            | Error::DimensionMismatch { .. }
            | Error::SingleClass
            | Error::NonFinite { .. }
            | Error::TooManyFolds { .. }
            | Error::Format(_)
            | Error::Version { .. }
            | Error::Checksum => 2,
        }
    }
}
