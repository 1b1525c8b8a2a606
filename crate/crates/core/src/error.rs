use std::path::PathBuf;

use thiserror::Error;

/// Broad failure category, used by the CLI to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Data,
    Numeric,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error in {path}: {message}")]
    Csv { path: PathBuf, message: String },
    #[error("row {row}: expected {expected} fields, found {found}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("duplicate column name `{0}`")]
    DuplicateColumn(String),
    #[error("unknown column `{0}`")]
    UnknownColumn(String),
    #[error("column `{column}` has {found} entries, table has {expected} rows")]
    LengthMismatch {
        column: String,
        expected: usize,
        found: usize,
    },
    #[error("column `{column}` must be {expected}")]
    WrongKind {
        column: String,
        expected: &'static str,
    },
    #[error("column `{column}`: value `{value}` has no mapping")]
    UnmappedValue { column: String, value: String },
    #[error("row {row}: DEATH_5=1 with DEATH_10=0 is impossible (dead at 5 years cannot be alive at 10)")]
    ImpossibleMortality { row: usize },
    #[error("row {row}: column `{column}` holds `{value}`, expected a binary 0/1 value")]
    NotBinary {
        row: usize,
        column: String,
        value: String,
    },
    #[error("column `{column}`: value {value} lies outside the bin edges")]
    OutOfRange { column: String, value: f64 },
    #[error("invalid binning spec for `{variable}`: {reason}")]
    InvalidBinning { variable: String, reason: String },
    #[error("dummy `{0}` does not exist after encoding")]
    UnknownDummy(String),
    #[error("column `{column}`: unknown target label `{label}`")]
    UnknownLabel { column: String, label: String },
    #[error("column `{0}` is already label-encoded")]
    AlreadyEncoded(String),
    #[error("contingency table has a zero {axis} marginal at `{label}`")]
    DegenerateMargin { axis: &'static str, label: String },
    #[error("contingency table must be at least 2x2, got {rows}x{cols}")]
    TooSmall { rows: usize, cols: usize },
    #[error("histogram is empty or all zero")]
    EmptyHistogram,
    #[error("length mismatch: {left} vs {right}")]
    Mismatch { left: usize, right: usize },
    #[error("{what} out of range: {detail}")]
    OutOfBounds { what: &'static str, detail: String },
    #[error("class {class} has {count} members, need at least {needed}")]
    ClassTooSmall {
        class: usize,
        count: usize,
        needed: usize,
    },
    #[error("need at least two classes")]
    SingleClass,
    #[error("class {0} is absent from the training labels")]
    AbsentClass(usize),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("fit failed for params {params}: {source}")]
    GridPoint {
        params: String,
        #[source]
        source: Box<Error>,
    },
    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Config(_)
            | Error::Json(_)
            | Error::InvalidBinning { .. }
            | Error::UnknownDummy(_)
            | Error::OutOfBounds { .. } => ErrorKind::Config,
            Error::NonFinite(_) => ErrorKind::Numeric,
            Error::GridPoint { source, .. } | Error::Stage { source, .. } => source.kind(),
            _ => ErrorKind::Data,
        }
    }

    /// Wraps `self` with the name of the pipeline stage that failed.
    pub fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
