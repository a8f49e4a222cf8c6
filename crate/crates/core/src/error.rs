use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },

    #[error("duplicate coefficient at row {row}, column {col}")]
    DuplicateEntry { row: usize, col: usize },

    #[error("duplicate flip index {0}")]
    DuplicateIndex(usize),

    #[error("non-finite value in {0}")]
    NonFiniteValue(&'static str),

    #[error("dimension mismatch: {what} has length {got}, expected {expected}")]
    DimensionMismatch {
        what: &'static str,
        got: usize,
        expected: usize,
    },

    #[error("temperature must be positive and finite, got {0}")]
    NonPositiveTemperature(f64),

    #[error("penalty weight must be positive and finite, got {0}")]
    NonPositivePenalty(f64),

    #[error("penalty exponent must be 1 or 2, got {0}")]
    InvalidExponent(u32),

    #[error("cannot draw {requested} distinct indices from {available} supported atoms")]
    InsufficientSupport { requested: usize, available: usize },

    #[error("invalid ladder range [{lo}, {hi}]")]
    InvalidRange { lo: f64, hi: f64 },

    #[error("ladder needs at least one chain")]
    ZeroChains,

    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),

    #[error("attachment parameter {affinity} invalid for {n} nodes")]
    InvalidAffinity { affinity: usize, n: usize },

    #[error("edge probability {0} outside [0, 1]")]
    InvalidProbability(f64),

    #[error("density {density} yields no covering columns for {n_vars} variables")]
    DensityTooLow { density: f64, n_vars: usize },

    #[error("line {line}: unsupported MPS section {section}")]
    UnsupportedSection { line: usize, section: String },

    #[error("variable {name} is not binary: {reason}")]
    NonBinaryVariable { name: String, reason: String },

    #[error("MPS model has no objective (N) row")]
    MissingObjectiveRow,

    #[error("line {line}, field {field}: {msg}")]
    Parse {
        line: usize,
        field: usize,
        msg: String,
    },

    #[error("schema version {found:?} not supported (expected {expected:?})")]
    SchemaVersionMismatch { found: String, expected: &'static str },

    #[error("invalid document: {0}")]
    Validation(String),

    #[error("relative gap undefined for a zero baseline")]
    ZeroBaseline,

    #[error("brute force limited to {limit} variables, instance has {n}")]
    TooLarge { n: usize, limit: usize },

    #[error("every grid cell was infeasible")]
    AllInfeasible,

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Stream(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Short machine-readable code, stable across releases.
    pub fn code(&self) -> &'static str {
        match self {
            Error::IndexOutOfRange { .. } => "index-out-of-range",
            Error::DuplicateEntry { .. } => "duplicate-entry",
            Error::DuplicateIndex(_) => "duplicate-index",
            Error::NonFiniteValue(_) => "non-finite",
            Error::DimensionMismatch { .. } => "dimension-mismatch",
            Error::NonPositiveTemperature(_) => "non-positive-temperature",
            Error::NonPositivePenalty(_) => "non-positive-penalty",
            Error::InvalidExponent(_) => "invalid-exponent",
            Error::InsufficientSupport { .. } => "insufficient-support",
            Error::InvalidRange { .. } => "invalid-range",
            Error::ZeroChains => "zero-chains",
            Error::ConfigInvalid(_) => "config",
            Error::InvalidAffinity { .. } => "invalid-affinity",
            Error::InvalidProbability(_) => "invalid-probability",
            Error::DensityTooLow { .. } => "density-too-low",
            Error::UnsupportedSection { .. } => "unsupported-section",
            Error::NonBinaryVariable { .. } => "non-binary-variable",
            Error::MissingObjectiveRow => "missing-objective-row",
            Error::Parse { .. } => "parse",
            Error::SchemaVersionMismatch { .. } => "schema-version",
            Error::Validation(_) => "validation",
            Error::ZeroBaseline => "zero-baseline",
            Error::TooLarge { .. } => "too-large",
            Error::AllInfeasible => "all-infeasible",
            Error::Io { .. } | Error::Stream(_) => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }

    /// True for failures caused by reading, writing or parsing files, as
    /// opposed to invalid arguments or configuration.
    pub fn is_io_or_parse(&self) -> bool {
        matches!(
            self,
            Error::Io { .. }
                | Error::Stream(_)
                | Error::Json(_)
                | Error::Csv(_)
                | Error::Parse { .. }
                | Error::UnsupportedSection { .. }
                | Error::NonBinaryVariable { .. }
                | Error::MissingObjectiveRow
                | Error::SchemaVersionMismatch { .. }
                | Error::Validation(_)
        )
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
