use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse error class, used for CLI exit codes and host-language exception mapping.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Config,
    Data,
    Runtime,
}

impl ErrorClass {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorClass::Config => 1,
            ErrorClass::Data => 2,
            ErrorClass::Runtime => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ErrorClass::Config => "ConfigError",
            ErrorClass::Data => "DataError",
            ErrorClass::Runtime => "RuntimeError",
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("missing required column `{0}`")]
    Schema(String),

    #[error("duplicate sample id `{0}`")]
    DuplicateId(String),

    #[error("sample `{id}` has feature dimension {found}, expected {expected}")]
    InconsistentFeatureDim {
        id: String,
        expected: usize,
        found: usize,
    },

    #[error("manifest contains no samples")]
    EmptyManifest,

    #[error("missing field `{field}` on sample `{id}`")]
    MissingField { field: &'static str, id: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("normalization scale must be positive, got {0}")]
    NonPositiveScale(f64),

    #[error("no active distance term (all weights zero or gated off)")]
    NoActiveTerm,

    #[error("area {area} has {count} samples, need more than K={k}")]
    TooFewSamples { area: i64, count: usize, k: usize },

    #[error("budget {budget} cannot afford any sample (cheapest costs {cheapest})")]
    BudgetTooSmall { budget: f64, cheapest: f64 },

    #[error("unknown sample id `{0}`")]
    UnknownId(String),

    #[error("invalid config `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Runtime(String),
}

impl Error {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Config { .. }
            | Error::NoActiveTerm
            | Error::NonPositiveScale(_)
            | Error::BudgetTooSmall { .. } => ErrorClass::Config,
            Error::Parse { .. }
            | Error::Schema(_)
            | Error::DuplicateId(_)
            | Error::InconsistentFeatureDim { .. }
            | Error::EmptyManifest
            | Error::MissingField { .. }
            | Error::DimensionMismatch { .. }
            | Error::TooFewSamples { .. }
            | Error::UnknownId(_) => ErrorClass::Data,
            Error::Io { .. } | Error::Runtime(_) => ErrorClass::Runtime,
        }
    }

    /// Variant name, stable across releases.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "ParseError",
            Error::Schema(_) => "SchemaError",
            Error::DuplicateId(_) => "DuplicateIdError",
            Error::InconsistentFeatureDim { .. } => "InconsistentFeatureDimError",
            Error::EmptyManifest => "EmptyManifestError",
            Error::MissingField { .. } => "MissingFieldError",
            Error::DimensionMismatch { .. } => "DimensionMismatchError",
            Error::NonPositiveScale(_) => "NonPositiveScaleError",
            Error::NoActiveTerm => "NoActiveTermError",
            Error::TooFewSamples { .. } => "TooFewSamplesError",
            Error::BudgetTooSmall { .. } => "BudgetTooSmallError",
            Error::UnknownId(_) => "UnknownIdError",
            Error::Config { .. } => "ConfigError",
            Error::Io { .. } => "IoError",
            Error::Runtime(_) => "RuntimeError",
        }
    }
}
