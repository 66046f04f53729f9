use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Pipeline stage an error originated in. Used for CLI diagnostics and for
/// mapping onto FFI status codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Load,
    Schema,
    Thresholds,
    Config,
    Fit,
    Predict,
    Eval,
    Model,
    Internal,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Load => "load",
            Stage::Schema => "schema",
            Stage::Thresholds => "thresholds",
            Stage::Config => "config",
            Stage::Fit => "fit",
            Stage::Predict => "predict",
            Stage::Eval => "eval",
            Stage::Model => "model",
            Stage::Internal => "internal",
        }
    }
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("missing column {0:?}")]
    MissingColumn(String),
    #[error("duplicate column {0:?}")]
    DuplicateColumn(String),
    #[error("row {row} (line {line}), column {column:?}: {reason}")]
    BadCell {
        row: usize,
        line: usize,
        column: String,
        reason: String,
    },
    #[error("survival time must be strictly positive, got {value} at row {row}")]
    NonPositiveTime { row: usize, value: f64 },
    #[error("dataset is empty: {0}")]
    EmptyData(&'static str),
    #[error("unknown feature {0:?}")]
    UnknownFeature(String),
    #[error("non-finite cutoff for feature {0:?}")]
    NonFiniteCutoff(String),
    #[error("thresholds file line {line}: {reason}")]
    ThresholdSyntax { line: usize, reason: String },
    #[error("{0}")]
    Schema(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("no comparable pairs: the survival objective needs at least one observed event before another subject's time")]
    NoComparablePairs,
    #[error("no candidate cutoffs in the threshold plan; nothing to split on")]
    Unfittable,
    #[error("objective {objective} does not match a {outcome} outcome")]
    ObjectiveMismatch {
        objective: &'static str,
        outcome: &'static str,
    },
    #[error("feature mismatch: {0}")]
    FeatureMismatch(String),
    #[error("{0}")]
    Metric(String),
    #[error("estimator has not been fitted")]
    NotFitted,
    #[error("invalid model file: {0}")]
    Model(String),
    #[error("model serialization failed: {0}")]
    Json(#[from] serde_json::Error),
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub fn stage(&self) -> Stage {
        match self {
            Error::Io { .. }
            | Error::Csv(_)
            | Error::MissingColumn(_)
            | Error::DuplicateColumn(_)
            | Error::BadCell { .. }
            | Error::NonPositiveTime { .. }
            | Error::EmptyData(_) => Stage::Load,
            Error::UnknownFeature(_) | Error::NonFiniteCutoff(_) | Error::ThresholdSyntax { .. } => {
                Stage::Thresholds
            }
            Error::Schema(_) => Stage::Schema,
            Error::InvalidConfig(_) | Error::ObjectiveMismatch { .. } => Stage::Config,
            Error::NoComparablePairs | Error::Unfittable => Stage::Fit,
            Error::FeatureMismatch(_) | Error::NotFitted => Stage::Predict,
            Error::Metric(_) => Stage::Eval,
            Error::Model(_) | Error::Json(_) => Stage::Model,
            Error::Internal(_) => Stage::Internal,
        }
    }

    /// Errors caused by the input or the invocation, as opposed to bugs or
    /// failures of this program.
    pub fn is_user_error(&self) -> bool {
        !matches!(self, Error::Internal(_) | Error::Json(_))
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
