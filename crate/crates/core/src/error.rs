//! Error type shared by every module, with machine-readable codes and an
//! error-family classification that front ends map to process exit codes.

use std::path::PathBuf;

use thiserror::Error;

/// Convenient result alias used throughout the crate.
pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse classification of an error, used by the CLI to choose exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorFamily {
    /// Invalid configuration or invalid combination of options.
    Config,
    /// Input data fails structural or content validation.
    Data,
    /// A numeric procedure cannot proceed (singular matrix, zero spread).
    Numeric,
    /// The filesystem said no.
    Io,
}

/// All failure modes of the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A file could not be read or written.
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    /// CSV framing problems: ragged rows, invalid UTF-8, and friends.
    #[error("malformed CSV: {message}")]
    MalformedCsv { message: String },

    /// A JSON document failed to parse or deserialize.
    #[error("malformed JSON: {message}")]
    MalformedJson { message: String },

    /// Wraps any error with the file it originated from.
    #[error("{path}: {source}")]
    InFile {
        path: PathBuf,
        #[source]
        source: Box<Error>,
    },

    /// The factor hierarchy violates its structural invariants.
    #[error("invalid hierarchy: {message}")]
    InvalidHierarchy { message: String },

    /// A column required by the hierarchy, or the label column, is absent.
    #[error("missing column `{column}`")]
    MissingColumn { column: String },

    /// A data cell is empty or does not parse as a finite number.
    #[error("row {row}, column `{column}`: `{value}` is not a finite number")]
    NonNumericCell {
        row: usize,
        column: String,
        value: String,
    },

    /// Two rows carry the same alternative id.
    #[error("row {row}: duplicate alternative id `{id}`")]
    DuplicateAlternative { row: usize, id: String },

    /// The CSV header names a column the hierarchy does not declare.
    #[error("unknown column `{column}`: not an id, label, or hierarchy column")]
    UnknownColumn { column: String },

    /// The data file contains a header but no rows.
    #[error("dataset has no rows")]
    EmptyDataset,

    /// A matrix violates its shape or content invariants.
    #[error("matrix `{main_factor_id}`: {message}")]
    InvalidMatrix {
        main_factor_id: String,
        message: String,
    },

    /// No main factor with this id exists in the hierarchy.
    #[error("unknown main factor `{id}`")]
    UnknownMainFactor { id: String },

    /// The main factor is passthrough and has no sub-factor matrix to slice.
    #[error("main factor `{id}` is passthrough; it has no sub-factor matrix")]
    PassthroughSlice { id: String },

    /// A column is constant, so min-max normalization would divide by zero.
    #[error("column `{column}` is constant (min = max); it cannot be min-max normalized")]
    ConstantColumn { column: String },

    /// The grey threshold lies outside its admissible interval.
    #[error("threshold must lie in (0, 1], got {value}")]
    InvalidThreshold { value: f64 },

    /// An inversion policy name or parameter is invalid.
    #[error("invalid inversion policy: {message}")]
    InvalidPolicy { message: String },

    /// A run configuration file or flag combination is invalid.
    #[error("invalid configuration: {message}")]
    InvalidConfig { message: String },

    /// Defensive check: a correlation degree must be strictly positive.
    #[error("correlation degree for `{column}` is {value}; expected > 0")]
    NonPositiveDegree { column: String, value: f64 },

    /// A weight vector was paired with a matrix for a different main factor.
    #[error("weight vector belongs to `{weights}` but the matrix belongs to `{matrix}`")]
    FactorMismatch { weights: String, matrix: String },

    /// Two related objects disagree about a dimension.
    #[error("{context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: String,
        expected: usize,
        actual: usize,
    },

    /// No weight vector was supplied for a non-passthrough main factor.
    #[error("no weight vector supplied for main factor `{id}`")]
    MissingWeights { id: String },

    /// A passthrough scale factor must be strictly positive.
    #[error("passthrough scale for `{id}` must be > 0, got {value}")]
    InvalidScale { id: String, value: f64 },

    /// A scale factor was supplied for a factor that has sub-factors.
    #[error("scale supplied for `{id}`, which is not a passthrough factor")]
    ScaleNotPassthrough { id: String },

    /// Too few observations to fit a class model.
    #[error("class `{class}` has {n} observation(s); fitting needs at least 2")]
    TrainTooSmall { class: String, n: usize },

    /// A feature is constant within a class, so standardization is undefined.
    #[error("feature `{feature}` is constant within class `{class}`; standardization is undefined")]
    ZeroStd { class: String, feature: String },

    /// The correlation matrix is numerically singular under the strict policy.
    #[error(
        "correlation matrix for class `{class}` is numerically singular \
         (condition {condition:e} exceeds {limit:e}); use the pseudo-inverse or ridge policy"
    )]
    Singular {
        class: String,
        condition: f64,
        limit: f64,
    },

    /// Class models passed to classification disagree on their feature set.
    #[error("model for class `{class}` was fitted on a different feature set")]
    FeatureSetMismatch { class: String },

    /// A label does not appear among the declared class names.
    #[error("label `{label}` does not appear among the class names")]
    UnknownLabel { label: String },

    /// An imported prediction file covers no row with this id.
    #[error("no prediction found for alternative `{id}`")]
    MissingPrediction { id: String },

    /// Two paired sequences have different lengths.
    #[error("{context}: lengths differ ({left} vs {right})")]
    LengthMismatch {
        context: String,
        left: usize,
        right: usize,
    },

    /// An operation received an empty input it cannot work with.
    #[error("{0}")]
    EmptyInput(String),

    /// Cross-validation needs at least two folds.
    #[error("k_folds must be at least 2, got {value}")]
    InvalidFolds { value: usize },

    /// More folds than rows cannot be populated.
    #[error("k_folds = {k} exceeds the number of rows ({rows})")]
    TooManyFolds { k: usize, rows: usize },

    /// A fold split left a class with no training rows.
    #[error("fold {fold}: class `{class}` has no training rows; use fewer folds")]
    ZeroTrainClass { fold: usize, class: String },

    /// Wraps an error raised while processing one cross-validation fold.
    #[error("fold {fold}: {source}")]
    InFold {
        fold: usize,
        #[source]
        source: Box<Error>,
    },

    /// A predicted-probability row does not form a distribution.
    #[error("row {row}: probabilities sum to {sum}, expected 1 within 1e-9")]
    BadProbabilityRow { row: usize, sum: f64 },

    /// Dataset validation produced error-severity violations.
    #[error("dataset validation failed:\n{report}")]
    ValidationFailed { report: String },
}

impl Error {
    /// Stable machine-readable code identifying the failure mode.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Io { .. } => "IO",
            Error::MalformedCsv { .. } => "MALFORMED_CSV",
            Error::MalformedJson { .. } => "MALFORMED_JSON",
            Error::InFile { source, .. } => source.code(),
            Error::InvalidHierarchy { .. } => "INVALID_HIERARCHY",
            Error::MissingColumn { .. } => "MISSING_COLUMN",
            Error::NonNumericCell { .. } => "NON_NUMERIC_CELL",
            Error::DuplicateAlternative { .. } => "DUPLICATE_ID",
            Error::UnknownColumn { .. } => "UNKNOWN_COLUMN",
            Error::EmptyDataset => "EMPTY_DATASET",
            Error::InvalidMatrix { .. } => "INVALID_MATRIX",
            Error::UnknownMainFactor { .. } => "UNKNOWN_MAIN_FACTOR",
            Error::PassthroughSlice { .. } => "PASSTHROUGH_SLICE",
            Error::ConstantColumn { .. } => "CONSTANT_COLUMN",
            Error::InvalidThreshold { .. } => "INVALID_THRESHOLD",
            Error::InvalidPolicy { .. } => "INVALID_POLICY",
            Error::InvalidConfig { .. } => "INVALID_CONFIG",
            Error::NonPositiveDegree { .. } => "NON_POSITIVE_DEGREE",
            Error::FactorMismatch { .. } => "FACTOR_MISMATCH",
            Error::DimensionMismatch { .. } => "DIMENSION_MISMATCH",
            Error::MissingWeights { .. } => "MISSING_WEIGHTS",
            Error::InvalidScale { .. } => "INVALID_SCALE",
            Error::ScaleNotPassthrough { .. } => "SCALE_NOT_PASSTHROUGH",
            Error::TrainTooSmall { .. } => "CLASS_TOO_SMALL",
            Error::ZeroStd { .. } => "ZERO_STD",
            Error::Singular { .. } => "SINGULAR",
            Error::FeatureSetMismatch { .. } => "FEATURE_SET_MISMATCH",
            Error::UnknownLabel { .. } => "UNKNOWN_LABEL",
            Error::MissingPrediction { .. } => "MISSING_PREDICTION",
            Error::LengthMismatch { .. } => "LENGTH_MISMATCH",
            Error::EmptyInput(_) => "EMPTY_INPUT",
            Error::InvalidFolds { .. } => "INVALID_FOLDS",
            Error::TooManyFolds { .. } => "TOO_MANY_FOLDS",
            Error::ZeroTrainClass { .. } => "ZERO_TRAIN_CLASS",
            Error::InFold { source, .. } => source.code(),
            Error::BadProbabilityRow { .. } => "BAD_PROBABILITY_ROW",
            Error::ValidationFailed { .. } => "VALIDATION_FAILED",
        }
    }

    /// Which family the error belongs to; front ends map this to exit codes.
    pub fn family(&self) -> ErrorFamily {
        match self {
            Error::Io { .. } => ErrorFamily::Io,
            Error::InFile { source, .. } | Error::InFold { source, .. } => source.family(),
            Error::InvalidThreshold { .. }
            | Error::InvalidPolicy { .. }
            | Error::InvalidConfig { .. }
            | Error::InvalidFolds { .. }
            | Error::TooManyFolds { .. }
            | Error::InvalidScale { .. }
            | Error::ScaleNotPassthrough { .. }
            | Error::MissingWeights { .. } => ErrorFamily::Config,
            Error::ZeroStd { .. }
            | Error::Singular { .. }
            | Error::NonPositiveDegree { .. } => ErrorFamily::Numeric,
            _ => ErrorFamily::Data,
        }
    }

    /// Attach the file a nested error came from.
    pub fn in_file(self, path: impl Into<PathBuf>) -> Error {
        Error::InFile {
            path: path.into(),
            source: Box::new(self),
        }
    }

    /// Attach the cross-validation fold a nested error came from.
    pub fn in_fold(self, fold: usize) -> Error {
        Error::InFold {
            fold,
            source: Box::new(self),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes_survive_wrapping() {
        let err = Error::ZeroStd {
            class: "a".into(),
            feature: "f1".into(),
        }
        .in_fold(3)
        .in_file("ranking.csv");
        assert_eq!(err.code(), "ZERO_STD");
        assert_eq!(err.family(), ErrorFamily::Numeric);
        let text = err.to_string();
        assert!(text.contains("ranking.csv"), "missing path: {text}");
        assert!(text.contains("fold 3"), "missing fold: {text}");
    }

    #[test]
    fn families_map_as_documented() {
        assert_eq!(
            Error::InvalidFolds { value: 1 }.family(),
            ErrorFamily::Config
        );
        assert_eq!(Error::EmptyDataset.family(), ErrorFamily::Data);
        assert_eq!(
            Error::Singular {
                class: "a".into(),
                condition: 1e15,
                limit: 1e12
            }
            .family(),
            ErrorFamily::Numeric
        );
        assert_eq!(
            Error::Io {
                path: "x".into(),
                source: std::io::Error::new(std::io::ErrorKind::NotFound, "gone")
            }
            .family(),
            ErrorFamily::Io
        );
    }
}
