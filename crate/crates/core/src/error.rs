// SPDX-License-Identifier: MIT OR Apache-2.0

use std::path::PathBuf;

use thiserror::Error;

/// Errors produced across the imputation, corruption, scoring and bench layers.
#[derive(Debug, Error)]
pub enum ImputeError {
    #[error("series is empty")]
    EmptySeries,
    #[error("non-finite value {value} at index {index}")]
    NonFiniteValue { index: usize, value: f64 },
    #[error("every value in the series is missing")]
    AllMissing,
    #[error("window {start}..{end} contains no present values")]
    EmptyWindow { start: usize, end: usize },
    #[error("window {start}..{end} is out of bounds for length {len}")]
    WindowOutOfBounds {
        start: usize,
        end: usize,
        len: usize,
    },
    #[error("spline of order {order} needs at least {needed} present values, found {found}")]
    SplineTooFewPoints {
        order: usize,
        needed: usize,
        found: usize,
    },
    #[error("invalid parameter `{key}` for method {method}: {reason}")]
    InvalidParam {
        method: String,
        key: String,
        reason: String,
    },
    #[error("series already contains {count} missing values")]
    SeriesHasMissing { count: usize },
    #[error("infeasible corruption plan: {0}")]
    InfeasiblePlan(String),
    #[error("invalid plan: {0}")]
    InvalidPlan(String),
    #[error("no evaluated points")]
    NoEvaluatedPoints,
    #[error("zero variance: {0}")]
    ZeroVariance(&'static str),
    #[error("truth index {index} is missing or out of range in the imputed series")]
    UnfilledTruthIndex { index: usize },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("series too short: need at least {needed}, got {got}")]
    TooShort { needed: usize, got: usize },
    #[error("sample set is empty")]
    EmptySample,
    #[error("reference error must be positive, got {0}")]
    ZeroReference(f64),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("file not found: {}", .0.display())]
    FileNotFound(PathBuf),
    #[error("column `{0}` not found")]
    ColumnNotFound(String),
    #[error("parse error at row {row}: `{token}`")]
    ParseError { row: usize, token: String },
    #[error("config error at `{path}`: {reason}")]
    Config { path: String, reason: String },
    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<ImputeError>,
    },
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl ImputeError {
    /// Wraps the error with a location message (which trial, which method...).
    pub fn context(self, context: impl Into<String>) -> Self {
        ImputeError::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// Innermost error, skipping any context layers.
    pub fn root(&self) -> &ImputeError {
        match self {
            ImputeError::Context { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, ImputeError>;
