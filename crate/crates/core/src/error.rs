use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = NssError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum NssError {
    #[error("class {class} has no samples")]
    EmptyClass { class: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not symmetric (max asymmetry {max_asymmetry:e})")]
    NotSymmetric { max_asymmetry: f64 },

    #[error("bad dimension: {0}")]
    BadDimension(String),

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("infeasible fold assignment: {0}")]
    InfeasibleFolds(String),

    #[error("pooled covariance is singular or ill-conditioned (condition number {condition:e}); reduce dimension first")]
    SingularCovariance { condition: f64 },

    #[error(
        "could not draw subspaces with pairwise angle >= {min_angle} rad after {attempts} attempts"
    )]
    AngleInfeasible { min_angle: f64, attempts: usize },

    #[error("operation requires an exponential-orthogonal subspace family")]
    WrongMode,

    #[error("family has no closed-form class densities")]
    UnsupportedFamily,

    #[error("invalid distribution parameters: {0}")]
    InvalidSpec(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("ragged rows: line {line} has {found} fields, expected {expected}")]
    RaggedRows {
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("feature indices not strictly ascending at line {line}")]
    NonAscendingIndex { line: usize },

    #[error("malformed model file: {0}")]
    ModelFormat(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Coarse error classes, used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Usage,
    Parse,
    Numeric,
}

impl NssError {
    pub fn class(&self) -> ErrorClass {
        match self {
            NssError::InvalidConfig(_) => ErrorClass::Usage,
            NssError::Parse { .. }
            | NssError::RaggedRows { .. }
            | NssError::NonAscendingIndex { .. }
            | NssError::ModelFormat(_)
            | NssError::Io { .. } => ErrorClass::Parse,
            _ => ErrorClass::Numeric,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        NssError::Io {
            path: path.into(),
            source,
        }
    }
}
