use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, ClusterError>;

/// Errors produced by loading, clustering and index evaluation.
#[derive(Debug, Error)]
pub enum ClusterError {
    #[error("file not found: {0}")]
    FileNotFound(PathBuf),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error at row {row}, column {column}: {message}")]
    Parse {
        row: usize,
        column: usize,
        message: String,
    },

    #[error("ragged row {row}: expected {expected} fields, found {found}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("empty dataset")]
    EmptyData,

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("cluster {cluster} is empty")]
    EmptyCluster { cluster: usize },

    #[error("cluster {cluster} is a singleton")]
    SingletonCluster { cluster: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// A validity index has a zero denominator or is otherwise undefined
    /// for the given partition.
    #[error("{index} is undefined: {reason}")]
    UndefinedIndex { index: &'static str, reason: String },

    #[error("dataset has no ground-truth labels")]
    LabelsAbsent,

    #[error("histogram totals differ: {real} vs {obtained}")]
    HistogramMismatch { real: usize, obtained: usize },

    #[error("no cluster can be split")]
    NoSplittableCluster,

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl ClusterError {
    pub(crate) fn undefined(index: &'static str, reason: impl Into<String>) -> Self {
        ClusterError::UndefinedIndex {
            index,
            reason: reason.into(),
        }
    }

    pub fn is_undefined_index(&self) -> bool {
        matches!(self, ClusterError::UndefinedIndex { .. })
    }
}
