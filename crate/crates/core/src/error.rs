use std::io;

use thiserror::Error;

/// Errors produced across the help-query engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty corpus")]
    EmptyCorpus,

    #[error("filter longer than sequence (filter {filter}, sequence {sequence})")]
    FilterTooLong { filter: usize, sequence: usize },

    #[error("pooled sequence is empty: {0}")]
    EmptySequence(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("degenerate labels: training set must contain both classes")]
    DegenerateLabels,

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("missing forward cache: {0}")]
    MissingCache(&'static str),

    #[error("vector not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("format error: {0}")]
    Format(String),

    #[error("lexicon {file} line {line}: {reason}")]
    Lexicon {
        file: String,
        line: usize,
        reason: String,
    },

    #[error("lexicon {file}: {reason}")]
    LexiconEntry { file: String, reason: String },

    #[error("invalid request: {0}")]
    InvalidRequest(String),

    #[error("dataset error: {0}")]
    Dataset(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
