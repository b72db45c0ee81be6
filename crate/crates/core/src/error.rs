use std::io;

use thiserror::Error;

/// Errors surfaced by loaders, universe construction and evaluation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("io error: {0}")]
    Io(#[from] io::Error),

    /// A malformed line in a text input (embedding files, word lists).
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Structural problems: bad headers, bad magic, truncation.
    #[error("{0}")]
    Format(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// Two fuzzy embeddings built against different universes.
    #[error("embeddings belong to different universes")]
    UniverseMismatch,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Density clustering found no clusters to build a universe from.
    #[error("degenerate universe: clustering produced no clusters")]
    DegenerateUniverse,

    /// Rank correlation is undefined for constant inputs.
    #[error("constant input: {0}")]
    ConstantInput(String),

    #[error("no valid pairs in {0}")]
    EmptyDataset(String),

    #[error("missing support for task {0}")]
    MissingSupport(String),
}

pub type Result<T> = std::result::Result<T, Error>;
