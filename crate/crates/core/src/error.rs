use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown symbol {symbol:?} at position {position}")]
    UnknownSymbol { position: usize, symbol: char },

    #[error("max_len must be positive")]
    InvalidMaxLen,

    #[error("invalid vocabulary: {0}")]
    InvalidVocabulary(String),

    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("affinity grid is {rows}x{cols}, expected {drugs}x{proteins} (drugs x proteins)")]
    DimensionMismatch {
        rows: usize,
        cols: usize,
        drugs: usize,
        proteins: usize,
    },

    #[error("empty input")]
    EmptyInput,

    #[error("need at least 6 interactions to build folds, got {0}")]
    TooFewInteractions(usize),

    #[error("fold index {index} out of range for {n} interactions")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("fold index {index} appears more than once")]
    OverlappingFolds { index: usize },

    #[error("folds do not cover {missing} of the interactions")]
    IncompletePartition { missing: usize },

    #[error("convolution output length would be {0}, must be at least 1")]
    DegenerateOutput(i64),

    #[error("token {token} out of range for vocabulary of size {vocab_size}")]
    TokenOutOfRange { token: u8, vocab_size: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("checkpoint format version {found}, expected {expected}")]
    VersionMismatch { found: u32, expected: u32 },

    #[error("configuration mismatch: {0}")]
    ConfigMismatch(String),

    #[error("invalid checkpoint: {0}")]
    InvalidCheckpoint(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("no comparable pairs: all actual values are equal")]
    NoComparablePairs,

    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),

    #[error("input contains non-finite values")]
    NonFiniteInput,

    #[error("non-finite loss at epoch {epoch}, batch {batch}")]
    NonFiniteLoss { epoch: usize, batch: usize },

    #[error("empty {0} split")]
    EmptySplit(&'static str),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error("{}: {source}", path.display())]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// The innermost error once all context wrappers are stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::Context { source, .. } => source.root(),
            other => other,
        }
    }

    pub(crate) fn file(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::File {
            path: path.into(),
            source,
        }
    }
}
