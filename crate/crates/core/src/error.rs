use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("missing column `{0}` in header")]
    MissingColumn(String),

    #[error("row {row}: expected at least {expected} fields, found {found}")]
    ShortRow { row: usize, expected: usize, found: usize },

    #[error("unknown account category `{0}`")]
    UnknownCategory(String),

    #[error("idf undefined for token {token_id}: df={df}, num_docs={num_docs}")]
    UndefinedIdf {
        token_id: usize,
        df: usize,
        num_docs: usize,
    },

    #[error("token id {0} is outside the vocabulary")]
    UnknownToken(usize),

    #[error("empty corpus")]
    EmptyCorpus,

    #[error("document {0} is empty")]
    EmptyDocument(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("linear solve failed: {0}")]
    Solver(String),

    #[error("training set needs both classes")]
    SingleClass,

    #[error("operation requires a Bernoulli naive Bayes classifier, got {0}")]
    NotBernoulliNb(&'static str),

    #[error("unsupported model file version {0}")]
    Version(u32),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
