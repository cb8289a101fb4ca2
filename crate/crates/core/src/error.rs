use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("bad magic {found:?}, expected \"CXA1\"")]
    BadMagic { found: [u8; 4] },

    #[error("unknown dtype code {0}")]
    UnknownDtype(u8),

    #[error("truncated file: expected {expected} bytes, found {found}")]
    Truncated { expected: u64, found: u64 },

    #[error("array invariant violated: {0}")]
    Invariant(String),

    #[error("non-finite sample at flat index {index}")]
    NonFinite { index: usize },

    #[error("extent mismatch: {0}")]
    ExtentMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("ACS region not fully sampled: {0}")]
    AcsNotSampled(String),

    #[error("malformed metrics record on line {line}: {message}")]
    MalformedRecord { line: usize, message: String },

    #[error("NaN encountered during {method} iteration {iteration}")]
    NanDuringIteration { method: &'static str, iteration: usize },

    #[error("{method} diverged: residual {residual:.3e} exceeds 10x initial {initial:.3e}")]
    Diverged {
        method: &'static str,
        residual: f64,
        initial: f64,
    },

    #[error("reference has zero data range")]
    UndefinedRange,

    #[error("missing REFERENCE row for group {0}")]
    MissingReference(String),

    #[error("reader {0} has zero standard deviation of difference scores")]
    DegenerateReader(String),

    #[error("empty group: {0}")]
    EmptyGroup(String),

    #[error("rank-deficient design: {0}")]
    RankDeficient(String),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("case {case}")]
    Case {
        case: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn in_case(self, case: impl Into<String>) -> Self {
        Error::Case {
            case: case.into(),
            source: Box::new(self),
        }
    }
}
