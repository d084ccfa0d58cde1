use std::path::PathBuf;

/// Errors raised anywhere in the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A coordinate or field value fell outside the allowed interval.
    #[error("value {value} outside domain [{lo}, {hi}]")]
    Domain { value: f64, lo: f64, hi: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("({x}, {y}) is not a Padua point of order {order}")]
    NotPaduaPoint { x: f64, y: f64, order: usize },

    /// Samples do not line up with the expected node set.
    #[error("sample mismatch: {0}")]
    SampleMismatch(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("matrix is rank deficient: {deficient} of {columns} columns are dependent")]
    RankDeficient { deficient: usize, columns: usize },

    #[error("ill-conditioned system: {0}")]
    Conditioning(String),

    #[error("field draw stayed degenerate after {attempts} attempts")]
    DegenerateField { attempts: u32 },

    #[error("{failures} of {trials} trials failed (limit is 10%)")]
    TooManyFailures { failures: usize, trials: usize },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
