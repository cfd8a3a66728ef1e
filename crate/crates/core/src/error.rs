use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TwcError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported dimension d={0} (only d=1 and d=2 are supported{1})")]
    UnsupportedDimension(usize, &'static str),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("insufficient resolution: {reason}; need at least {required} points")]
    Resolution { reason: String, required: usize },

    /// Mass of a sampled function near the box boundary, or outside the
    /// represented index set, exceeds the admissible threshold.
    #[error("truncation: {what} (fraction {fraction:.3e} exceeds {threshold:.1e})")]
    Truncation {
        what: String,
        fraction: f64,
        threshold: f64,
    },

    #[error("range error: {0}")]
    Range(String),

    #[error("unsupported range: {0}")]
    UnsupportedRange(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for TwcError {
    fn from(e: std::io::Error) -> Self {
        TwcError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for TwcError {
    fn from(e: serde_json::Error) -> Self {
        TwcError::Format(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, TwcError>;
