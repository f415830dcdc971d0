use thiserror::Error;

/// Errors surfaced by construction and verification pipelines.
#[derive(Debug, Error)]
pub enum Error {
    /// Exact-mode arithmetic could not proceed (e.g. a determinant with no
    /// rational square root, or division by zero).
    #[error("arithmetic: {0}")]
    Arithmetic(String),

    /// A construction received inputs outside its domain.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// A combination-theorem hypothesis failed. The pipeline refuses to
    /// build a group whose hypotheses do not check out.
    #[error("hypothesis failure ({check}): {detail}")]
    Hypothesis { check: String, detail: String },

    /// An operation precondition was not met.
    #[error("precondition: {0}")]
    Precondition(String),

    /// Malformed input file or expression.
    #[error("parse error: {0}")]
    Parse(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn hypothesis(check: &str, detail: impl Into<String>) -> Self {
        Error::Hypothesis {
            check: check.to_string(),
            detail: detail.into(),
        }
    }
}
