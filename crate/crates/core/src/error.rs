use thiserror::Error;

/// Errors raised by constructions, verifiers and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid input: {0}")]
    Input(String),

    /// An identity that must hold by construction failed to hold.
    #[error("construction failed: {0}")]
    Construction(String),

    #[error("not a complex: {0}")]
    NotAComplex(String),

    #[error("certificate rejected: {0}")]
    CertificateRejected(String),

    #[error("search exhausted after {samples} samples: {what}")]
    SearchExhausted { samples: usize, what: String },

    #[error("field too small: p = {p} must exceed dim = {dim}")]
    FieldTooSmall { p: u32, dim: usize },

    #[error("schema error: {0}")]
    Schema(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Whether the failure is an input/schema problem rather than a failed
    /// mathematical check. Drives the CLI exit-code contract.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Dimension(_) | Error::Input(_) | Error::Schema(_) | Error::Io(_) | Error::Json(_) | Error::Csv(_)
        )
    }
}
