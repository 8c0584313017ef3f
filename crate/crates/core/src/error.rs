use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("instance too large: {0}")]
    InstanceTooLarge(String),

    #[error("rejection budget exceeded after {attempts} attempts")]
    RejectionBudgetExceeded { attempts: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short stable label used as a per-trial failure reason code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DimensionMismatch(_) => "dimension_mismatch",
            Error::InvalidConfig(_) => "invalid_config",
            Error::Domain(_) => "domain",
            Error::InstanceTooLarge(_) => "instance_too_large",
            Error::RejectionBudgetExceeded { .. } => "rejection_budget_exceeded",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
