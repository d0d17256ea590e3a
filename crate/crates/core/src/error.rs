use thiserror::Error;

/// Failure modes shared by every module.
///
/// `Violation`, `FormMismatch` and `RootFailure` on inputs covered by a proven
/// statement mean an implementation bug; they are never expected in practice.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("non-convergent: {0}")]
    NonConvergent(String),
    #[error("invalid exponent: {0}")]
    InvalidExponent(String),
    #[error("unbounded: {0}")]
    Unbounded(String),
    #[error("kernel truncation failed: {0}")]
    TruncationFail(String),
    #[error("algebraic forms disagree: {0}")]
    FormMismatch(String),
    #[error("violation in {check}: {detail}")]
    Violation { check: String, detail: String },
    #[error("root isolation failed: {0}")]
    RootFailure(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    pub fn violation(check: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Violation {
            check: check.into(),
            detail: detail.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
