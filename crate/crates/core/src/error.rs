use thiserror::Error;

/// Errors produced by the library.
///
/// The CLI maps [`Error::Validation`] to exit status 2 and the numeric
/// failures ([`Error::Truncation`], [`Error::NonConvergence`],
/// [`Error::NonFinite`], [`Error::FitDegenerate`], [`Error::CheckFailed`] and
/// the node coincidences) to exit status 3.
#[derive(Debug, Error)]
pub enum Error {
    #[error("index {index} is outside the admissible index set ({reason})")]
    IndexDomain { index: i64, reason: &'static str },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid spec at `{pointer}`: {message}")]
    Validation { pointer: String, message: String },

    #[error("operation `{op}` requires a two-sided spec")]
    UnsupportedSide { op: &'static str },

    #[error("truncation not certified after {factors} factors (achieved tail bound {achieved:e})")]
    Truncation { factors: usize, achieved: f64 },

    #[error("degenerate sequence: node {index} coincides with node {other}")]
    Degenerate { index: i64, other: i64 },

    #[error("point coincides with node {index}")]
    OnNode { index: i64 },

    #[error("least-squares fit is degenerate: {0}")]
    FitDegenerate(String),

    #[error("check failed: {0}")]
    CheckFailed(String),

    #[error("{what} did not converge after {iterations} iterations")]
    NonConvergence { what: &'static str, iterations: usize },

    #[error("non-finite integrand sample at t = {t}, theta = {theta}")]
    NonFinite { t: f64, theta: f64 },

    #[error("evaluation failed at node {index}: {source}")]
    AtNode {
        index: i64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn validation(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            pointer: pointer.into(),
            message: message.into(),
        }
    }

    /// True for failures of numerical certification (as opposed to bad input).
    pub fn is_numeric(&self) -> bool {
        match self {
            Error::Truncation { .. }
            | Error::NonConvergence { .. }
            | Error::NonFinite { .. }
            | Error::FitDegenerate(_)
            | Error::CheckFailed(_)
            | Error::Degenerate { .. }
            | Error::OnNode { .. } => true,
            Error::AtNode { source, .. } => source.is_numeric(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
