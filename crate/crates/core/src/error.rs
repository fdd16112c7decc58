use std::fmt;

/// Errors raised by the survival-probability routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error at position {position} near `{token}`: {message}")]
    Parse {
        position: usize,
        token: String,
        message: String,
    },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("unsupported premium rate {0}; only premium 2 is modelled")]
    UnsupportedPremium(u32),

    #[error("inconsistent model: {0}")]
    InconsistentModel(String),

    /// The truncated mean of S straddles the net-profit boundary E S = 4.
    #[error(
        "cannot decide the net profit condition: E S lies in [{lower}, {upper}]; lower tail_tol"
    )]
    PrecisionInsufficient { lower: f64, upper: f64 },

    #[error("wrong case: {0}")]
    WrongCase(String),

    #[error("singular system at n = {n} (determinant = {determinant})")]
    SingularSystem { n: usize, determinant: String },

    #[error("initial values did not converge up to n = {n_cap} (last change {last_change:e})")]
    NoConvergence { n_cap: usize, last_change: f64 },

    #[error("internal consistency: {0}")]
    Internal(String),

    #[error("boundary oracle failed: {0}")]
    OracleFailure(String),

    #[error("io error on {path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    pub(crate) fn parse(position: usize, token: impl fmt::Display, message: impl Into<String>) -> Self {
        Error::Parse {
            position,
            token: token.to_string(),
            message: message.into(),
        }
    }

    /// True for failures of the numerical machinery rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::PrecisionInsufficient { .. }
                | Error::SingularSystem { .. }
                | Error::NoConvergence { .. }
                | Error::Internal(_)
                | Error::OracleFailure(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
