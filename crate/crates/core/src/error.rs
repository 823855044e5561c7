use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("linear program is infeasible (phase-one residual {residual:e})")]
    Infeasible { residual: f64 },
    #[error("simplex iteration limit {limit} exceeded")]
    IterationLimit { limit: usize },
    #[error("solver produced an inconsistent result: {0}")]
    Solver(String),
    #[error("I_N is still decreasing at n_max = {n_max}; raise the cap")]
    NeedsLargerCap { n_max: usize },
    #[error("insufficient data: no trials in cell (a={a}, b={b})")]
    InsufficientData { a: i64, b: i64 },
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }

    /// True for errors caused by bad user input rather than a failed computation.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_)
                | Error::PreconditionViolated(_)
                | Error::InsufficientData { .. }
                | Error::Parse { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
