use thiserror::Error;

/// Errors raised by the library. Each variant maps onto one CLI exit class
/// through [`Error::exit_code`].
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("position {position} lies outside the domain [{lower}, {upper}]")]
    Domain {
        position: f64,
        lower: f64,
        upper: f64,
    },

    #[error("environment class is empty: lower bound {lower} is not below L = {upper}")]
    EmptyClass { lower: f64, upper: f64 },

    #[error("intensity is not a member of M(L): {0}")]
    ClassViolation(String),

    #[error("estimator needs at least one full-information record")]
    EmptyRecords,

    #[error("simulation exceeded {cap} thinning candidates")]
    CandidateCap { cap: u64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("not enough samples: have {have}, need {need}")]
    InsufficientSamples { have: usize, need: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// 1 usage/parse, 2 validation failure, 3 runtime numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Io(_) | Error::InvalidParameter { .. } => 1,
            Error::EmptyClass { .. } | Error::ClassViolation(_) => 2,
            _ => 3,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
