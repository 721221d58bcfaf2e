use thiserror::Error;

/// Errors produced anywhere in the laboratory.
///
/// Every variant maps to a stable machine-readable code (see [`Error::code`])
/// which the command-line front end prints as `error_code=<code>`.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("non-finite value {value} at index {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("inadmissible norm parameters: {0}")]
    InadmissibleNorm(String),

    #[error("function is not in the Orlicz class of the given Young function")]
    NotInOrliczClass,

    #[error("parameters outside theorem hypotheses: {0}")]
    Hypothesis(String),

    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("point {0:?} is not interior to the domain")]
    NotInterior([f64; 3]),

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid_input",
            Error::NonFinite { .. } => "non_finite",
            Error::InadmissibleNorm(_) => "inadmissible_norm",
            Error::NotInOrliczClass => "not_in_orlicz_class",
            Error::Hypothesis(_) => "hypothesis",
            Error::Geometry(_) => "geometry",
            Error::NotInterior(_) => "not_interior",
            Error::Budget(_) => "budget",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
            Error::Internal(_) => "internal",
        }
    }

    /// Validation errors are caused by bad user input; everything else is a
    /// runtime failure.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Io(_) | Error::Internal(_) | Error::Budget(_))
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
