use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("unsupported weight: {0}")]
    UnsupportedWeight(String),
    #[error("space specification error: {0}")]
    Spec(String),
    #[error("theorem hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("regime misuse: {0}")]
    Regime(String),
    #[error("undefined ratio: {0}")]
    UndefinedRatio(String),
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
