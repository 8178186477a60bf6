use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("unsupported character field: {0}")]
    UnsupportedCharacterField(String),

    #[error("resource limit exceeded: {needed} elements requested, cap is {cap}")]
    ResourceLimit { needed: u128, cap: u128 },

    #[error("no stabilization within degree cap {cap} (sampled {} values from n = {start})", .samples.len())]
    DegreeCapExceeded {
        cap: usize,
        start: i64,
        samples: Vec<String>,
    },

    #[error("element is not central: {0}")]
    NotCentral(String),

    #[error("insufficient p-adic precision: {0}")]
    Precision(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter(_) | Error::Parse(_) => 2,
            Error::UnsupportedCharacterField(_) => 3,
            Error::ResourceLimit { .. } => 4,
            Error::DegreeCapExceeded { .. } => 5,
            Error::Validation(_) | Error::NotCentral(_) | Error::Precision(_) => 6,
        }
    }
}
