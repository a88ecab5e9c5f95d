use thiserror::Error;

use crate::element::ElementKind;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot combine elements of kind `{left}` and `{right}`")]
    KindMismatch { left: ElementKind, right: ElementKind },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("program expects {expected} inputs but {given} were supplied")]
    SlotMismatch { expected: usize, given: usize },

    #[error("chain `{chain}` step {step}: {message}")]
    Compile { chain: String, step: usize, message: String },

    #[error("enumeration exceeded the cap of {cap} elements")]
    EnumerationCap { cap: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse { line, message: message.into() }
    }
}
