use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("index {index} out of range for length {len}")]
    OutOfRange { index: usize, len: usize },

    #[error("length mismatch: expected {expected} bits, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("field descriptor mismatch")]
    FieldMismatch,

    #[error("inversion of zero")]
    InverseOfZero,

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("malformed hex: {0}")]
    MalformedHex(String),

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("profile `{0}` is not registered")]
    UnknownProfile(String),

    #[error("profile `{name}` violates `{rule}`")]
    ProfileViolation { name: String, rule: String },

    #[error("scheme `{scheme}` is incompatible with {what}")]
    Incompatible { scheme: String, what: String },

    #[error("enumeration space of 2^{bits} points exceeds the limit of 2^{limit}")]
    SpaceTooLarge { bits: usize, limit: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("quantum state invalid: {0}")]
    InvalidState(String),

    #[error("io: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
