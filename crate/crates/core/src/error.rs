use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("alphabet mismatch: {{{left}}} vs {{{right}}}")]
    AlphabetMismatch { left: String, right: String },

    #[error("no image given for generator `{0}`")]
    MissingImage(String),

    #[error("unknown generator `{name}` at line {line}, column {column}")]
    UnknownGenerator {
        name: String,
        line: usize,
        column: usize,
    },

    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid generator name `{0}`")]
    InvalidName(String),

    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),

    #[error("generator change is not invertible: {0}")]
    NotInvertible(String),

    #[error("invalid slope {p}/{q}")]
    InvalidSlope { p: i64, q: i64 },

    #[error("invalid peripheral system: {0}")]
    InvalidPeripheral(String),

    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
