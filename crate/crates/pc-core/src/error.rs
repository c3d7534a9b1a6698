use std::fmt;

/// Errors raised by presentation construction and group arithmetic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PcError {
    /// A word or relation references a generator outside the presentation.
    GeneratorOutOfRange { index: usize, ngens: usize },
    /// An element's exponent vector does not match the presentation.
    LengthMismatch { expected: usize, got: usize },
    /// Structurally invalid presentation (weights, definitions, relation shape).
    Malformed(String),
    /// A configured resource cap was exceeded; distinct from a negative answer.
    CapExceeded(String),
    /// Text record could not be parsed.
    Parse(String),
}

impl fmt::Display for PcError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PcError::GeneratorOutOfRange { index, ngens } => {
                write!(f, "generator index {index} out of range (ngens = {ngens})")
            }
            PcError::LengthMismatch { expected, got } => {
                write!(f, "exponent vector length {got}, presentation has {expected} generators")
            }
            PcError::Malformed(msg) => write!(f, "malformed presentation: {msg}"),
            PcError::CapExceeded(msg) => write!(f, "resource cap exceeded: {msg}"),
            PcError::Parse(msg) => write!(f, "parse error: {msg}"),
        }
    }
}

impl std::error::Error for PcError {}
