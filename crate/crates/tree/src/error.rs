use std::fmt;

use pc_core::PcError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeError {
    Pc(PcError),
    /// A resource cap was hit; not a mathematical verdict.
    CapExceeded(String),
    /// random_children on a terminal parent.
    TerminalParent,
    /// Covering construction needs genuine definitions for every non-initial
    /// generator (quotients can orphan them).
    MissingDefinitions,
    Parse(String),
}

impl fmt::Display for TreeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeError::Pc(e) => write!(f, "{e}"),
            TreeError::CapExceeded(msg) => write!(f, "resource cap exceeded: {msg}"),
            TreeError::TerminalParent => write!(f, "parent is terminal (nuclear rank 0)"),
            TreeError::MissingDefinitions => {
                write!(f, "presentation lacks definitions for some non-initial generator")
            }
            TreeError::Parse(msg) => write!(f, "parse error: {msg}"),
        }
    }
}

impl std::error::Error for TreeError {}

impl From<PcError> for TreeError {
    fn from(e: PcError) -> Self {
        match e {
            PcError::CapExceeded(m) => TreeError::CapExceeded(m),
            other => TreeError::Pc(other),
        }
    }
}
