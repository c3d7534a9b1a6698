use std::fmt;

use pc_core::PcError;
use tree::TreeError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FilterError {
    Pc(PcError),
    Tree(TreeError),
    /// Fixture file malformed or violating its internal invariants.
    Fixture(String),
    /// A selector did not resolve to a subgroup (or not uniquely).
    Selector(String),
    /// The selected subgroup is not normal; the stabilization lemma is only
    /// proven for normal subgroups.
    NotNormal,
    CapExceeded(String),
}

impl fmt::Display for FilterError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FilterError::Pc(e) => write!(f, "{e}"),
            FilterError::Tree(e) => write!(f, "{e}"),
            FilterError::Fixture(m) => write!(f, "fixture: {m}"),
            FilterError::Selector(m) => write!(f, "subgroup selector: {m}"),
            FilterError::NotNormal => write!(f, "selected subgroup is not normal"),
            FilterError::CapExceeded(m) => write!(f, "resource cap exceeded: {m}"),
        }
    }
}

impl std::error::Error for FilterError {}

impl From<PcError> for FilterError {
    fn from(e: PcError) -> Self {
        match e {
            PcError::CapExceeded(m) => FilterError::CapExceeded(m),
            other => FilterError::Pc(other),
        }
    }
}

impl From<TreeError> for FilterError {
    fn from(e: TreeError) -> Self {
        match e {
            TreeError::CapExceeded(m) => FilterError::CapExceeded(m),
            other => FilterError::Tree(other),
        }
    }
}
