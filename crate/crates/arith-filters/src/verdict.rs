use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
    /// The fixture lacks the data to decide (never counts as a prune).
    Indeterminate,
}

/// Outcome of one pruning predicate; a failure always carries a witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilterVerdict {
    pub filter: String,
    pub outcome: Outcome,
    pub witness: Option<String>,
}

impl FilterVerdict {
    pub fn pass(filter: &str) -> Self {
        FilterVerdict { filter: filter.into(), outcome: Outcome::Pass, witness: None }
    }

    pub fn fail(filter: &str, witness: String) -> Self {
        FilterVerdict { filter: filter.into(), outcome: Outcome::Fail, witness: Some(witness) }
    }

    pub fn indeterminate(filter: &str, why: String) -> Self {
        FilterVerdict { filter: filter.into(), outcome: Outcome::Indeterminate, witness: Some(why) }
    }

    pub fn passed(&self) -> bool {
        self.outcome == Outcome::Pass
    }

    /// Pruning semantics: only an outright failure prunes.
    pub fn prunes(&self) -> bool {
        self.outcome == Outcome::Fail
    }
}

impl fmt::Display for FilterVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.outcome, &self.witness) {
            (Outcome::Pass, _) => write!(f, "{}: pass", self.filter),
            (Outcome::Fail, Some(w)) => write!(f, "{}: fail ({w})", self.filter),
            (Outcome::Fail, None) => write!(f, "{}: fail", self.filter),
            (Outcome::Indeterminate, Some(w)) => write!(f, "{}: indeterminate ({w})", self.filter),
            (Outcome::Indeterminate, None) => write!(f, "{}: indeterminate", self.filter),
        }
    }
}
