//! Group elements as exponent vectors in normal form.

use crate::error::PcError;
use crate::presentation::PcPresentation;

/// An element in normal form: exponent vector of length ngens, entries in [0, p).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element {
    pub(crate) exps: Vec<u32>,
}

impl Element {
    pub fn from_exponents(pres: &PcPresentation, exps: Vec<u32>) -> Result<Self, PcError> {
        if exps.len() != pres.ngens() {
            return Err(PcError::LengthMismatch { expected: pres.ngens(), got: exps.len() });
        }
        if exps.iter().any(|&e| e >= pres.prime()) {
            return Err(PcError::Malformed("exponent outside [0, p)".into()));
        }
        Ok(Element { exps })
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exps
    }

    pub fn is_identity(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    /// Index of the first nonzero exponent, if any.
    pub fn leading_index(&self) -> Option<usize> {
        self.exps.iter().position(|&e| e != 0)
    }

    /// Exponent at the leading index (0 for the identity).
    pub fn leading_exponent(&self) -> u32 {
        self.leading_index().map_or(0, |i| self.exps[i])
    }
}

impl std::fmt::Display for Element {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_identity() {
            return write!(f, "1");
        }
        let mut first = true;
        for (i, &e) in self.exps.iter().enumerate() {
            if e != 0 {
                if !first {
                    write!(f, " ")?;
                }
                write!(f, "a{}^{}", i + 1, e)?;
                first = false;
            }
        }
        Ok(())
    }
}
