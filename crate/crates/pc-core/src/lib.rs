//! Exact arithmetic in finite p-groups given by consistent weighted
//! power-commutator presentations: collection to normal form, element
//! arithmetic, subgroups, abelian invariants, p-central series, power
//! subgroups and low-index subgroup enumeration.

pub mod abelian;
pub mod collect;
pub mod element;
pub mod error;
pub mod linalg;
pub mod lowindex;
pub mod presentation;
pub mod series;
pub mod subgroup;

pub use abelian::AbelianInvariants;
pub use element::Element;
pub use error::PcError;
pub use presentation::{Definition, PcPresentation, Word};
pub use subgroup::{Subgroup, SubgroupHandle};

/// Index into the flattened lower triangle of commutator relations,
/// for the pair (j, i) with j > i (0-based).
#[inline]
pub(crate) fn pair_index(j: usize, i: usize) -> usize {
    debug_assert!(j > i);
    j * (j - 1) / 2 + i
}
