//! The descendant machinery around weighted pc presentations: p-covering
//! groups with multiplicator and nucleus, immediate descendants by orbit
//! enumeration of allowable subgroups, random children, p-quotients of
//! finitely presented pro-p groups, and the terminal / moribund tests.

pub mod aut;
pub mod cover;
pub mod descend;
pub mod error;
pub mod fp;
pub mod orbit;
pub mod orbit_p2;
pub mod pquot;
pub mod rng;

pub use cover::CoveringData;
pub use descend::{
    immediate_descendants, immediate_descendants_bounded, is_moribund, is_terminal,
    random_children, Child, DescendantBatch, MoribundVerdict,
};
pub use error::TreeError;
pub use fp::FpPresentation;
pub use pquot::p_quotient;

/// Resource caps; exceeding one yields `TreeError::CapExceeded`, which is
/// reported distinctly from any negative mathematical answer.
#[derive(Debug, Clone)]
pub struct Limits {
    /// Hard cap on pc generators of any constructed presentation.
    pub max_ngens: usize,
    /// Cap on |GL(d, p)| enumeration during automorphism lifting.
    pub aut_enum_cap: u64,
    /// Cap on |G|^d tuples during automorphism backtracking.
    pub aut_backtrack_cap: u64,
    /// Cap (in bits) on one allowable-subgroup visited bitmap.
    pub orbit_bitmap_bits: u128,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_ngens: 96,
            aut_enum_cap: 2_500_000,
            aut_backtrack_cap: 1 << 22,
            orbit_bitmap_bits: 1 << 33,
        }
    }
}
