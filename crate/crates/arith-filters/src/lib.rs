//! The number-theoretic truth data as fixtures, and every pruning predicate
//! of the tower search: relator-rank bound, abelianization profiles,
//! capitulation via the transfer map, the index-stabilization criterion,
//! and the eighth-power subgroup tracker.

pub mod conj91;
pub mod error;
pub mod filters;
pub mod fixture;
pub mod nover;
pub mod transfer;
pub mod verdict;

pub use conj91::{conjecture91_check, Conj91Report};
pub use error::FilterError;
pub use filters::{
    abelianization_filter, capitulation_filter, critical_subgroups, golod_shafarevich_infinite,
    profile_filter, relator_bound_filter, relator_rank_bounds, MatchMode,
};
pub use fixture::{ArithmeticFixture, CriticalFixture};
pub use nover::{nover_criterion, SubgroupSelector, WordFunctional};
pub use transfer::{transfer_map, TransferData};
pub use verdict::{FilterVerdict, Outcome};
