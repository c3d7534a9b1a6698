//! Brute-force oracles for the test suites: a multiplication table built by
//! naive word rewriting, integer Smith normal form, table-level subgroup
//! enumeration, isomorphism testing by backtracking over generator images,
//! and a coset-representative transfer map with randomized representatives.
//!
//! Everything here is deliberately independent of the production collection
//! and linear-algebra paths it is used to check (same relations, different
//! algorithms and representations).

pub mod iso;
pub mod snf;
pub mod subspace;
pub mod table;
pub mod transfer;

pub use table::TableGroup;

/// Minimal deterministic PRNG (xorshift64*) for randomized oracle choices.
#[derive(Debug, Clone)]
pub struct XorShift64 {
    state: u64,
}

impl XorShift64 {
    pub fn new(seed: u64) -> Self {
        XorShift64 { state: seed.max(1) }
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.state = x;
        x.wrapping_mul(0x2545F4914F6CDD1D)
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n.max(1)
    }
}
