//! The eighth-power subgroup tracker: G^8's index, abelianness, and whether
//! the index stays within the conjectured 2^40 bound.

use pc_core::PcPresentation;

use crate::error::FilterError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conj91Report {
    /// log_p of [G : G^8].
    pub index_exponent: u32,
    pub abelian: bool,
    /// index <= 2^40.
    pub within_bound: bool,
    /// log_p |G| for context.
    pub order_exponent: usize,
}

/// Compute G^8 = G^{p^3} and report the conjecture's three facts.
pub fn conjecture91_check(
    pres: &PcPresentation,
    sweep_cap: u64,
) -> Result<Conj91Report, FilterError> {
    let handle = pres.power_subgroup(3, sweep_cap)?;
    Ok(Conj91Report {
        index_exponent: handle.index_exponent,
        abelian: handle.subgroup.is_abelian(pres),
        within_bound: handle.index_exponent <= 40,
        order_exponent: pres.order_exponent(),
    })
}
