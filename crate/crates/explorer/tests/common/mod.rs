//! Shared helpers for the integration suites: the order <= 2^6 corpus
//! generated by the descendant machinery, and table-vs-implementation
//! bridges for the oracle comparisons.

use oracle::TableGroup;
use pc_core::{Element, PcPresentation, Subgroup, SubgroupHandle};
use tree::{immediate_descendants_bounded, Limits};

/// Every 2-group of order at most 2^max_exp, generated as descendants of the
/// elementary abelian roots. The counts per order match the classical
/// classification, which the caller should assert.
pub fn corpus_up_to(max_exp: usize) -> Vec<PcPresentation> {
    let limits = Limits::default();
    let mut corpus: Vec<PcPresentation> =
        (1..=max_exp).map(|d| PcPresentation::elementary_abelian(2, d)).collect();
    let mut i = 0;
    while i < corpus.len() {
        let g = corpus[i].clone();
        i += 1;
        let room = max_exp - g.order_exponent();
        if room == 0 {
            continue;
        }
        let batch = immediate_descendants_bounded(&g, &limits, room)
            .expect("corpus expansion stays within caps");
        corpus.extend(batch.children.into_iter().map(|c| c.presentation));
    }
    corpus
}

/// Subgroup handle from a table-level element list.
pub fn handle_from_elements(
    pres: &PcPresentation,
    table: &TableGroup,
    members: &[u16],
) -> SubgroupHandle {
    let gens: Vec<Element> = members
        .iter()
        .map(|&x| Element::from_exponents(pres, table.digits_of(x)).unwrap())
        .collect();
    SubgroupHandle::new(pres, Subgroup::from_generators(pres, &gens))
}

/// Table index of a pc element.
pub fn table_index(table: &TableGroup, e: &Element) -> u16 {
    table.index_of_element(e)
}
