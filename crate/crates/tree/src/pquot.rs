//! The p-quotient algorithm: maximal quotients Q_c of p-class at most c of a
//! finitely presented pro-p group, built class by class through covering
//! groups, imposing the relators evaluated in the multiplicator.

use pc_core::linalg::rref_mod_p;
use pc_core::{Element, PcPresentation};

use crate::cover::{p_covering_group, quotient_by_tail_subspace};
use crate::error::TreeError;
use crate::fp::FpPresentation;
use crate::Limits;

/// Result of the class-by-class construction.
#[derive(Debug, Clone)]
pub struct PQuotient {
    pub group: PcPresentation,
    /// Images of the free generators in `group`.
    pub images: Vec<Element>,
    /// True if the quotient stabilized below the requested class (the fp
    /// group's maximal p-quotient was reached).
    pub stabilized: bool,
}

/// Maximal quotient of p-class <= c of the pro-p completion of `fp`.
pub fn p_quotient(
    fp: &FpPresentation,
    p: u32,
    c: u32,
    limits: &Limits,
) -> Result<PQuotient, TreeError> {
    assert!(c >= 1, "p-quotient needs a class of at least 1");
    // Class 1: the free generators modulo the relators' linear parts mod p.
    let mut rows: Vec<Vec<u32>> = fp
        .relators()
        .iter()
        .map(|r| fp.exponent_sums(r, p))
        .filter(|v| v.iter().any(|&x| x != 0))
        .collect();
    let pivots = rref_mod_p(&mut rows, p);
    let d = fp.ngens() - pivots.len();
    let group = PcPresentation::elementary_abelian(p, d);
    // theta: free generator -> element of Q_1.
    let nonpivot: Vec<usize> = (0..fp.ngens()).filter(|g| !pivots.contains(g)).collect();
    let mut images: Vec<Element> = Vec::with_capacity(fp.ngens());
    for g in 0..fp.ngens() {
        let mut exps = vec![0u32; d];
        if let Some(slot) = nonpivot.iter().position(|&x| x == g) {
            exps[slot] = 1;
        } else {
            // Pivot generator: expressed by its rref row on the free columns.
            let row = rows
                .iter()
                .zip(&pivots)
                .find(|(_, &piv)| piv == g)
                .map(|(r, _)| r)
                .expect("pivot row");
            for (slot, &col) in nonpivot.iter().enumerate() {
                exps[slot] = (p - row[col] % p) % p;
            }
        }
        images.push(Element::from_exponents(&group, exps).unwrap());
    }
    let mut state = PQuotient { group, images, stabilized: false };
    if d == 0 {
        state.stabilized = true;
        return Ok(state);
    }
    while state.group.weight_class() < c {
        let cov = p_covering_group(&state.group, limits)?;
        let cover = &cov.cover;
        // Lift the images (zero tail part) and evaluate every relator; the
        // values land in the multiplicator and span the subspace to kill.
        let lifted: Vec<Element> = state
            .images
            .iter()
            .map(|img| {
                let mut exps = img.exponents().to_vec();
                exps.resize(cover.ngens(), 0);
                Element::from_exponents(cover, exps).unwrap()
            })
            .collect();
        let mut z_rows: Vec<Vec<u32>> = Vec::new();
        for r in fp.relators() {
            let v = fp.evaluate(r, cover, &lifted);
            let tail = cov
                .multiplicator_part(&v)
                .expect("relators must evaluate into the multiplicator");
            if tail.iter().any(|&x| x != 0) {
                z_rows.push(tail);
            }
        }
        rref_mod_p(&mut z_rows, p);
        let next = quotient_by_tail_subspace(cover, cov.parent_ngens, &z_rows)?;
        if next.ngens() == state.group.ngens() {
            state.stabilized = true;
            break;
        }
        let ngens = next.ngens();
        state.images = state
            .images
            .iter()
            .map(|img| {
                let mut exps = img.exponents().to_vec();
                exps.resize(ngens, 0);
                Element::from_exponents(&next, exps).unwrap()
            })
            .collect();
        state.group = next;
    }
    Ok(state)
}
