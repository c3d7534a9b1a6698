//! The transfer (Verlagerung) G^ab -> H^ab via the canonical coset
//! transversal, with the kernel reported as invariants plus generators.

use pc_core::abelian::{abelianized_group, subgroup_abelianized};
use pc_core::{AbelianInvariants, PcPresentation, SubgroupHandle};
use tree::Limits;

use crate::error::FilterError;

#[derive(Debug, Clone)]
pub struct TransferData {
    pub source_invariants: AbelianInvariants,
    pub target_invariants: AbelianInvariants,
    /// Row t: image of the t-th canonical generator of G^ab in H^ab
    /// coordinates (entry j reduced mod the j-th target order).
    pub matrix: Vec<Vec<u128>>,
    pub kernel_invariants: AbelianInvariants,
    /// Generators of the kernel, in canonical G^ab coordinates.
    pub kernel_generators: Vec<Vec<u128>>,
}

/// Transfer map for a finite-index subgroup. The value is independent of the
/// transversal; the canonical one keeps the computation deterministic.
pub fn transfer_map(
    pres: &PcPresentation,
    h: &SubgroupHandle,
    limits: &Limits,
) -> Result<TransferData, FilterError> {
    let gab = abelianized_group(pres);
    let hab = subgroup_abelianized(pres, &h.subgroup);
    let transversal_cap = 1u64 << 16;
    let reps = h.subgroup.transversal(pres, transversal_cap)?;
    let p = pres.prime();
    // Transfer of each pc generator, in H^ab coordinates.
    let h_orders: Vec<u128> =
        hab.invariants.exponents().iter().map(|&k| (p as u128).pow(k)).collect();
    let mut gen_images: Vec<Vec<u128>> = Vec::with_capacity(pres.ngens());
    for gi in 0..pres.ngens() {
        let g = pres.generator(gi)?;
        let mut acc = vec![0u128; h_orders.len()];
        for r in &reps {
            let x = pres.multiply(r, &g);
            let canon = h.subgroup.sift(pres, x.clone());
            let h_part = pres.multiply(&x, &pres.inverse(&canon));
            let coords = h
                .subgroup
                .coordinates(pres, &h_part)
                .expect("transfer factor must lie in the subgroup");
            let habc = hab.coordinates(&coords);
            for (a, (b, m)) in acc.iter_mut().zip(habc.iter().zip(&h_orders)) {
                *a = (*a + *b) % *m;
            }
        }
        gen_images.push(acc);
    }
    // Images of the canonical G^ab generators.
    let g_orders: Vec<u128> =
        gab.invariants.exponents().iter().map(|&k| (p as u128).pow(k)).collect();
    let mut matrix = Vec::with_capacity(g_orders.len());
    for t in 0..g_orders.len() {
        let rep = gab.canonical_generator(t);
        let mut acc = vec![0u128; h_orders.len()];
        for (gi, &e) in rep.iter().enumerate() {
            if e != 0 {
                for (a, (b, m)) in acc.iter_mut().zip(gen_images[gi].iter().zip(&h_orders)) {
                    *a = (*a + *b * (e % *m)) % *m;
                }
            }
        }
        matrix.push(acc);
    }
    // Kernel by sweeping G^ab (the abelianization is small in every use).
    let total: u128 = g_orders.iter().product();
    if total > 1 << 22 {
        return Err(FilterError::CapExceeded(format!(
            "kernel sweep over |G^ab| = {total} elements"
        )));
    }
    let mut kernel: Vec<Vec<u128>> = Vec::new();
    let mut digits = vec![0u128; g_orders.len()];
    'sweep: loop {
        let mut img = vec![0u128; h_orders.len()];
        for (t, &d) in digits.iter().enumerate() {
            if d != 0 {
                for (a, (b, m)) in img.iter_mut().zip(matrix[t].iter().zip(&h_orders)) {
                    *a = (*a + *b * d) % *m;
                }
            }
        }
        if img.iter().all(|&x| x == 0) {
            kernel.push(digits.clone());
        }
        let mut pos = g_orders.len();
        loop {
            if pos == 0 {
                break 'sweep;
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < g_orders[pos] {
                break;
            }
            digits[pos] = 0;
        }
    }
    let kernel_invariants = invariants_of_sub_multiset(p, &kernel, &g_orders);
    let kernel_generators = generating_subset(&kernel, &g_orders);
    let _ = limits;
    Ok(TransferData {
        source_invariants: gab.invariants.clone(),
        target_invariants: hab.invariants.clone(),
        matrix,
        kernel_invariants,
        kernel_generators,
    })
}

/// Invariants of a subgroup of ⊕ Z/p^{k_i} given as the full element list:
/// count the p^j-torsion layers.
fn invariants_of_sub_multiset(p: u32, elems: &[Vec<u128>], orders: &[u128]) -> AbelianInvariants {
    if elems.is_empty() {
        return AbelianInvariants::trivial(p);
    }
    let log_size = |n: usize| -> u32 {
        let mut k = 0;
        let mut v = 1usize;
        while v < n {
            v *= p as usize;
            k += 1;
        }
        k
    };
    // s_j = log_p #{x in K : p^j x = 0}; then s_j - s_{j-1} counts the
    // invariants of exponent >= j, which pins the multiset.
    let mut s = vec![0u32];
    let mut j = 1;
    loop {
        let pj = (p as u128).pow(j);
        let count = elems
            .iter()
            .filter(|x| x.iter().zip(orders).all(|(&v, &m)| (v * pj) % m == 0))
            .count();
        s.push(log_size(count));
        if count == elems.len() {
            break;
        }
        j += 1;
    }
    let per_level: Vec<u32> = (1..s.len()).map(|j| s[j] - s[j - 1]).collect();
    let rank = per_level.first().copied().unwrap_or(0);
    let out = (0..rank)
        .map(|t| per_level.iter().filter(|&&c| c > t).count() as u32)
        .collect();
    AbelianInvariants::new(p, out)
}

/// Greedy generating subset of a subgroup given by its element list.
fn generating_subset(elems: &[Vec<u128>], orders: &[u128]) -> Vec<Vec<u128>> {
    let mut gens: Vec<Vec<u128>> = Vec::new();
    let mut span: std::collections::HashSet<Vec<u128>> = std::collections::HashSet::new();
    span.insert(vec![0; orders.len()]);
    let mut sorted = elems.to_vec();
    sorted.sort();
    for e in &sorted {
        if span.contains(e) {
            continue;
        }
        gens.push(e.clone());
        // Close the span under addition of the new generator.
        let mut frontier: Vec<Vec<u128>> = span.iter().cloned().collect();
        while let Some(x) = frontier.pop() {
            let mut y = x.clone();
            for (a, (b, m)) in y.iter_mut().zip(e.iter().zip(orders)) {
                *a = (*a + *b) % *m;
            }
            if span.insert(y.clone()) {
                frontier.push(y);
            }
        }
        if span.len() == elems.len() {
            break;
        }
    }
    gens
}

#[cfg(test)]
mod tests {
    use super::*;
    use pc_core::{Definition, Subgroup};

    #[test]
    fn whole_group_transfer_is_identity() {
        let q8 = pc_core::PcPresentation::new(
            2,
            vec![1, 1, 2],
            vec![Definition::Initial, Definition::Initial, Definition::Power(0)],
            vec![vec![(2, 1)], vec![(2, 1)], vec![]],
            vec![vec![(2, 1)], vec![], vec![]],
        )
        .unwrap();
        let whole = SubgroupHandle::new(&q8, Subgroup::whole_group(&q8));
        let data = transfer_map(&q8, &whole, &Limits::default()).unwrap();
        assert_eq!(data.source_invariants, data.target_invariants);
        assert!(data.kernel_invariants.rank() == 0, "trivial kernel");
        // The matrix is a permutation-free identity on canonical coordinates.
        for (t, row) in data.matrix.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                assert_eq!(v, u128::from(t == j));
            }
        }
    }

    #[test]
    fn z4_transfer_is_squaring() {
        // G = Z/4, H the index-2 subgroup: the transfer is g -> g^2 with
        // kernel Z/2.
        let c4 = pc_core::PcPresentation::new(
            2,
            vec![1, 2],
            vec![Definition::Initial, Definition::Power(0)],
            vec![vec![(1, 1)], vec![]],
            vec![vec![]],
        )
        .unwrap();
        let h = Subgroup::from_generators(&c4, &[c4.generator(1).unwrap()]);
        let handle = SubgroupHandle::new(&c4, h);
        let data = transfer_map(&c4, &handle, &Limits::default()).unwrap();
        assert_eq!(data.source_invariants, AbelianInvariants::new(2, vec![2]));
        assert_eq!(data.target_invariants, AbelianInvariants::new(2, vec![1]));
        assert_eq!(data.kernel_invariants, AbelianInvariants::new(2, vec![1]));
        // V(g) generates H^ab = Z/2.
        assert_eq!(data.matrix[0], vec![1]);
    }

    #[test]
    fn abelian_transfer_is_index_power_map() {
        // For abelian G the transfer equals g -> g^[G:H].
        let e = pc_core::PcPresentation::elementary_abelian(2, 3);
        let lat = e.low_index_subgroups(2).unwrap();
        for class in lat.levels.iter().flatten() {
            let data = transfer_map(&e, &class.handle, &Limits::default()).unwrap();
            // [G:H] = 2 or 4, both kill every element of (Z/2)^3: zero map.
            for row in &data.matrix {
                assert!(row.iter().all(|&v| v == 0));
            }
            assert_eq!(data.kernel_invariants, AbelianInvariants::new(2, vec![1, 1, 1]));
        }
    }
}
