//! Textbook transfer map on a multiplication table with randomized coset
//! representatives: V(g) = prod_i r_i g r_{sigma(i)}^{-1} in H^{ab}.

use crate::table::TableGroup;
use crate::XorShift64;

/// Transfer of `g` into H (element list, sorted), returning a representative
/// element of the coset V(g)[H,H]. Representatives are chosen at random.
pub fn transfer_rep(t: &TableGroup, h: &[u16], g: u16, rng: &mut XorShift64) -> u16 {
    let in_h = member_mask(t, h);
    // Partition into right cosets Hx, picking a random representative each.
    let mut coset_of = vec![usize::MAX; t.size];
    let mut reps: Vec<u16> = Vec::new();
    for x in 0..t.size as u16 {
        if coset_of[x as usize] != usize::MAX {
            continue;
        }
        let members: Vec<u16> = h.iter().map(|&hh| t.mul(hh, x)).collect();
        let rep = members[rng.below(members.len() as u64) as usize];
        let id = reps.len();
        for &m in &members {
            coset_of[m as usize] = id;
        }
        reps.push(rep);
    }
    let mut product = 0u16;
    for &r in &reps {
        let rg = t.mul(r, g);
        let target = coset_of[rg as usize];
        let hpart = t.mul(rg, t.inv[reps[target] as usize]);
        assert!(in_h[hpart as usize], "transfer factor left the subgroup");
        product = t.mul(product, hpart);
    }
    product
}

/// Whether two subgroup elements agree modulo the derived subgroup of H.
pub fn equal_mod_derived(t: &TableGroup, h: &[u16], x: u16, y: u16) -> bool {
    let derived = t.derived_of(h);
    let ratio = t.mul(x, t.inv[y as usize]);
    derived.binary_search(&ratio).is_ok()
}

fn member_mask(t: &TableGroup, h: &[u16]) -> Vec<bool> {
    let mut mask = vec![false; t.size];
    for &x in h {
        mask[x as usize] = true;
    }
    mask
}

#[cfg(test)]
mod tests {
    use super::*;
    use pc_core::{Definition, PcPresentation};

    #[test]
    fn abelian_transfer_is_index_power() {
        // G = Z/4, H = the index-2 subgroup: transfer is g -> g^2.
        let c4 = PcPresentation::new(
            2,
            vec![1, 2],
            vec![Definition::Initial, Definition::Power(0)],
            vec![vec![(1, 1)], vec![]],
            vec![vec![]],
        )
        .unwrap();
        let t = TableGroup::build(&c4, 64).unwrap();
        // Elements: index 0 = 1, 1 = a2, 2 = a1, 3 = a1 a2. H = <a2> = {0, 1}.
        let h = vec![0u16, 1u16];
        let mut rng = XorShift64::new(7);
        for g in 0..4u16 {
            let v = transfer_rep(&t, &h, g, &mut rng);
            let expected = t.mul(g, g); // g^[G:H] in an abelian group
            assert!(equal_mod_derived(&t, &h, v, expected));
        }
    }
}
