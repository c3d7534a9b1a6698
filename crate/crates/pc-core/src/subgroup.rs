//! Subgroups of a pc group as echelonized induced generating sequences:
//! one pivot per leading index, leading exponent normalized to 1, closed
//! under powers and commutators. The fully reduced form is the unique
//! canonical representative used for hashing and de-duplication.

use std::sync::OnceLock;

use crate::abelian::AbelianInvariants;
use crate::element::Element;
use crate::error::PcError;
use crate::linalg::inv_mod_p;
use crate::presentation::PcPresentation;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgroup {
    /// Pivot elements sorted by strictly increasing leading index.
    pivots: Vec<Element>,
}

impl Subgroup {
    pub fn trivial() -> Self {
        Subgroup { pivots: Vec::new() }
    }

    pub fn whole_group(pres: &PcPresentation) -> Self {
        let pivots = (0..pres.ngens()).map(|i| pres.generator(i).unwrap()).collect();
        Subgroup { pivots }
    }

    /// Subgroup generated by `gens`, closed under products, powers and inverses.
    pub fn from_generators(pres: &PcPresentation, gens: &[Element]) -> Self {
        let mut sub = Subgroup::trivial();
        let mut queue: Vec<Element> = gens.to_vec();
        while let Some(x) = queue.pop() {
            sub.insert_and_enqueue(pres, x, &mut queue);
        }
        sub
    }

    /// Smallest normal subgroup containing `gens`: closure additionally
    /// commutates every new pivot with every group generator.
    pub fn normal_closure(pres: &PcPresentation, gens: &[Element]) -> Self {
        let mut sub = Subgroup::trivial();
        let mut queue: Vec<Element> = gens.to_vec();
        while let Some(x) = queue.pop() {
            if let Some(v) = sub.insert_and_enqueue(pres, x, &mut queue) {
                for i in 0..pres.ngens() {
                    let g = pres.generator(i).unwrap();
                    queue.push(pres.commutator_of(&v, &g));
                }
            }
        }
        sub
    }

    /// Sift-insert x; on a fresh pivot, enqueue the closure obligations
    /// (pivot powers and pairwise commutators). Returns the new pivot.
    fn insert_and_enqueue(
        &mut self,
        pres: &PcPresentation,
        x: Element,
        queue: &mut Vec<Element>,
    ) -> Option<Element> {
        let residue = self.sift(pres, x);
        let lead = residue.leading_index()?;
        let p = pres.prime();
        // Normalize leading exponent to 1.
        let inv = inv_mod_p(residue.exps[lead], p);
        let v = pres.power(&residue, inv as i64);
        debug_assert_eq!(v.exps[lead], 1);
        queue.push(pres.power(&v, p as i64));
        for w in &self.pivots {
            queue.push(pres.commutator_of(&v, w));
        }
        let pos = self.pivots.partition_point(|w| w.leading_index().unwrap() < lead);
        self.pivots.insert(pos, v.clone());
        Some(v)
    }

    /// Left-sift x through the pivots: returns h^-1 x with zero exponents at
    /// all pivot leading indices. The residue is the canonical coset
    /// representative of Hx; it is the identity iff x is a member.
    pub fn sift(&self, pres: &PcPresentation, x: Element) -> Element {
        let p = pres.prime();
        let mut cur = x;
        for pivot in &self.pivots {
            let lead = pivot.leading_index().unwrap();
            let c = cur.exps[lead];
            if c != 0 {
                cur = pres.multiply(&pres.power(pivot, (p - c) as i64), &cur);
            }
        }
        cur
    }

    /// Membership coordinates: exponents of x along the pivot sequence, if
    /// x ∈ H (so x = t_1^{c_1} ··· t_m^{c_m} exactly). Unlike `sift`, the
    /// reduction must divide by the true pivot power: p - c only agrees with
    /// -c when the pivot has order p.
    pub fn coordinates(&self, pres: &PcPresentation, x: &Element) -> Option<Vec<u32>> {
        let mut cur = x.clone();
        let mut coords = vec![0; self.pivots.len()];
        for (t, pivot) in self.pivots.iter().enumerate() {
            let lead = pivot.leading_index().unwrap();
            let c = cur.exps[lead];
            if c != 0 {
                coords[t] = c;
                cur = pres.multiply(&pres.power(pivot, -(c as i64)), &cur);
            }
        }
        cur.is_identity().then_some(coords)
    }

    pub fn contains(&self, pres: &PcPresentation, x: &Element) -> bool {
        self.sift(pres, x.clone()).is_identity()
    }

    pub fn contains_subgroup(&self, pres: &PcPresentation, other: &Subgroup) -> bool {
        other.pivots.iter().all(|t| self.contains(pres, t))
    }

    pub fn pivots(&self) -> &[Element] {
        &self.pivots
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.pivots.is_empty()
    }

    /// log_p of the subgroup order.
    pub fn order_exponent(&self) -> usize {
        self.pivots.len()
    }

    /// log_p of the index in the ambient group.
    pub fn index_exponent(&self, pres: &PcPresentation) -> u32 {
        (pres.ngens() - self.pivots.len()) as u32
    }

    /// Fully reduce: zero every pivot's exponent at the leading index of every
    /// later pivot. The result is the unique reduced echelon form of H.
    pub fn canonicalize(&mut self, pres: &PcPresentation) {
        let p = pres.prime();
        let leads: Vec<usize> = self.pivots.iter().map(|t| t.leading_index().unwrap()).collect();
        for t in 0..self.pivots.len() {
            for s in t + 1..self.pivots.len() {
                let c = self.pivots[t].exps[leads[s]];
                if c != 0 {
                    let corr = pres.power(&self.pivots[s], (p - c) as i64);
                    self.pivots[t] = pres.multiply(&self.pivots[t], &corr);
                }
            }
        }
    }

    /// Canonical byte key (after `canonicalize`) for hashing and ordering.
    pub fn canonical_key(&self, pres: &PcPresentation) -> Vec<u32> {
        let mut copy = self.clone();
        copy.canonicalize(pres);
        let mut key = Vec::with_capacity(copy.pivots.len() * pres.ngens());
        for t in &copy.pivots {
            key.extend_from_slice(&t.exps);
        }
        key
    }

    /// Conjugate subgroup g^-1 H g.
    pub fn conjugate(&self, pres: &PcPresentation, g: &Element) -> Subgroup {
        let images: Vec<Element> = self.pivots.iter().map(|t| pres.conjugate(t, g)).collect();
        // Images generate a subgroup of the same order; if echelon insertion
        // absorbs them all without rank loss, the span already equals the
        // conjugate and no closure pass is needed.
        let mut sub = Subgroup::trivial();
        for x in images.iter() {
            sub.insert_plain(pres, x.clone());
        }
        if sub.rank() == self.rank() {
            sub
        } else {
            Subgroup::from_generators(pres, &images)
        }
    }

    /// Echelon insert without closure obligations. Returns whether added.
    fn insert_plain(&mut self, pres: &PcPresentation, x: Element) -> bool {
        let residue = self.sift(pres, x);
        let Some(lead) = residue.leading_index() else { return false };
        let inv = inv_mod_p(residue.exps[lead], pres.prime());
        let v = pres.power(&residue, inv as i64);
        let pos = self.pivots.partition_point(|w| w.leading_index().unwrap() < lead);
        self.pivots.insert(pos, v);
        true
    }

    pub fn is_normal(&self, pres: &PcPresentation) -> bool {
        for i in 0..pres.ngens() {
            let g = pres.generator(i).unwrap();
            for t in &self.pivots {
                if !self.contains(pres, &pres.conjugate(t, &g)) {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_abelian(&self, pres: &PcPresentation) -> bool {
        for (a, s) in self.pivots.iter().enumerate() {
            for t in &self.pivots[a + 1..] {
                if !pres.commutator_of(s, t).is_identity() {
                    return false;
                }
            }
        }
        true
    }

    /// Canonical right-coset transversal: all exponent patterns supported on
    /// the non-pivot indices. Errors if the index exceeds the cap.
    pub fn transversal(&self, pres: &PcPresentation, cap: u64) -> Result<Vec<Element>, PcError> {
        let free: Vec<usize> = {
            let leads: Vec<usize> = self.pivots.iter().map(|t| t.leading_index().unwrap()).collect();
            (0..pres.ngens()).filter(|i| !leads.contains(i)).collect()
        };
        let p = pres.prime() as u64;
        let count = p.checked_pow(free.len() as u32).filter(|&c| c <= cap).ok_or_else(|| {
            PcError::CapExceeded(format!("transversal of size p^{} exceeds cap {cap}", free.len()))
        })?;
        let mut reps = Vec::with_capacity(count as usize);
        let mut digits = vec![0u32; free.len()];
        loop {
            let mut e = pres.identity();
            for (d, &i) in digits.iter().zip(&free) {
                e.exps[i] = *d;
            }
            reps.push(e);
            // Mixed-radix increment, least significant last.
            let mut pos = free.len();
            loop {
                if pos == 0 {
                    return Ok(reps);
                }
                pos -= 1;
                digits[pos] += 1;
                if digits[pos] < pres.prime() {
                    break;
                }
                digits[pos] = 0;
            }
        }
    }

    /// Every element of the subgroup, as products of pivot powers in
    /// mixed-radix order. Errors if the subgroup order exceeds the cap.
    pub fn elements(&self, pres: &PcPresentation, cap: u64) -> Result<Vec<Element>, PcError> {
        let p = pres.prime() as u64;
        let m = self.pivots.len();
        let count = p.checked_pow(m as u32).filter(|&c| c <= cap).ok_or_else(|| {
            PcError::CapExceeded(format!("subgroup sweep of p^{m} elements exceeds cap {cap}"))
        })?;
        let mut out = Vec::with_capacity(count as usize);
        let mut digits = vec![0u32; m];
        loop {
            let mut acc = pres.identity();
            for (d, t) in digits.iter().zip(&self.pivots) {
                if *d != 0 {
                    acc = pres.multiply(&acc, &pres.power(t, *d as i64));
                }
            }
            out.push(acc);
            let mut pos = m;
            loop {
                if pos == 0 {
                    return Ok(out);
                }
                pos -= 1;
                digits[pos] += 1;
                if digits[pos] < pres.prime() {
                    break;
                }
                digits[pos] = 0;
            }
        }
    }

    /// Mixed-radix rank of a canonical coset representative (inverse of the
    /// enumeration order of `transversal`).
    pub fn coset_rank(&self, pres: &PcPresentation, rep: &Element) -> u64 {
        let leads: Vec<usize> = self.pivots.iter().map(|t| t.leading_index().unwrap()).collect();
        let mut r = 0u64;
        for i in 0..pres.ngens() {
            if !leads.contains(&i) {
                r = r * pres.prime() as u64 + rep.exps[i] as u64;
            }
        }
        r
    }
}

/// A subgroup with its bookkeeping: index, normality, lazily cached
/// abelianization. The cache fill is idempotent (OnceLock).
#[derive(Debug)]
pub struct SubgroupHandle {
    pub subgroup: Subgroup,
    pub index_exponent: u32,
    pub is_normal: bool,
    ab: OnceLock<AbelianInvariants>,
}

impl Clone for SubgroupHandle {
    fn clone(&self) -> Self {
        let ab = OnceLock::new();
        if let Some(v) = self.ab.get() {
            let _ = ab.set(v.clone());
        }
        SubgroupHandle { subgroup: self.subgroup.clone(), index_exponent: self.index_exponent, is_normal: self.is_normal, ab }
    }
}

impl SubgroupHandle {
    pub fn new(pres: &PcPresentation, subgroup: Subgroup) -> Self {
        let index_exponent = subgroup.index_exponent(pres);
        let is_normal = subgroup.is_normal(pres);
        SubgroupHandle { subgroup, index_exponent, is_normal, ab: OnceLock::new() }
    }

    /// Generating elements (the pivot sequence).
    pub fn generator_words(&self) -> &[Element] {
        self.subgroup.pivots()
    }

    /// Abelian invariants of the subgroup, computed on first use.
    pub fn abelianization(&self, pres: &PcPresentation) -> &AbelianInvariants {
        self.ab.get_or_init(|| crate::abelian::subgroup_abelian_invariants(pres, &self.subgroup))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::fixtures::*;

    #[test]
    fn closure_and_membership_in_q8() {
        let q8 = quaternion8();
        let g1 = q8.generator(0).unwrap();
        let h = Subgroup::from_generators(&q8, &[g1.clone()]);
        // <i> has order 4 in Q8.
        assert_eq!(h.order_exponent(), 2);
        assert!(h.contains(&q8, &q8.power(&g1, 3)));
        let g2 = q8.generator(1).unwrap();
        assert!(!h.contains(&q8, &g2));
        assert_eq!(h.index_exponent(&q8), 1);
        assert!(h.is_normal(&q8));
    }

    #[test]
    fn center_of_d4() {
        let d4 = dihedral8();
        let g3 = d4.generator(2).unwrap();
        let z = Subgroup::from_generators(&d4, &[g3]);
        assert_eq!(z.order_exponent(), 1);
        assert!(z.is_normal(&d4));
        assert!(z.is_abelian(&d4));
    }

    #[test]
    fn transversal_covers_group() {
        let d4 = dihedral8();
        let g1 = d4.generator(0).unwrap();
        let h = Subgroup::from_generators(&d4, &[g1]);
        let reps = h.transversal(&d4, 1 << 10).unwrap();
        assert_eq!(reps.len(), 1 << h.index_exponent(&d4));
        // Each element lies in exactly one coset.
        for (i, r) in reps.iter().enumerate() {
            assert_eq!(h.coset_rank(&d4, r), i as u64);
        }
    }

    #[test]
    fn normal_closure_of_noncentral_element() {
        let d4 = dihedral8();
        let g2 = d4.generator(1).unwrap();
        let n = Subgroup::normal_closure(&d4, &[g2]);
        // <g2>^D4 = <g2, g3> of order 4.
        assert_eq!(n.order_exponent(), 2);
        assert!(n.is_normal(&d4));
    }

    #[test]
    fn canonical_key_is_stable_under_generator_order() {
        let q8 = quaternion8();
        let g1 = q8.generator(0).unwrap();
        let g2 = q8.generator(1).unwrap();
        let a = Subgroup::from_generators(&q8, &[g1.clone(), g2.clone()]);
        let b = Subgroup::from_generators(&q8, &[g2, g1]);
        assert_eq!(a.canonical_key(&q8), b.canonical_key(&q8));
    }
}
