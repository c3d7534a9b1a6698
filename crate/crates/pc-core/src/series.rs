//! p-central series P_0 = G, P_{n+1} = [G, P_n] P_n^p, the p-class,
//! quotient presentations by normal subgroups, and power subgroups G^n.

use crate::element::Element;
use crate::error::PcError;
use crate::presentation::{Definition, PcPresentation, Word};
use crate::subgroup::{Subgroup, SubgroupHandle};

impl PcPresentation {
    /// The descending p-central series, starting at P_1 and ending with the
    /// first trivial term (the whole group P_0 is implicit).
    pub fn p_central_series(&self) -> Vec<Subgroup> {
        let mut series = Vec::new();
        let mut current = Subgroup::whole_group(self);
        loop {
            let next = self.p_central_step(&current);
            let done = next.is_trivial();
            series.push(next.clone());
            current = next;
            if done {
                break;
            }
        }
        series
    }

    /// P_{k+1} from P_k: normal closure of the generator commutators
    /// [t, a_i] together with pivot p-th powers.
    fn p_central_step(&self, pk: &Subgroup) -> Subgroup {
        let mut gens: Vec<Element> = Vec::new();
        for t in pk.pivots() {
            for i in 0..self.ngens() {
                let g = self.generator(i).unwrap();
                gens.push(self.commutator_of(t, &g));
            }
            gens.push(self.power(t, self.prime() as i64));
        }
        Subgroup::normal_closure(self, &gens)
    }

    /// The p-class: the length of the p-central series.
    pub fn p_class(&self) -> u32 {
        if self.ngens() == 0 {
            return 0;
        }
        let series = self.p_central_series();
        // series lists P_1, ..., P_c = 1, so the class is its length.
        series.len() as u32
    }

    /// Frattini subgroup P_1(G) = G^p [G, G]. Generator powers and pairwise
    /// generator commutators are stored relation words, so no collection is
    /// needed to seed the closure.
    pub fn frattini_subgroup(&self) -> Subgroup {
        let mut gens: Vec<Element> = Vec::new();
        for i in 0..self.ngens() {
            gens.push(self.element_of_word(self.power_word(i)));
        }
        for j in 1..self.ngens() {
            for i in 0..j {
                let w = self.commutator_word(j, i);
                if !w.is_empty() {
                    gens.push(self.element_of_word(w));
                }
            }
        }
        Subgroup::normal_closure(self, &gens)
    }

    /// Quotient presentation G/N for a normal subgroup N, together with the
    /// surviving generator indices (old index of each new generator).
    ///
    /// Definitions cannot in general be carried through an arbitrary quotient,
    /// so the result is suitable for element arithmetic, orders and sweeps,
    /// but not as input to the covering machinery.
    pub fn quotient_by_normal(&self, n: &Subgroup) -> Result<(PcPresentation, Vec<usize>), PcError> {
        let leads: Vec<usize> = n.pivots().iter().map(|t| t.leading_index().unwrap()).collect();
        let kept: Vec<usize> = (0..self.ngens()).filter(|i| !leads.contains(i)).collect();
        let old_to_new: Vec<Option<usize>> = {
            let mut map = vec![None; self.ngens()];
            for (newi, &old) in kept.iter().enumerate() {
                map[old] = Some(newi);
            }
            map
        };
        let project = |x: &Element| -> Result<Word, PcError> {
            let r = n.sift(self, x.clone());
            let mut w = Vec::new();
            for (g, &e) in r.exponents().iter().enumerate() {
                if e != 0 {
                    let ng = old_to_new[g].ok_or_else(|| {
                        PcError::Malformed("sift residue touches a pivot index; N not normal?".into())
                    })?;
                    w.push((ng, e));
                }
            }
            Ok(w)
        };
        let mut powers = Vec::with_capacity(kept.len());
        for &i in &kept {
            let x = self.element_of_word(self.power_word(i));
            powers.push(project(&x)?);
        }
        let mut commutators = vec![Vec::new(); kept.len() * kept.len().saturating_sub(1) / 2];
        for (newj, &j) in kept.iter().enumerate() {
            for (newi, &i) in kept.iter().enumerate().take(newj) {
                let x = self.element_of_word(self.commutator_word(j, i));
                commutators[crate::pair_index(newj, newi)] = project(&x)?;
            }
        }
        let weights: Vec<u32> = kept.iter().map(|&i| self.weight(i)).collect();
        // Definitions survive only when their source generators do and the
        // projected relation still reads w · a_k; otherwise the generator is
        // orphaned (fine for arithmetic, rejected by the covering machinery).
        let defines = |word: &Word, k: usize| -> bool {
            word.iter().all(|&(g, e)| g < k || (g == k && e == 1))
                && word.iter().any(|&(g, e)| g == k && e == 1)
        };
        let mut definitions = Vec::with_capacity(kept.len());
        for (newk, &k) in kept.iter().enumerate() {
            let def = if weights[newk] == 1 {
                Definition::Initial
            } else {
                match self.definition(k) {
                    Definition::Initial | Definition::Orphan => Definition::Orphan,
                    Definition::Power(j) => match old_to_new[j] {
                        Some(nj) if defines(&powers[nj], newk) => Definition::Power(nj),
                        _ => Definition::Orphan,
                    },
                    Definition::Commutator(j, i) => match (old_to_new[j], old_to_new[i]) {
                        (Some(nj), Some(ni))
                            if defines(&commutators[crate::pair_index(nj, ni)], newk) =>
                        {
                            Definition::Commutator(nj, ni)
                        }
                        _ => Definition::Orphan,
                    },
                }
            };
            definitions.push(def);
        }
        let pres = PcPresentation::new(self.prime(), weights, definitions, powers, commutators)?;
        Ok((pres, kept))
    }

    /// The subgroup G^n generated by all n = p^k th powers, computed as a
    /// fixpoint: seed with generator powers, then sweep the quotient for a
    /// counterexample element of order exceeding n. `sweep_cap` bounds the
    /// quotient size that will be swept exhaustively.
    pub fn power_subgroup(&self, k: u32, sweep_cap: u64) -> Result<SubgroupHandle, PcError> {
        let n_exp = (self.prime() as i64).pow(k);
        let mut w = Subgroup::normal_closure(
            self,
            &(0..self.ngens())
                .map(|i| self.power(&self.generator(i).unwrap(), n_exp))
                .collect::<Vec<_>>(),
        );
        loop {
            let (quot, kept) = self.quotient_by_normal(&w)?;
            let qsize = (quot.prime() as u64).checked_pow(quot.ngens() as u32);
            match qsize {
                Some(s) if s <= sweep_cap => {}
                _ => {
                    return Err(PcError::CapExceeded(format!(
                        "power-subgroup sweep needs p^{} elements (cap {sweep_cap})",
                        quot.ngens()
                    )))
                }
            }
            match find_excessive_order(&quot, n_exp as u64) {
                None => break,
                Some(witness) => {
                    // Lift the witness to G and adjoin its n-th power.
                    let mut lift = self.identity();
                    for (qi, &e) in witness.exponents().iter().enumerate() {
                        if e != 0 {
                            lift = self.multiply_by_generator(&lift, kept[qi], e);
                        }
                    }
                    let pw = self.power(&lift, n_exp);
                    debug_assert!(!w.contains(self, &pw));
                    let mut gens: Vec<Element> = w.pivots().to_vec();
                    gens.push(pw);
                    w = Subgroup::normal_closure(self, &gens);
                }
            }
        }
        Ok(SubgroupHandle::new(self, w))
    }
}

/// Scan all elements of `quot` in mixed-radix order for one with x^n != 1.
fn find_excessive_order(quot: &PcPresentation, n: u64) -> Option<Element> {
    let ngens = quot.ngens();
    if ngens == 0 {
        return None;
    }
    let p = quot.prime();
    let mut digits = vec![0u32; ngens];
    loop {
        // Increment first: the identity needs no test.
        let mut pos = ngens;
        loop {
            if pos == 0 {
                return None;
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < p {
                break;
            }
            digits[pos] = 0;
        }
        let x = Element::from_exponents(quot, digits.clone()).unwrap();
        if !quot.power(&x, n as i64).is_identity() {
            return Some(x);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::fixtures::*;

    #[test]
    fn p_class_of_standard_groups() {
        assert_eq!(PcPresentation::elementary_abelian(2, 4).p_class(), 1);
        assert_eq!(dihedral8().p_class(), 2);
        assert_eq!(quaternion8().p_class(), 2);
        assert_eq!(cyclic4().p_class(), 2);
        assert_eq!(PcPresentation::trivial(2).p_class(), 0);
    }

    #[test]
    fn series_strictly_descends() {
        let d4 = dihedral8();
        let series = d4.p_central_series();
        let mut prev = d4.ngens();
        for s in &series {
            assert!(s.rank() < prev, "series must strictly descend");
            prev = s.rank();
        }
        assert!(series.last().unwrap().is_trivial());
    }

    #[test]
    fn power_subgroup_examples() {
        // Exponent-2 group: squares are trivial, index 2^4.
        let e = PcPresentation::elementary_abelian(2, 4);
        let h = e.power_subgroup(1, 1 << 20).unwrap();
        assert!(h.subgroup.is_trivial());
        assert_eq!(h.index_exponent, 4);

        // Q8: squares generate the center, index 4, abelian.
        let q8 = quaternion8();
        let h = q8.power_subgroup(1, 1 << 20).unwrap();
        assert_eq!(h.index_exponent, 2);
        assert!(h.subgroup.is_abelian(&q8));
        assert!(h.is_normal);
        // G^4 is trivial.
        let h4 = q8.power_subgroup(2, 1 << 20).unwrap();
        assert!(h4.subgroup.is_trivial());
    }

    #[test]
    fn quotient_by_center_of_q8() {
        let q8 = quaternion8();
        let z = Subgroup::from_generators(&q8, &[q8.generator(2).unwrap()]);
        let (quot, kept) = q8.quotient_by_normal(&z).unwrap();
        assert_eq!(quot.ngens(), 2);
        assert_eq!(kept, vec![0, 1]);
        assert!(quot.consistency_check());
        // Q8 / Z ~ (Z/2)^2
        assert_eq!(quot.p_class(), 1);
    }

    #[test]
    fn frattini_matches_first_series_term() {
        for pres in [dihedral8(), quaternion8(), cyclic4()] {
            let f = pres.frattini_subgroup();
            let s = &pres.p_central_series()[0];
            assert_eq!(f.canonical_key(&pres), s.canonical_key(&pres));
        }
    }
}
