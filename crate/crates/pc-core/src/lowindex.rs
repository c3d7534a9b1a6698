//! Low-index subgroups up to conjugacy, with lattice incidence between
//! consecutive index levels. Canonical order: (index, sorted abelianization,
//! lexicographically least reduced generator matrix).

use std::collections::HashMap;

use crate::element::Element;
use crate::error::PcError;
use crate::linalg::rref_mod_p;
use crate::presentation::PcPresentation;
use crate::subgroup::{Subgroup, SubgroupHandle};

/// One conjugacy class of subgroups: the canonical representative handle plus
/// every member of the class (needed for incidence tests).
#[derive(Debug, Clone)]
pub struct SubgroupClass {
    pub handle: SubgroupHandle,
    pub members: Vec<Subgroup>,
    pub class_size: usize,
}

/// Subgroup lattice down to a fixed index level.
#[derive(Debug, Clone)]
pub struct LowIndexLattice {
    /// levels[k] = conjugacy classes of subgroups of index p^(k+1), in
    /// canonical order.
    pub levels: Vec<Vec<SubgroupClass>>,
    /// (level, upper class, lower class): class `lower` at `level+1` is
    /// contained (up to conjugacy) in class `upper` at `level`.
    pub incidence: Vec<(usize, usize, usize)>,
}

impl PcPresentation {
    /// Conjugacy classes of subgroups of index exactly p^k for k = 1..=max_exp.
    pub fn low_index_subgroups(&self, max_exp: u32) -> Result<LowIndexLattice, PcError> {
        let mut levels: Vec<Vec<SubgroupClass>> = Vec::new();
        let mut incidence = Vec::new();
        for k in 1..=max_exp {
            let candidates = if k == 1 {
                self.maximal_subgroups_in(&Subgroup::whole_group(self))?
            } else {
                let mut seen: HashMap<Vec<u32>, Subgroup> = HashMap::new();
                for class in &levels[(k - 2) as usize] {
                    for member in &class.members {
                        for sub in self.maximal_subgroups_in(member)? {
                            seen.entry(sub.canonical_key(self)).or_insert(sub);
                        }
                    }
                }
                seen.into_values().collect()
            };
            let classes = self.conjugacy_classes_of(candidates);
            if k >= 2 {
                let upper = &levels[(k - 2) as usize];
                for (lo, class) in classes.iter().enumerate() {
                    let rep = &class.handle.subgroup;
                    for (up, uclass) in upper.iter().enumerate() {
                        if uclass.members.iter().any(|m| m.contains_subgroup(self, rep)) {
                            incidence.push(((k - 2) as usize, up, lo));
                        }
                    }
                }
            }
            levels.push(classes);
        }
        Ok(LowIndexLattice { levels, incidence })
    }

    /// The multiset of abelianizations over conjugacy classes of subgroups of
    /// index exactly p^level_exp, sorted.
    pub fn abelianization_profile(
        &self,
        level_exp: u32,
    ) -> Result<Vec<crate::abelian::AbelianInvariants>, PcError> {
        let lattice = self.low_index_subgroups(level_exp)?;
        let classes = &lattice.levels[(level_exp - 1) as usize];
        let mut profile: Vec<_> =
            classes.iter().map(|c| c.handle.abelianization(self).clone()).collect();
        profile.sort();
        Ok(profile)
    }

    /// Maximal subgroups of H: preimages of the hyperplanes of H/Phi(H).
    pub fn maximal_subgroups_in(&self, h: &Subgroup) -> Result<Vec<Subgroup>, PcError> {
        let p = self.prime();
        let frat = self.frattini_of_subgroup(h);
        // Coset basis of H over Phi(H): pivots of H that sift nontrivially.
        let mut frat_ext = frat.clone();
        let mut basis: Vec<Element> = Vec::new();
        for t in h.pivots() {
            let r = frat_ext.sift(self, t.clone());
            if !r.is_identity() {
                basis.push(t.clone());
                // Extend so later pivots are reduced against the span so far.
                frat_ext = Subgroup::from_generators(
                    self,
                    &frat_ext.pivots().iter().cloned().chain([t.clone()]).collect::<Vec<_>>(),
                );
            }
        }
        let d = basis.len();
        if d == 0 {
            return Ok(Vec::new());
        }
        if d > 24 {
            return Err(PcError::CapExceeded(format!("subgroup has {d} minimal generators")));
        }
        // Hyperplanes of F_p^d: kernels of nonzero functionals up to scalars.
        let mut result = Vec::new();
        for functional in normalized_functionals(d, p) {
            // Kernel basis of the functional.
            let mut kernel_rows: Vec<Vec<u32>> = Vec::new();
            for v in hyperplane_basis(&functional, p) {
                kernel_rows.push(v);
            }
            let mut gens: Vec<Element> = frat.pivots().to_vec();
            for row in &kernel_rows {
                let mut acc = self.identity();
                for (c, b) in row.iter().zip(&basis) {
                    if *c != 0 {
                        acc = self.multiply(&acc, &self.power(b, *c as i64));
                    }
                }
                gens.push(acc);
            }
            result.push(Subgroup::from_generators(self, &gens));
        }
        Ok(result)
    }

    /// Frattini subgroup of a subgroup H (as an abstract group): H^p [H, H].
    fn frattini_of_subgroup(&self, h: &Subgroup) -> Subgroup {
        let mut gens: Vec<Element> = Vec::new();
        for (a, s) in h.pivots().iter().enumerate() {
            gens.push(self.power(s, self.prime() as i64));
            for t in &h.pivots()[a + 1..] {
                gens.push(self.commutator_of(t, s));
            }
        }
        // Closure inside H: plain subgroup closure suffices ([H,H]H^p is
        // generated by these as a subgroup once commutators of pivots are in).
        let mut sub = Subgroup::from_generators(self, &gens);
        // Normal closure within H: commutate with H's pivots until stable.
        loop {
            let mut extra: Vec<Element> = Vec::new();
            for t in sub.pivots() {
                for s in h.pivots() {
                    let c = self.commutator_of(t, s);
                    if !sub.contains(self, &c) {
                        extra.push(c);
                    }
                }
            }
            if extra.is_empty() {
                return sub;
            }
            let mut gens: Vec<Element> = sub.pivots().to_vec();
            gens.extend(extra);
            sub = Subgroup::from_generators(self, &gens);
        }
    }

    /// Partition subgroups into conjugacy classes and order them canonically.
    fn conjugacy_classes_of(&self, subs: Vec<Subgroup>) -> Vec<SubgroupClass> {
        let mut by_key: HashMap<Vec<u32>, Subgroup> = HashMap::new();
        for s in subs {
            by_key.entry(s.canonical_key(self)).or_insert(s);
        }
        let mut classes: Vec<SubgroupClass> = Vec::new();
        let mut assigned: HashMap<Vec<u32>, usize> = HashMap::new();
        let mut keys: Vec<Vec<u32>> = by_key.keys().cloned().collect();
        keys.sort();
        for key in keys {
            if assigned.contains_key(&key) {
                continue;
            }
            let seed = by_key[&key].clone();
            // Orbit under conjugation by the pc generators.
            let mut orbit: Vec<Subgroup> = vec![seed.clone()];
            let mut orbit_keys: Vec<Vec<u32>> = vec![key.clone()];
            let mut frontier = vec![seed];
            while let Some(s) = frontier.pop() {
                for i in 0..self.ngens() {
                    let g = self.generator(i).unwrap();
                    let c = s.conjugate(self, &g);
                    let ck = c.canonical_key(self);
                    if !orbit_keys.contains(&ck) {
                        orbit_keys.push(ck);
                        orbit.push(c.clone());
                        frontier.push(c);
                    }
                }
            }
            let class_size = orbit.len();
            // Canonical representative: least canonical key in the orbit.
            let (min_idx, _) = orbit_keys.iter().enumerate().min_by_key(|&(_, k)| k).unwrap();
            let rep = orbit[min_idx].clone();
            for k in &orbit_keys {
                assigned.insert(k.clone(), classes.len());
                // Mark every orbit member as assigned even if it was not in
                // the candidate list (conjugates of listed subgroups).
            }
            classes.push(SubgroupClass {
                handle: SubgroupHandle::new(self, rep),
                members: orbit,
                class_size,
            });
        }
        // Canonical order: (index, abelianization, canonical key).
        classes.sort_by_cached_key(|c| {
            (
                c.handle.index_exponent,
                c.handle.abelianization(self).clone(),
                c.handle.subgroup.canonical_key(self),
            )
        });
        classes
    }
}

/// All nonzero functionals on F_p^d with first nonzero coordinate 1.
fn normalized_functionals(d: usize, p: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut v = vec![0u32; d];
    loop {
        let mut pos = d;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            v[pos] += 1;
            if v[pos] < p {
                break;
            }
            v[pos] = 0;
        }
        if v.iter().find(|&&c| c != 0) == Some(&1) {
            out.push(v.clone());
        }
    }
}

/// Basis of the kernel of a nonzero functional on F_p^d.
fn hyperplane_basis(functional: &[u32], p: u32) -> Vec<Vec<u32>> {
    let d = functional.len();
    let mut rows = vec![functional.to_vec()];
    let pivots = rref_mod_p(&mut rows, p);
    let pivot = pivots[0];
    let mut basis = Vec::new();
    for j in 0..d {
        if j == pivot {
            continue;
        }
        let mut v = vec![0u32; d];
        v[j] = 1;
        // Solve functional · v = 0 by adjusting the pivot coordinate.
        let c = rows[0][j] % p;
        v[pivot] = (p - c) % p;
        basis.push(v);
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::AbelianInvariants;
    use crate::presentation::fixtures::*;

    #[test]
    fn elementary_abelian_rank4_has_15_index2() {
        let e = PcPresentation::elementary_abelian(2, 4);
        let lat = e.low_index_subgroups(1).unwrap();
        assert_eq!(lat.levels[0].len(), 15);
        assert!(lat.levels[0].iter().all(|c| c.handle.is_normal));
        let profile = e.abelianization_profile(1).unwrap();
        assert!(profile.iter().all(|ab| *ab == AbelianInvariants::new(2, vec![1, 1, 1])));
    }

    #[test]
    fn elementary_abelian_rank2_has_3_index2() {
        let e = PcPresentation::elementary_abelian(2, 2);
        let lat = e.low_index_subgroups(1).unwrap();
        assert_eq!(lat.levels[0].len(), 3);
    }

    #[test]
    fn d4_subgroup_counts() {
        // D4 has 3 subgroups of index 2 (all normal) and 3 conjugacy classes
        // of index 4: the center plus two classes of non-normal order-2s.
        let d4 = dihedral8();
        let lat = d4.low_index_subgroups(2).unwrap();
        assert_eq!(lat.levels[0].len(), 3);
        assert_eq!(lat.levels[1].len(), 3);
        let normal_count = lat.levels[1].iter().filter(|c| c.handle.is_normal).count();
        assert_eq!(normal_count, 1);
        // Incidence: every index-4 class sits inside at least one index-2 class.
        for (lo, _) in lat.levels[1].iter().enumerate() {
            assert!(lat.incidence.iter().any(|&(lv, _, l)| lv == 0 && l == lo));
        }
    }

    #[test]
    fn q8_has_unique_index4_subgroup() {
        let q8 = quaternion8();
        let lat = q8.low_index_subgroups(2).unwrap();
        assert_eq!(lat.levels[0].len(), 3);
        assert_eq!(lat.levels[1].len(), 1, "Q8: the center is the only index-4 subgroup");
        assert!(lat.levels[1][0].handle.is_normal);
    }
}
