//! Index-stabilization test: if the index of V(N) is the same in a group and
//! in one of its children, it is the same in every further descendant, so a
//! tracked verbal-subgroup quotient is frozen from that point on.

use pc_core::{AbelianInvariants, Element, PcPresentation, Subgroup};

use crate::error::FilterError;
use crate::fixture::ArithmeticFixture;

/// How to pick the tracked normal subgroup consistently in parent and child.
#[derive(Debug, Clone)]
pub enum SubgroupSelector {
    WholeGroup,
    /// The index-p^2 class with this abelianization, unique in the fixture.
    CriticalByAb(AbelianInvariants),
    /// The index-p class with this abelianization (must be unique).
    Index2ByAb(AbelianInvariants),
}

/// The verbal functionals the search uses.
#[derive(Debug, Clone, Copy)]
pub enum WordFunctional {
    /// V(N) = N (trivially frozen).
    Identity,
    /// V(N) generated by the p^k-th powers of N.
    PowerSubgroup(u32),
    /// V(N) = [N, N].
    DerivedSubgroup,
}

/// True iff [parent : V(N_parent)] = [child : V(N_child)], which freezes the
/// value for all descendants of the child. Errors if N is not normal.
pub fn nover_criterion(
    parent: &PcPresentation,
    child: &PcPresentation,
    selector: &SubgroupSelector,
    functional: WordFunctional,
    fixture: Option<&ArithmeticFixture>,
) -> Result<bool, FilterError> {
    let ip = tracked_index(parent, selector, functional, fixture)?;
    let ic = tracked_index(child, selector, functional, fixture)?;
    Ok(ip == ic)
}

/// log_p [G : V(N)] for the selected subgroup.
pub fn tracked_index(
    pres: &PcPresentation,
    selector: &SubgroupSelector,
    functional: WordFunctional,
    fixture: Option<&ArithmeticFixture>,
) -> Result<u32, FilterError> {
    let n = resolve_selector(pres, selector, fixture)?;
    if !n.is_normal(pres) {
        return Err(FilterError::NotNormal);
    }
    let v = verbal_subgroup(pres, &n, functional)?;
    Ok(v.index_exponent(pres))
}

pub fn resolve_selector(
    pres: &PcPresentation,
    selector: &SubgroupSelector,
    fixture: Option<&ArithmeticFixture>,
) -> Result<Subgroup, FilterError> {
    match selector {
        SubgroupSelector::WholeGroup => Ok(Subgroup::whole_group(pres)),
        SubgroupSelector::CriticalByAb(ab) => {
            if let Some(f) = fixture {
                let uniques = crate::fixture::multiplicity_one(&f.index4_profile);
                if !uniques.contains(ab) {
                    return Err(FilterError::Selector(format!(
                        "{ab} is not a critical abelianization in the fixture"
                    )));
                }
            }
            unique_class_by_ab(pres, 2, ab)
        }
        SubgroupSelector::Index2ByAb(ab) => unique_class_by_ab(pres, 1, ab),
    }
}

fn unique_class_by_ab(
    pres: &PcPresentation,
    level: u32,
    ab: &AbelianInvariants,
) -> Result<Subgroup, FilterError> {
    let lattice = pres.low_index_subgroups(level)?;
    let classes = &lattice.levels[(level - 1) as usize];
    let hits: Vec<_> =
        classes.iter().filter(|c| c.handle.abelianization(pres) == ab).collect();
    match hits.len() {
        1 => Ok(hits[0].handle.subgroup.clone()),
        0 => Err(FilterError::Selector(format!("no index-level-{level} class with {ab}"))),
        n => Err(FilterError::Selector(format!("{n} classes share {ab}"))),
    }
}

/// V(N) inside the ambient group, for N normal in G. The power functional
/// uses a quotient sweep: grow a candidate W (normal in G, since V(N) is),
/// and look for elements of the image of N in G/W whose p^k-th power is
/// nontrivial there.
pub fn verbal_subgroup(
    pres: &PcPresentation,
    n: &Subgroup,
    functional: WordFunctional,
) -> Result<Subgroup, FilterError> {
    match functional {
        WordFunctional::Identity => Ok(n.clone()),
        WordFunctional::DerivedSubgroup => Ok(derived_in(pres, n)),
        WordFunctional::PowerSubgroup(k) => {
            let e = (pres.prime() as i64).pow(k);
            let sweep_cap = 1u64 << 22;
            let mut w = Subgroup::normal_closure(
                pres,
                &n.pivots().iter().map(|t| pres.power(t, e)).collect::<Vec<_>>(),
            );
            loop {
                let (quot, kept) = pres.quotient_by_normal(&w)?;
                // Image of N in the quotient.
                let project = |x: &Element| -> Element {
                    let r = w.sift(pres, x.clone());
                    let mut exps = vec![0u32; kept.len()];
                    for (qi, &old) in kept.iter().enumerate() {
                        exps[qi] = r.exponents()[old];
                    }
                    Element::from_exponents(&quot, exps).unwrap()
                };
                let n_img = Subgroup::from_generators(
                    &quot,
                    &n.pivots().iter().map(|t| project(t)).collect::<Vec<_>>(),
                );
                let mut witness: Option<Element> = None;
                for x in n_img.elements(&quot, sweep_cap)? {
                    if !quot.power(&x, e).is_identity() {
                        witness = Some(x);
                        break;
                    }
                }
                match witness {
                    None => return Ok(w),
                    Some(x) => {
                        // Lift the witness to G and adjoin its p^k-th power.
                        let mut lift = pres.identity();
                        for (qi, &d) in x.exponents().iter().enumerate() {
                            if d != 0 {
                                lift = pres.multiply_by_generator(&lift, kept[qi], d);
                            }
                        }
                        let pw = pres.power(&lift, e);
                        debug_assert!(!w.contains(pres, &pw));
                        let mut gens: Vec<Element> = w.pivots().to_vec();
                        gens.push(pw);
                        w = Subgroup::normal_closure(pres, &gens);
                    }
                }
            }
        }
    }
}

/// [N, N], closed under conjugation by N.
fn derived_in(pres: &PcPresentation, n: &Subgroup) -> Subgroup {
    let mut gens: Vec<Element> = Vec::new();
    for (a, s) in n.pivots().iter().enumerate() {
        for t in &n.pivots()[a + 1..] {
            gens.push(pres.commutator_of(t, s));
        }
    }
    close_normal_in(pres, n, Subgroup::from_generators(pres, &gens))
}

/// Close a subgroup of N under conjugation by N's generators.
fn close_normal_in(pres: &PcPresentation, n: &Subgroup, mut sub: Subgroup) -> Subgroup {
    loop {
        let mut extra: Vec<Element> = Vec::new();
        for t in sub.pivots() {
            for s in n.pivots() {
                let c = pres.conjugate(t, s);
                if !sub.contains(pres, &c) {
                    extra.push(c);
                }
            }
        }
        if extra.is_empty() {
            return sub;
        }
        let mut gens: Vec<Element> = sub.pivots().to_vec();
        gens.extend(extra);
        sub = Subgroup::from_generators(pres, &gens);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use tree::fp::builtin;
    use tree::{p_quotient, Limits};

    #[test]
    fn identity_functional_always_freezes() {
        let limits = Limits::default();
        let fp = builtin("ex93").unwrap();
        let q2 = p_quotient(&fp, 2, 2, &limits).unwrap().group;
        let q3 = p_quotient(&fp, 2, 3, &limits).unwrap().group;
        assert!(nover_criterion(
            &q2,
            &q3,
            &SubgroupSelector::WholeGroup,
            WordFunctional::Identity,
            None
        )
        .unwrap());
    }

    #[test]
    fn fourth_powers_freeze_for_ex93() {
        let mut limits = Limits::default();
        limits.max_ngens = 400;
        let fp = builtin("ex93").unwrap();
        let q2 = p_quotient(&fp, 2, 2, &limits).unwrap().group;
        let q3 = p_quotient(&fp, 2, 3, &limits).unwrap().group;
        let q4 = p_quotient(&fp, 2, 4, &limits).unwrap().group;
        // At class 2 every fourth power is trivial (index 2^9); the index
        // reaches 2^11 at class 3 and freezes there.
        let sel = SubgroupSelector::WholeGroup;
        let f = WordFunctional::PowerSubgroup(2);
        assert_eq!(tracked_index(&q2, &sel, f, None).unwrap(), 9);
        assert!(!nover_criterion(&q2, &q3, &sel, f, None).unwrap());
        assert!(nover_criterion(&q3, &q4, &sel, f, None).unwrap());
        assert_eq!(tracked_index(&q4, &sel, f, None).unwrap(), 11);
    }

    #[test]
    fn squares_index_grows_down_the_tree_of_rank2() {
        // (Z/2)^2 has [G : G^2] = 4; its order-8 children have [G : G^2] = 4
        // as well (d = 2), but fourth powers jump from trivial-at-the-root.
        let limits = Limits::default();
        let root = pc_core::PcPresentation::elementary_abelian(2, 2);
        let child = tree::immediate_descendants(&root, &limits)
            .unwrap()
            .children
            .into_iter()
            .map(|c| c.presentation)
            .find(|p| p.ngens() == 3)
            .unwrap();
        let sel = SubgroupSelector::WholeGroup;
        assert!(
            nover_criterion(&root, &child, &sel, WordFunctional::PowerSubgroup(1), None).unwrap(),
            "[G : G^2] = 2^d is constant down the tree"
        );
        assert!(
            !nover_criterion(&root, &child, &sel, WordFunctional::PowerSubgroup(2), None).unwrap(),
            "the index of G^4 grows from the root to an order-8 child"
        );
    }

    #[test]
    fn non_normal_selector_is_an_error() {
        // D4's non-normal order-2 subgroups: selecting one by abelianization
        // must be refused.
        let d4 = pc_core::PcPresentation::new(
            2,
            vec![1, 1, 2],
            vec![
                pc_core::Definition::Initial,
                pc_core::Definition::Initial,
                pc_core::Definition::Commutator(1, 0),
            ],
            vec![vec![], vec![(2, 1)], vec![]],
            vec![vec![(2, 1)], vec![], vec![]],
        )
        .unwrap();
        // Index-4 classes of D4: center [2] (normal) and two non-normal [2]s:
        // the abelianization [2] is shared, so the selector is ambiguous.
        let r = tracked_index(
            &d4,
            &SubgroupSelector::CriticalByAb(AbelianInvariants::new(2, vec![1])),
            WordFunctional::Identity,
            None,
        );
        assert!(r.is_err());
    }
}
