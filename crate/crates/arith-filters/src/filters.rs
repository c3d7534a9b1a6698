//! The pruning predicates: relator-rank bound, Golod-Shafarevich, profile
//! matching at index p and p^2, critical-subgroup tracking, capitulation.

use pc_core::{AbelianInvariants, PcPresentation, SubgroupHandle};
use tree::cover::p_covering_group;
use tree::Limits;

use crate::error::FilterError;
use crate::fixture::{maximal_profile_of, multiplicity_one, ArithmeticFixture};
use crate::transfer::transfer_map;
use crate::verdict::FilterVerdict;

/// Candidate quotients of a group with r relators must keep
/// multiplicator rank - nuclear rank at most r.
pub fn relator_bound_filter(
    pres: &PcPresentation,
    rmax: u32,
    limits: &Limits,
) -> Result<FilterVerdict, FilterError> {
    let cov = p_covering_group(pres, limits)?;
    let bound = cov.multiplicator_rank() as i64 - cov.nuclear_rank() as i64;
    if bound <= rmax as i64 {
        Ok(FilterVerdict::pass("relator-bound"))
    } else {
        Ok(FilterVerdict::fail(
            "relator-bound",
            format!(
                "multiplicator rank {} - nuclear rank {} = {bound} > {rmax}",
                cov.multiplicator_rank(),
                cov.nuclear_rank()
            ),
        ))
    }
}

/// Lower and upper bounds for the relator rank of a pro-p group with the
/// given quotient: mult rank - nuclear rank <= r <= d + 1.
pub fn relator_rank_bounds(
    pres: &PcPresentation,
    limits: &Limits,
) -> Result<(u32, u32), FilterError> {
    let cov = p_covering_group(pres, limits)?;
    let lo = (cov.multiplicator_rank() - cov.nuclear_rank()) as u32;
    let hi = pres.dgens() as u32 + 1;
    Ok((lo, hi))
}

/// True iff r <= d^2/4, which forces the pro-p group infinite. The trivial
/// case d = 0 is finite by fiat.
pub fn golod_shafarevich_infinite(d: u64, r: u64) -> bool {
    d > 0 && 4 * r <= d * d
}

/// Abelianization-equality filter against the fixture target.
pub fn abelianization_filter(
    pres: &PcPresentation,
    fixture: &ArithmeticFixture,
) -> FilterVerdict {
    let ab = pc_core::abelian::abelian_invariants(pres);
    if ab == fixture.target_ab {
        FilterVerdict::pass("abelianization")
    } else {
        FilterVerdict::fail("abelianization", format!("{ab} != target {}", fixture.target_ab))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchMode {
    /// Multiset equality.
    Exact,
    /// Each computed entry must match a distinct fixture entry it could be a
    /// quotient of (class-c quotients truncate the true abelianizations).
    QuotientCompatible,
}

/// Match the candidate's abelianization profile at index p^level against the
/// fixture's, by perfect matching under the chosen compatibility relation.
pub fn profile_filter(
    pres: &PcPresentation,
    fixture: &ArithmeticFixture,
    level: u32,
    mode: MatchMode,
) -> Result<FilterVerdict, FilterError> {
    let name = format!("profile{}", (fixture.prime as u64).pow(level));
    let computed = pres.abelianization_profile(level)?;
    let expected = match level {
        1 => &fixture.index2_profile,
        2 => &fixture.index4_profile,
        _ => return Err(FilterError::Fixture(format!("no fixture profile at level {level}"))),
    };
    Ok(match_profiles(&name, &computed, expected, mode))
}

/// Perfect-matching test between two multisets of invariants.
pub fn match_profiles(
    name: &str,
    computed: &[AbelianInvariants],
    expected: &[AbelianInvariants],
    mode: MatchMode,
) -> FilterVerdict {
    if computed.len() != expected.len() {
        return FilterVerdict::fail(
            name,
            format!("{} subgroup classes, fixture has {}", computed.len(), expected.len()),
        );
    }
    match mode {
        MatchMode::Exact => {
            // Both sides sorted: equality is the perfect matching.
            let mut a = computed.to_vec();
            let mut b = expected.to_vec();
            a.sort();
            b.sort();
            if a == b {
                FilterVerdict::pass(name)
            } else {
                let witness = a
                    .iter()
                    .zip(&b)
                    .find(|(x, y)| x != y)
                    .map(|(x, y)| format!("computed {x} vs fixture {y}"))
                    .unwrap_or_else(|| "profile mismatch".into());
                FilterVerdict::fail(name, witness)
            }
        }
        MatchMode::QuotientCompatible => {
            match bipartite_match(computed, expected, |c, e| c.is_quotient_of(e)) {
                None => FilterVerdict::pass(name),
                Some(unmatched) => FilterVerdict::fail(
                    name,
                    format!("{} has no compatible fixture entry", computed[unmatched]),
                ),
            }
        }
    }
}

/// Hopcroft-Karp-style augmenting matching; returns None when perfect, else
/// an unmatched left index.
fn bipartite_match<T, F: Fn(&T, &T) -> bool>(
    left: &[T],
    right: &[T],
    compatible: F,
) -> Option<usize> {
    let n = left.len();
    let mut match_right: Vec<Option<usize>> = vec![None; right.len()];
    let adj: Vec<Vec<usize>> = left
        .iter()
        .map(|l| (0..right.len()).filter(|&r| compatible(l, &right[r])).collect())
        .collect();
    fn augment(
        u: usize,
        adj: &[Vec<usize>],
        match_right: &mut [Option<usize>],
        seen: &mut [bool],
    ) -> bool {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                if match_right[v].is_none()
                    || augment(match_right[v].unwrap(), adj, match_right, seen)
                {
                    match_right[v] = Some(u);
                    return true;
                }
            }
        }
        false
    }
    for u in 0..n {
        let mut seen = vec![false; right.len()];
        if !augment(u, &adj, &mut match_right, &mut seen) {
            return Some(u);
        }
    }
    None
}

/// The index-p^2 subgroup classes whose abelianization is unique in the
/// fixture profile; exactly one class per critical abelianization, or an
/// indeterminate verdict on ambiguity.
pub fn critical_subgroups(
    pres: &PcPresentation,
    fixture: &ArithmeticFixture,
) -> Result<Result<Vec<SubgroupHandle>, FilterVerdict>, FilterError> {
    let lattice = pres.low_index_subgroups(2)?;
    let level4 = &lattice.levels[1];
    let fixture_uniques = multiplicity_one(&fixture.index4_profile);
    let mut out = Vec::new();
    for c in &fixture.critical_profiles {
        debug_assert!(fixture_uniques.contains(&c.ab));
        let hits: Vec<_> =
            level4.iter().filter(|cl| cl.handle.abelianization(pres) == &c.ab).collect();
        match hits.len() {
            0 => {
                return Ok(Err(FilterVerdict::fail(
                    "critical",
                    format!("no index-{}^2 class with abelianization {}", pres.prime(), c.ab),
                )))
            }
            1 => out.push(hits[0].handle.clone()),
            n => {
                return Ok(Err(FilterVerdict::indeterminate(
                    "critical",
                    format!("{n} classes share the abelianization {}; tracking is ambiguous", c.ab),
                )))
            }
        }
    }
    Ok(Ok(out))
}

/// Critical-subgroup filter: each tracked subgroup's maximal-subgroup profile
/// must match the fixture's (Prop 5.2 data) under the chosen mode.
pub fn critical_filter(
    pres: &PcPresentation,
    fixture: &ArithmeticFixture,
    mode: MatchMode,
) -> Result<FilterVerdict, FilterError> {
    let handles = match critical_subgroups(pres, fixture)? {
        Ok(h) => h,
        Err(verdict) => return Ok(verdict),
    };
    for (handle, c) in handles.iter().zip(&fixture.critical_profiles) {
        let computed = maximal_profile_of(pres, &handle.subgroup)?;
        let verdict = match_profiles("critical", &computed, &c.maximal_profile, mode);
        if !verdict.passed() {
            return Ok(FilterVerdict::fail(
                "critical",
                format!(
                    "critical {} profile: {}",
                    c.ab,
                    verdict.witness.unwrap_or_default()
                ),
            ));
        }
    }
    Ok(FilterVerdict::pass("critical"))
}

/// Capitulation: for every fixture-known index-p subgroup, the kernel of the
/// group-theoretic transfer must match the field-theoretic kernel under the
/// canonical correspondence. Indeterminate without fixture kernel data.
pub fn capitulation_filter(
    pres: &PcPresentation,
    fixture: &ArithmeticFixture,
    limits: &Limits,
) -> Result<FilterVerdict, FilterError> {
    let Some(entries) = fixture.capitulation.as_ref().filter(|e| !e.is_empty()) else {
        return Ok(FilterVerdict::indeterminate(
            "capitulation",
            "fixture carries no kernel data".into(),
        ));
    };
    // Precondition: index-p abelianizations must match the fixture exactly,
    // so that the correspondence is meaningful.
    let pre = profile_filter(pres, fixture, 1, MatchMode::Exact)?;
    if !pre.passed() {
        return Ok(FilterVerdict::indeterminate(
            "capitulation",
            format!("index-{} profile precondition failed", pres.prime()),
        ));
    }
    let lattice = pres.low_index_subgroups(2)?;
    let level2 = &lattice.levels[0];
    // Lattice fingerprint per class: sorted index-p^2 abelianizations below it.
    let fingerprint = |class_idx: usize| -> Vec<AbelianInvariants> {
        let mut f: Vec<_> = lattice
            .incidence
            .iter()
            .filter(|&&(lv, up, _)| lv == 0 && up == class_idx)
            .map(|&(_, _, lo)| lattice.levels[1][lo].handle.abelianization(pres).clone())
            .collect();
        f.sort();
        f
    };
    for entry in entries {
        let hits: Vec<usize> = (0..level2.len())
            .filter(|&i| {
                level2[i].handle.abelianization(pres) == &entry.subgroup_ab
                    && entry.contains4.as_ref().map_or(true, |want| &fingerprint(i) == want)
            })
            .collect();
        let class = match hits.len() {
            1 => &level2[hits[0]],
            0 => {
                return Ok(FilterVerdict::fail(
                    "capitulation",
                    format!("no index-{} class matches key {}", pres.prime(), entry.subgroup_ab),
                ))
            }
            n => {
                return Ok(FilterVerdict::indeterminate(
                    "capitulation",
                    format!(
                        "{n} classes share the correspondence key {}; refusing to guess",
                        entry.subgroup_ab
                    ),
                ))
            }
        };
        let data = transfer_map(pres, &class.handle, limits)?;
        if data.kernel_invariants != entry.kernel_invariants {
            return Ok(FilterVerdict::fail(
                "capitulation",
                format!(
                    "transfer kernel {} != fixture kernel {} at {}",
                    data.kernel_invariants, entry.kernel_invariants, entry.subgroup_ab
                ),
            ));
        }
    }
    Ok(FilterVerdict::pass("capitulation"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golod_shafarevich_boundaries() {
        assert!(golod_shafarevich_infinite(5, 6), "6 <= 25/4");
        assert!(!golod_shafarevich_infinite(4, 5), "5 > 4");
        assert!(!golod_shafarevich_infinite(0, 0), "trivial group is finite");
        assert!(golod_shafarevich_infinite(4, 4));
    }

    #[test]
    fn relator_bound_monotone_and_boundary() {
        let limits = Limits::default();
        let e = PcPresentation::elementary_abelian(2, 4);
        // mult 10 - nuc 10 = 0: passes any bound.
        assert!(relator_bound_filter(&e, 1, &limits).unwrap().passed());
        let (lo, hi) = relator_rank_bounds(&e, &limits).unwrap();
        assert_eq!(lo, 0);
        assert_eq!(hi, 5);
    }

    #[test]
    fn profile_self_match() {
        let e = PcPresentation::elementary_abelian(2, 4);
        let f = ArithmeticFixture::from_group(&e).unwrap();
        assert!(profile_filter(&e, &f, 1, MatchMode::Exact).unwrap().passed());
        assert!(profile_filter(&e, &f, 2, MatchMode::Exact).unwrap().passed());
        assert!(profile_filter(&e, &f, 1, MatchMode::QuotientCompatible).unwrap().passed());
    }

    #[test]
    fn profile_against_q5460_fails_for_wrong_group() {
        let e = PcPresentation::elementary_abelian(2, 4);
        let f = ArithmeticFixture::q5460();
        // (Z/2)^4 has fifteen [2,2,2] index-2 subgroups, not the field data.
        let v = profile_filter(&e, &f, 1, MatchMode::Exact).unwrap();
        assert!(v.prunes());
        assert!(v.witness.is_some());
    }

    #[test]
    fn quotient_compatible_accepts_truncations() {
        // [2,2,2] is a quotient of [2,4,4] etc., so the root's index-2 profile
        // is compatible with the field data even though not equal.
        let e = PcPresentation::elementary_abelian(2, 4);
        let f = ArithmeticFixture::q5460();
        let v = profile_filter(&e, &f, 1, MatchMode::QuotientCompatible).unwrap();
        assert!(v.passed());
    }

    #[test]
    fn critical_subgroup_edge_cases() {
        // All-distinct profile: every class is critical.
        let e = PcPresentation::elementary_abelian(2, 2);
        let f = ArithmeticFixture::from_group(&e).unwrap();
        // (Z/2)^2 at index 4 has one class (trivial subgroup), so unique.
        let crit = critical_subgroups(&e, &f).unwrap().unwrap();
        assert_eq!(crit.len(), f.critical_profiles.len());
        // All-equal profile: no critical classes.
        let e4 = PcPresentation::elementary_abelian(2, 4);
        let f4 = ArithmeticFixture::from_group(&e4).unwrap();
        assert!(f4.critical_profiles.is_empty(), "all 35 index-4 classes share [2,2]");
        assert!(critical_subgroups(&e4, &f4).unwrap().unwrap().is_empty());
    }

    #[test]
    fn capitulation_indeterminate_without_data() {
        let e = PcPresentation::elementary_abelian(2, 4);
        let f = ArithmeticFixture::q5460();
        let v = capitulation_filter(&e, &f, &Limits::default()).unwrap();
        assert_eq!(v.outcome, crate::verdict::Outcome::Indeterminate);
    }
}
