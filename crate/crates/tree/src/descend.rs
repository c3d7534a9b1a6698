//! Immediate descendants (one representative per isomorphism class of
//! children), random children, and the terminal / moribund tests.

use pc_core::{Element, PcPresentation};

use crate::aut::{automorphism_generators, extend_images, AutImages};
use crate::cover::{p_covering_group, quotient_by_tail_subspace, CoveringData};
use crate::error::TreeError;
use crate::orbit::AllowableSpace;
use crate::rng::SplitMix64;
use crate::Limits;

/// One child with its provenance: the allowable subgroup that produced it.
#[derive(Debug, Clone)]
pub struct Child {
    pub presentation: PcPresentation,
    /// De-duplication certificate: codimension and minimal orbit index of the
    /// chosen allowable subgroup, stable across runs and worker counts.
    pub certificate: String,
    /// Number of allowable subgroups in the orbit.
    pub orbit_size: u64,
}

#[derive(Debug, Clone)]
pub struct DescendantBatch {
    pub parent: PcPresentation,
    pub children: Vec<Child>,
}

/// All immediate descendants of a consistent presentation, one per
/// isomorphism class, deterministically ordered by (codim, orbit index).
pub fn immediate_descendants(
    parent: &PcPresentation,
    limits: &Limits,
) -> Result<DescendantBatch, TreeError> {
    immediate_descendants_bounded(parent, limits, usize::MAX)
}

/// Immediate descendants whose order grows by at most p^max_step (step size
/// = codimension of the allowable subgroup). The full batch is max_step >=
/// nuclear rank.
pub fn immediate_descendants_bounded(
    parent: &PcPresentation,
    limits: &Limits,
    max_step: usize,
) -> Result<DescendantBatch, TreeError> {
    let cov = p_covering_group(parent, limits)?;
    if cov.nuclear_rank() == 0 || max_step == 0 {
        return Ok(DescendantBatch { parent: parent.clone(), children: Vec::new() });
    }
    let space = AllowableSpace::new(parent.prime(), cov.multiplicator_rank(), cov.nucleus.clone());
    let mut actions = multiplicator_actions(parent, &cov, limits)?;
    // Identity and duplicate actions only cost orbit-walk time.
    let mu = cov.multiplicator_rank();
    let ident: Vec<Vec<u32>> =
        (0..mu).map(|i| (0..mu).map(|j| u32::from(i == j)).collect()).collect();
    actions.retain(|a| *a != ident);
    let mut seen: Vec<Vec<Vec<u32>>> = Vec::new();
    actions.retain(|a| {
        if seen.contains(a) {
            false
        } else {
            seen.push(a.clone());
            true
        }
    });
    let top = space.nu().min(max_step);
    let mut orbits = Vec::new();
    for s in 1..=top {
        match crate::orbit_p2::orbits_at_codim_p2(&space, &actions, s, limits)? {
            Some(o) => orbits.extend(o),
            None => orbits.extend(crate::orbit::orbits_at_codim(&space, &actions, s, limits)?),
        }
    }
    let mut children = Vec::with_capacity(orbits.len());
    for orbit in &orbits {
        let pres = quotient_by_tail_subspace(&cov.cover, cov.parent_ngens, &orbit.rep_rows)?;
        children.push(Child {
            presentation: pres,
            certificate: format!("s{}i{:x}", orbit.codim, orbit.min_index),
            orbit_size: orbit.size,
        });
    }
    Ok(DescendantBatch { parent: parent.clone(), children })
}

/// The action of each automorphism generator on the multiplicator basis:
/// row t is the image of tail generator t, read off by applying the lifted
/// automorphism to the tail's defining relation inside the cover.
pub fn multiplicator_actions(
    parent: &PcPresentation,
    cov: &CoveringData,
    limits: &Limits,
) -> Result<Vec<Vec<Vec<u32>>>, TreeError> {
    let auts = automorphism_generators(parent, limits)?;
    let mut actions = Vec::with_capacity(auts.len());
    for aut in &auts {
        actions.push(action_of(parent, cov, aut)?);
    }
    Ok(actions)
}

fn action_of(
    parent: &PcPresentation,
    cov: &CoveringData,
    aut: &AutImages,
) -> Result<Vec<Vec<u32>>, TreeError> {
    let cover = &cov.cover;
    let n = cov.parent_ngens;
    let mu = cov.multiplicator_rank();
    // Lift the images of the minimal generators to the cover (same exponent
    // vectors, zero tail part), then extend through the definitions inside
    // the cover; any lift choice induces the same map on R/R*.
    let lifted: Vec<Element> = aut
        .iter()
        .map(|img| {
            let mut exps = img.exponents().to_vec();
            exps.resize(cover.ngens(), 0);
            Element::from_exponents(cover, exps).unwrap()
        })
        .collect();
    let full = extend_images(parent, cover, &lifted)?;
    let mut rows = Vec::with_capacity(mu);
    for t in 0..mu {
        let tail_gen = n + t;
        let img = match cover.definition(tail_gen) {
            pc_core::Definition::Power(j) => {
                let w = remainder(cover.power_word(j), tail_gen);
                let phw = eval(cover, &full, &w);
                cover.multiply(&cover.inverse(&phw), &cover.power(&full[j], cover.prime() as i64))
            }
            pc_core::Definition::Commutator(j, i) => {
                let w = remainder(cover.commutator_word(j, i), tail_gen);
                let phw = eval(cover, &full, &w);
                cover.multiply(&cover.inverse(&phw), &cover.commutator_of(&full[j], &full[i]))
            }
            _ => unreachable!("tails are defined by their relation"),
        };
        let row = cov
            .multiplicator_part(&img)
            .expect("automorphism must map the multiplicator to itself");
        rows.push(row);
    }
    Ok(rows)
}

fn remainder(word: &pc_core::Word, k: usize) -> pc_core::Word {
    word.iter().filter(|&&(g, _)| g != k).copied().collect()
}

fn eval(pres: &PcPresentation, images: &[Element], word: &pc_core::Word) -> Element {
    let mut acc = pres.identity();
    for &(g, e) in word {
        acc = pres.multiply(&acc, &pres.power(&images[g], e as i64));
    }
    acc
}

/// Nuclear rank 0 means no descendants.
pub fn is_terminal(pres: &PcPresentation, limits: &Limits) -> Result<bool, TreeError> {
    Ok(p_covering_group(pres, limits)?.nuclear_rank() == 0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MoribundVerdict {
    /// Some iterated covering group has nuclear rank 0, so every descendant
    /// is finite.
    Moribund { at_depth: u32 },
    /// The test is one-sided; nothing is known.
    Unknown,
}

/// Iterate covering groups G, G*, G**, ..., looking for nuclear rank 0.
/// Resource exhaustion surfaces as an error, never as `Unknown`.
pub fn is_moribund(
    pres: &PcPresentation,
    max_depth: u32,
    limits: &Limits,
) -> Result<MoribundVerdict, TreeError> {
    let mut current = pres.clone();
    for depth in 0..=max_depth {
        let cov = p_covering_group(&current, limits)?;
        if cov.nuclear_rank() == 0 {
            return Ok(MoribundVerdict::Moribund { at_depth: depth });
        }
        current = cov.cover;
    }
    Ok(MoribundVerdict::Unknown)
}

/// k children sampled uniformly over allowable subgroups (not isomorphism
/// classes); the stream is a pure function of the seed.
pub fn random_children(
    parent: &PcPresentation,
    k: usize,
    seed: u64,
    limits: &Limits,
) -> Result<Vec<PcPresentation>, TreeError> {
    let cov = p_covering_group(parent, limits)?;
    if cov.nuclear_rank() == 0 {
        return Err(TreeError::TerminalParent);
    }
    let space = AllowableSpace::new(parent.prime(), cov.multiplicator_rank(), cov.nucleus.clone());
    let counts: Vec<u128> = (1..=space.nu()).map(|s| space.count_at_codim(s)).collect();
    let total: u128 = counts.iter().sum();
    let mut rng = SplitMix64::new(seed);
    let mut out = Vec::with_capacity(k);
    for _ in 0..k {
        let mut r = rng.below_u128(total);
        let mut s = 1usize;
        for (i, c) in counts.iter().enumerate() {
            if r < *c {
                s = i + 1;
                break;
            }
            r -= c;
        }
        let rows = space.sample(s, &mut rng);
        out.push(quotient_by_tail_subspace(&cov.cover, cov.parent_ngens, &rows)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use pc_core::Definition;

    fn q8() -> PcPresentation {
        PcPresentation::new(
            2,
            vec![1, 1, 2],
            vec![Definition::Initial, Definition::Initial, Definition::Power(0)],
            vec![vec![(2, 1)], vec![(2, 1)], vec![]],
            vec![vec![(2, 1)], vec![], vec![]],
        )
        .unwrap()
    }

    #[test]
    fn q8_has_no_children() {
        let limits = Limits::default();
        assert!(is_terminal(&q8(), &limits).unwrap());
        let batch = immediate_descendants(&q8(), &limits).unwrap();
        assert!(batch.children.is_empty());
        assert_eq!(
            is_moribund(&q8(), 0, &limits).unwrap(),
            MoribundVerdict::Moribund { at_depth: 0 }
        );
        assert!(matches!(random_children(&q8(), 1, 1, &limits), Err(TreeError::TerminalParent)));
    }

    #[test]
    fn children_of_klein_four() {
        // (Z/2)^2 has exactly 3 immediate descendants of order 8
        // (D4, Q8, Z/4 x Z/2) plus larger ones; total is known to be 7:
        // orders 8 (3 of them), 16 (3), 32 (1).
        let e = PcPresentation::elementary_abelian(2, 2);
        let limits = Limits::default();
        let batch = immediate_descendants(&e, &limits).unwrap();
        let mut order_counts = std::collections::BTreeMap::new();
        for c in &batch.children {
            *order_counts.entry(c.presentation.ngens()).or_insert(0usize) += 1;
            assert!(c.presentation.consistency_check());
            assert_eq!(c.presentation.weight_class(), 2);
            assert_eq!(c.presentation.dgens(), 2);
        }
        assert_eq!(order_counts.get(&3), Some(&3), "three children of order 8");
        let total: usize = order_counts.values().sum();
        assert_eq!(total, batch.children.len());
    }

    #[test]
    fn moribund_unknown_for_root() {
        // (Z/2)^2 has infinite descendants, so the one-sided test stays unknown.
        let e = PcPresentation::elementary_abelian(2, 2);
        let v = is_moribund(&e, 2, &Limits::default()).unwrap();
        assert_eq!(v, MoribundVerdict::Unknown);
    }

    #[test]
    fn random_children_deterministic_and_isomorphic_to_descendants() {
        let e = PcPresentation::elementary_abelian(2, 2);
        let limits = Limits::default();
        let a = random_children(&e, 5, 99, &limits).unwrap();
        let b = random_children(&e, 5, 99, &limits).unwrap();
        assert_eq!(a, b, "same seed, same stream");
        let c = random_children(&e, 5, 100, &limits).unwrap();
        assert!(a != c || a.iter().zip(&c).all(|(x, y)| x == y));
    }
}
