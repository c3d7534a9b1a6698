//! Contract invariants of the descendant machinery.

use pc_core::{abelian, PcPresentation, Subgroup};
use tree::cover::p_covering_group;
use tree::fp::FpPresentation;
use tree::{
    immediate_descendants, is_moribund, p_quotient, random_children, Limits, MoribundVerdict,
    TreeError,
};

/// Quotient by the span of the top-weight generators; for groups built by
/// the tree this recovers the parent presentation exactly.
fn class_quotient(pres: &PcPresentation) -> PcPresentation {
    let c = pres.weight_class();
    let gens: Vec<_> = (0..pres.ngens())
        .filter(|&i| pres.weight(i) == c)
        .map(|i| pres.generator(i).unwrap())
        .collect();
    let span = Subgroup::from_generators(pres, &gens);
    pres.quotient_by_normal(&span).unwrap().0
}

#[test]
fn children_project_onto_their_parent() {
    let limits = Limits::default();
    for root in [PcPresentation::elementary_abelian(2, 2), PcPresentation::elementary_abelian(2, 3)]
    {
        let batch = immediate_descendants(&root, &limits).unwrap();
        for child in &batch.children {
            assert_eq!(
                class_quotient(&child.presentation),
                root,
                "the class-c quotient of every child is the parent"
            );
        }
    }
}

#[test]
fn p_quotient_tower_compatibility() {
    let limits = Limits::default();
    let fp = tree::fp::builtin("conj72-1").unwrap();
    let mut prev = p_quotient(&fp, 2, 1, &limits).unwrap().group;
    for c in 2..=4 {
        let q = p_quotient(&fp, 2, c, &limits).unwrap().group;
        assert_eq!(class_quotient(&q), prev, "Q_{c} reduces to Q_{}", c - 1);
        prev = q;
    }
}

#[test]
fn rank_gap_invariant_under_generator_permutation() {
    // Relabel the generators of the Koch presentation; the multiplicator
    // and nuclear ranks of the class-2 quotient must not move.
    let limits = Limits::default();
    let original = tree::fp::builtin("koch-q2").unwrap();
    // a->b, b->a, c->d, d->c applied to the relator text.
    let permuted = "a,b,c,d | b^-2(c,d), a^-2(c,b)((c,a),a), d^-2(a,b)((c,a),a), \
                    c^-2(d,b)(c,b)(c,a), (a,d)";
    let permuted = FpPresentation::parse(permuted).unwrap();
    let q_orig = p_quotient(&original, 2, 2, &limits).unwrap().group;
    let q_perm = p_quotient(&permuted, 2, 2, &limits).unwrap().group;
    let c_orig = p_covering_group(&q_orig, &limits).unwrap();
    let c_perm = p_covering_group(&q_perm, &limits).unwrap();
    assert_eq!(q_orig.order_exponent(), q_perm.order_exponent());
    assert_eq!(c_orig.multiplicator_rank(), c_perm.multiplicator_rank());
    assert_eq!(c_orig.nuclear_rank(), c_perm.nuclear_rank());
}

#[test]
fn random_children_land_in_the_descendant_list() {
    let limits = Limits::default();
    let root = PcPresentation::elementary_abelian(2, 2);
    let all = immediate_descendants(&root, &limits).unwrap();
    let class_tables: Vec<oracle::TableGroup> = all
        .children
        .iter()
        .map(|c| oracle::TableGroup::build(&c.presentation, 64).unwrap())
        .collect();
    for seed in [3u64, 17, 5460] {
        for sample in random_children(&root, 6, seed, &limits).unwrap() {
            let t = oracle::TableGroup::build(&sample, 64).unwrap();
            let hits = class_tables.iter().filter(|ct| oracle::iso::isomorphic(ct, &t)).count();
            assert_eq!(hits, 1, "a sampled child is isomorphic to exactly one class");
        }
    }
}

#[test]
fn moribund_cap_is_distinct_from_unknown() {
    let limits = Limits::default();
    let root = PcPresentation::elementary_abelian(2, 4);
    // Within the cap the test is one-sided unknown; beyond it, a cap error.
    assert_eq!(is_moribund(&root, 1, &limits).unwrap(), MoribundVerdict::Unknown);
    match is_moribund(&root, 5, &limits) {
        Err(TreeError::CapExceeded(_)) => {}
        other => panic!("expected a cap error, got {other:?}"),
    }
}

#[test]
fn abelianization_times_derived_is_group_order() {
    let limits = Limits::default();
    let mut corpus: Vec<PcPresentation> =
        (1..=4).map(|d| PcPresentation::elementary_abelian(2, d)).collect();
    let mut i = 0;
    while i < corpus.len() {
        let g = corpus[i].clone();
        i += 1;
        let room = 5 - g.order_exponent();
        if room > 0 {
            let batch = tree::immediate_descendants_bounded(&g, &limits, room).unwrap();
            corpus.extend(batch.children.into_iter().map(|c| c.presentation));
        }
    }
    for g in &corpus {
        let ab = abelian::abelian_invariants(g);
        let mut comm_gens = Vec::new();
        for j in 1..g.ngens() {
            for i in 0..j {
                let w = g.commutator_word(j, i);
                if !w.is_empty() {
                    comm_gens.push(g.element_of_word(w));
                }
            }
        }
        let derived = Subgroup::normal_closure(g, &comm_gens);
        assert_eq!(
            ab.order_exponent() as usize + derived.order_exponent(),
            g.order_exponent(),
            "|G^ab| · |[G,G]| = |G|"
        );
    }
}

#[test]
fn power_subgroups_fixed_by_automorphisms() {
    let limits = Limits::default();
    let fp = tree::fp::builtin("koch-q2").unwrap();
    let g = p_quotient(&fp, 2, 2, &limits).unwrap().group;
    let g4 = g.power_subgroup(2, 1 << 22).unwrap();
    for aut in tree::aut::automorphism_generators(&g, &limits).unwrap() {
        let full = tree::aut::extend_images(&g, &g, &aut).unwrap();
        for t in g4.subgroup.pivots() {
            // Image of a pivot under the automorphism stays in G^4.
            let mut img = g.identity();
            for (k, &e) in t.exponents().iter().enumerate() {
                if e != 0 {
                    img = g.multiply(&img, &g.power(&full[k], e as i64));
                }
            }
            assert!(g4.subgroup.contains(&g, &img), "G^4 is characteristic");
        }
    }
}

#[test]
fn serialization_roundtrips_through_the_tree() {
    let limits = Limits::default();
    let batch = immediate_descendants(&PcPresentation::elementary_abelian(2, 3), &limits).unwrap();
    for child in batch.children.iter().take(12) {
        let text = child.presentation.to_canonical_text();
        let back = PcPresentation::parse(&text).unwrap();
        assert_eq!(back, child.presentation);
        assert_eq!(back.to_canonical_text(), text, "byte-exact round-trip");
    }
}
