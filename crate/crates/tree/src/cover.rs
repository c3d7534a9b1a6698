//! The p-covering group G* = F/R* with R* = [R,F]R^p: append a tail
//! generator to every non-defining relation of weight at most c+1, then
//! enforce the weighted consistency tests, which yields linear relations
//! among the tails; the surviving tails are a basis of the p-multiplicator
//! R/R*. The nucleus P_c(G*) is spanned by the tail parts of the relations
//! whose left-hand side involves a weight-c generator.

use pc_core::{Definition, Element, PcError, PcPresentation, Word};

use crate::error::TreeError;
use crate::Limits;

/// Which relation a tail was appended to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelId {
    Pow(usize),
    Comm(usize, usize),
}

/// A p-covering group with its distinguished subspaces.
#[derive(Debug, Clone)]
pub struct CoveringData {
    pub cover: PcPresentation,
    /// Generators 0..parent_ngens are the parent's; the rest span R/R*.
    pub parent_ngens: usize,
    /// Reduced echelon basis of the nucleus in multiplicator coordinates.
    pub nucleus: Vec<Vec<u32>>,
}

impl CoveringData {
    pub fn multiplicator_rank(&self) -> usize {
        self.cover.ngens() - self.parent_ngens
    }

    pub fn nuclear_rank(&self) -> usize {
        self.nucleus.len()
    }

    /// Tail-coordinate vector of an element supported on the multiplicator.
    pub fn multiplicator_part(&self, e: &Element) -> Option<Vec<u32>> {
        let exps = e.exponents();
        if exps[..self.parent_ngens].iter().any(|&x| x != 0) {
            return None;
        }
        Some(exps[self.parent_ngens..].to_vec())
    }
}

/// Compute the p-covering group of a consistent presentation whose
/// definitions are all genuine.
pub fn p_covering_group(parent: &PcPresentation, limits: &Limits) -> Result<CoveringData, TreeError> {
    let n = parent.ngens();
    let p = parent.prime();
    for k in 0..n {
        if matches!(parent.definition(k), Definition::Orphan) {
            return Err(TreeError::MissingDefinitions);
        }
    }
    if n == 0 {
        return Ok(CoveringData { cover: parent.clone(), parent_ngens: 0, nucleus: Vec::new() });
    }
    let class = parent.weight_class();
    let bound = class + 1;

    // Relations that define a generator stay exact.
    let mut defining: Vec<RelId> = Vec::new();
    for k in 0..n {
        match parent.definition(k) {
            Definition::Power(j) => defining.push(RelId::Pow(j)),
            Definition::Commutator(j, i) => defining.push(RelId::Comm(j, i)),
            _ => {}
        }
    }
    let is_defining = |r: RelId| defining.contains(&r);

    // Tails for non-defining relations of LHS weight <= c+1; higher-weight
    // relations already collapse in a class-(c+1) group.
    let mut tailed: Vec<RelId> = Vec::new();
    for i in 0..n {
        let r = RelId::Pow(i);
        if !is_defining(r) && parent.weight(i) + 1 <= bound {
            tailed.push(r);
        }
    }
    for j in 1..n {
        for i in 0..j {
            let r = RelId::Comm(j, i);
            let w = parent.weight(j) + parent.weight(i);
            if !is_defining(r) && w <= bound {
                tailed.push(r);
            } else if w > bound {
                debug_assert!(
                    parent.commutator_word(j, i).is_empty(),
                    "relation above the class bound must already be trivial"
                );
            }
        }
    }
    if n + tailed.len() > limits.max_ngens {
        return Err(TreeError::CapExceeded(format!(
            "cover would need {} generators (cap {})",
            n + tailed.len(),
            limits.max_ngens
        )));
    }

    let mut cover = build_tailed(parent, &tailed, bound)?;
    // Enforce consistency; repeat until no new relations among tails appear.
    loop {
        let eqs = consistency_equations(&cover, n, bound);
        if eqs.is_empty() {
            break;
        }
        let mut rows = eqs;
        pc_core::linalg::rref_mod_p(&mut rows, p);
        cover = quotient_by_tail_subspace(&cover, n, &rows)?;
    }

    let nucleus = nucleus_of(&cover, n, class);
    Ok(CoveringData { cover, parent_ngens: n, nucleus })
}

/// Parent presentation with tails appended to the given relations.
fn build_tailed(parent: &PcPresentation, tailed: &[RelId], bound: u32) -> Result<PcPresentation, TreeError> {
    let n = parent.ngens();
    let t = tailed.len();
    let total = n + t;
    let mut weights: Vec<u32> = parent.weights().to_vec();
    weights.extend(std::iter::repeat(bound).take(t));
    let mut definitions: Vec<Definition> = (0..n).map(|k| parent.definition(k)).collect();
    let mut powers: Vec<Word> = (0..n).map(|i| parent.power_word(i).clone()).collect();
    let mut commutators: Vec<Word> = vec![Vec::new(); total * (total - 1) / 2];
    for j in 1..n {
        for i in 0..j {
            commutators[pair_index(j, i)] = parent.commutator_word(j, i).clone();
        }
    }
    for (s, &rel) in tailed.iter().enumerate() {
        let tail_gen = n + s;
        match rel {
            RelId::Pow(i) => {
                powers[i].push((tail_gen, 1));
                definitions.push(Definition::Power(i));
            }
            RelId::Comm(j, i) => {
                commutators[pair_index(j, i)].push((tail_gen, 1));
                definitions.push(Definition::Commutator(j, i));
            }
        }
    }
    powers.extend(std::iter::repeat(Vec::new()).take(t));
    Ok(PcPresentation::new(parent.prime(), weights, definitions, powers, commutators)?)
}

#[inline]
fn pair_index(j: usize, i: usize) -> usize {
    j * (j - 1) / 2 + i
}

/// Weighted consistency test words over the parent letters; each failing
/// test contributes one F_p linear relation among the tails.
fn consistency_equations(cover: &PcPresentation, parent_n: usize, bound: u32) -> Vec<Vec<u32>> {
    let p = cover.prime();
    let t = cover.ngens() - parent_n;
    let mut eqs: Vec<Vec<u32>> = Vec::new();
    let mut push_eq = |lhs: Element, rhs: Element| {
        let le = lhs.exponents();
        let re = rhs.exponents();
        debug_assert_eq!(
            &le[..parent_n],
            &re[..parent_n],
            "consistency test words must agree on the parent part"
        );
        let mut eq = vec![0u32; t];
        let mut nonzero = false;
        for k in 0..t {
            let v = (le[parent_n + k] + p - re[parent_n + k]) % p;
            eq[k] = v;
            nonzero |= v != 0;
        }
        if nonzero {
            eqs.push(eq);
        }
    };
    let gens: Vec<Element> = (0..parent_n).map(|i| cover.generator(i).unwrap()).collect();
    // (a_k a_j) a_i = a_k (a_j a_i)
    for k in 2..parent_n {
        for j in 1..k {
            for i in 0..j {
                if cover.weight(k) + cover.weight(j) + cover.weight(i) > bound {
                    continue;
                }
                let lhs = cover.multiply(&cover.multiply(&gens[k], &gens[j]), &gens[i]);
                let rhs = cover.multiply(&gens[k], &cover.multiply(&gens[j], &gens[i]));
                push_eq(lhs, rhs);
            }
        }
    }
    // (a_j^p) a_i = a_j^(p-1) (a_j a_i)  and  a_j (a_i^p) = (a_j a_i) a_i^(p-1)
    for j in 1..parent_n {
        for i in 0..j {
            if cover.weight(j) + cover.weight(i) + 1 > bound {
                continue;
            }
            let lhs = cover.multiply_by_generator(&cover.element_of_word(cover.power_word(j)), i, 1);
            let rhs = cover.multiply(
                &cover.power(&gens[j], (p - 1) as i64),
                &cover.multiply(&gens[j], &gens[i]),
            );
            push_eq(lhs, rhs);
            let lhs = cover.multiply(&gens[j], &cover.element_of_word(cover.power_word(i)));
            let rhs = cover.multiply(
                &cover.multiply(&gens[j], &gens[i]),
                &cover.power(&gens[i], (p - 1) as i64),
            );
            push_eq(lhs, rhs);
        }
    }
    // a_i (a_i^p) = (a_i^p) a_i
    for i in 0..parent_n {
        if cover.weight(i) + 1 > bound {
            continue;
        }
        let w = cover.element_of_word(cover.power_word(i));
        push_eq(cover.multiply(&gens[i], &w), cover.multiply(&w, &gens[i]));
    }
    eqs
}

/// Quotient of a cover by a subspace of the multiplicator, given as reduced
/// echelon rows over the tail coordinates. Pivot tails are eliminated by
/// substitution; surviving tails are renumbered consecutively.
pub fn quotient_by_tail_subspace(
    cover: &PcPresentation,
    parent_n: usize,
    rows: &[Vec<u32>],
) -> Result<PcPresentation, TreeError> {
    let p = cover.prime();
    let t = cover.ngens() - parent_n;
    let pivots: Vec<usize> = rows
        .iter()
        .map(|r| {
            let piv = r.iter().position(|&x| x != 0).expect("echelon row must have a pivot");
            debug_assert_eq!(r[piv], 1, "echelon pivot must be normalized");
            piv
        })
        .collect();
    debug_assert!(pivots.windows(2).all(|w| w[0] < w[1]));
    let surviving: Vec<usize> = (0..t).filter(|k| !pivots.contains(k)).collect();
    let new_index: Vec<Option<usize>> = {
        let mut m = vec![None; t];
        for (ni, &k) in surviving.iter().enumerate() {
            m[k] = Some(parent_n + ni);
        }
        m
    };
    // Rewrite a relation word: parent part unchanged, tail part reduced.
    let rewrite = |word: &Word| -> Word {
        let mut tail = vec![0u32; t];
        let mut out: Word = Vec::new();
        for &(g, e) in word {
            if g < parent_n {
                out.push((g, e));
            } else {
                tail[g - parent_n] = e;
            }
        }
        for (r, &piv) in rows.iter().zip(&pivots) {
            let c = tail[piv];
            if c != 0 {
                for k in 0..t {
                    tail[k] = (tail[k] + (p - c) * r[k]) % p;
                }
            }
        }
        debug_assert!(pivots.iter().all(|&piv| tail[piv] == 0));
        for &k in &surviving {
            if tail[k] != 0 {
                out.push((new_index[k].unwrap(), tail[k]));
            }
        }
        out
    };
    let total = parent_n + surviving.len();
    let mut weights: Vec<u32> = cover.weights()[..parent_n].to_vec();
    let mut definitions: Vec<Definition> = (0..parent_n).map(|k| cover.definition(k)).collect();
    for &k in &surviving {
        weights.push(cover.weight(parent_n + k));
        definitions.push(cover.definition(parent_n + k));
    }
    let mut powers: Vec<Word> = Vec::with_capacity(total);
    for i in 0..parent_n {
        powers.push(rewrite(cover.power_word(i)));
    }
    powers.extend(std::iter::repeat(Vec::new()).take(surviving.len()));
    let mut commutators: Vec<Word> = vec![Vec::new(); total * total.saturating_sub(1) / 2];
    for j in 1..parent_n {
        for i in 0..j {
            commutators[pair_index(j, i)] = rewrite(cover.commutator_word(j, i));
        }
    }
    Ok(PcPresentation::new(p, weights, definitions, powers, commutators).map_err(PcError::from)?)
}

/// Nucleus P_c(G*): spanned by the tail parts of a_u^p and [a_u, a_i] for
/// every weight-c generator a_u (all stored relation words, no collection).
fn nucleus_of(cover: &PcPresentation, parent_n: usize, class: u32) -> Vec<Vec<u32>> {
    let p = cover.prime();
    let t = cover.ngens() - parent_n;
    if t == 0 {
        return Vec::new();
    }
    let tail_part = |word: &Word| -> Vec<u32> {
        let mut v = vec![0u32; t];
        for &(g, e) in word {
            if g >= parent_n {
                v[g - parent_n] = e;
            } else {
                debug_assert!(
                    cover.weight(g) <= class,
                    "weight-(c+1) support must be tails only"
                );
            }
        }
        v
    };
    let mut rows: Vec<Vec<u32>> = Vec::new();
    for u in 0..parent_n {
        if cover.weight(u) != class {
            continue;
        }
        rows.push(tail_part(cover.power_word(u)));
        for i in 0..parent_n {
            if i == u {
                continue;
            }
            let w = if u > i { cover.commutator_word(u, i) } else { cover.commutator_word(i, u) };
            // Tail parts of [a_u, a_i] and its inverse span the same line.
            rows.push(tail_part(w));
        }
    }
    pc_core::linalg::rref_mod_p(&mut rows, p);
    rows
}
