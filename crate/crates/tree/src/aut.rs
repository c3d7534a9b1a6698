//! Automorphism generating sets, as image tuples of the minimal generators.
//!
//! Three routes, by shape of the group:
//!   - class 1: standard generators of GL(d, p);
//!   - class 2: the Frattini quotient V and the central elementary abelian
//!     Frattini subgroup W are linked by the p-th power map q and the
//!     commutator form beta; sigma in GL(V) lifts iff a linear tau on W is
//!     consistent with q and beta, and every Frattini translation
//!     a_i -> a_i w is an automorphism. Enumerate GL(V), filter, and take a
//!     small generating set of the lifting subgroup.
//!   - class >= 3: backtrack over generator images with order and
//!     Frattini-independence pruning (desk scale, capped).

use std::collections::HashSet;

use pc_core::linalg::rref_mod_p;
use pc_core::{Definition, Element, PcPresentation};

use crate::error::TreeError;
use crate::Limits;

/// An automorphism, stored as images of the weight-1 generators.
pub type AutImages = Vec<Element>;

/// A generating set for Aut(G).
pub fn automorphism_generators(
    pres: &PcPresentation,
    limits: &Limits,
) -> Result<Vec<AutImages>, TreeError> {
    let d = pres.dgens();
    if d == 0 {
        return Ok(Vec::new());
    }
    let class = pres.weight_class();
    if class <= 1 {
        return Ok(gl_generators(pres));
    }
    if class == 2 {
        return class2_generators(pres, limits);
    }
    backtrack_generators(pres, limits)
}

/// Extend images of the weight-1 generators to all pc generators via the
/// definitions, evaluating in `target` (which may be the group itself or a
/// cover containing it).
pub fn extend_images(
    pres: &PcPresentation,
    target: &PcPresentation,
    images: &[Element],
) -> Result<Vec<Element>, TreeError> {
    let mut out: Vec<Element> = Vec::with_capacity(pres.ngens());
    for k in 0..pres.ngens() {
        let img = match pres.definition(k) {
            Definition::Initial => images[k].clone(),
            Definition::Orphan => return Err(TreeError::MissingDefinitions),
            Definition::Power(j) => {
                let w = defining_remainder(pres.power_word(j), k);
                let phw = evaluate_word(target, &out, &w);
                target.multiply(&target.inverse(&phw), &target.power(&out[j], pres.prime() as i64))
            }
            Definition::Commutator(j, i) => {
                let w = defining_remainder(pres.commutator_word(j, i), k);
                let phw = evaluate_word(target, &out, &w);
                target.multiply(&target.inverse(&phw), &target.commutator_of(&out[j], &out[i]))
            }
        };
        out.push(img);
    }
    Ok(out)
}

/// For a defining relation LHS = w · a_k, return w.
fn defining_remainder(word: &pc_core::Word, k: usize) -> pc_core::Word {
    debug_assert!(word.iter().any(|&(g, e)| g == k && e == 1));
    word.iter().filter(|&&(g, _)| g != k).copied().collect()
}

fn evaluate_word(target: &PcPresentation, images: &[Element], word: &pc_core::Word) -> Element {
    let mut acc = target.identity();
    for &(g, e) in word {
        acc = target.multiply(&acc, &target.power(&images[g], e as i64));
    }
    acc
}

/// Verify that generator images define an automorphism: the extension via
/// definitions preserves every relation and the images span mod Frattini.
pub fn verify_automorphism(pres: &PcPresentation, images: &[Element]) -> bool {
    let Ok(full) = extend_images(pres, pres, images) else { return false };
    let p = pres.prime() as i64;
    for i in 0..pres.ngens() {
        let lhs = pres.power(&full[i], p);
        let rhs = evaluate_word(pres, &full, pres.power_word(i));
        if lhs != rhs {
            return false;
        }
    }
    for j in 1..pres.ngens() {
        for i in 0..j {
            let lhs = pres.commutator_of(&full[j], &full[i]);
            let rhs = evaluate_word(pres, &full, pres.commutator_word(j, i));
            if lhs != rhs {
                return false;
            }
        }
    }
    // Images must be independent mod the Frattini quotient coordinates.
    let d = pres.dgens();
    let mut rows: Vec<Vec<u32>> = images.iter().map(|e| e.exponents()[..d].to_vec()).collect();
    rref_mod_p(&mut rows, pres.prime()) == (0..d).collect::<Vec<_>>()
}

/// Standard generators of GL(d, p) acting on an elementary abelian group.
fn gl_generators(pres: &PcPresentation) -> Vec<AutImages> {
    let d = pres.dgens();
    let p = pres.prime();
    let gen_elem = |coords: &[u32]| -> Element {
        let mut exps = vec![0u32; pres.ngens()];
        exps[..d].copy_from_slice(coords);
        Element::from_exponents(pres, exps).unwrap()
    };
    let basis_images = |rows: Vec<Vec<u32>>| -> AutImages {
        rows.iter().map(|r| gen_elem(r)).collect()
    };
    let mut gens = Vec::new();
    if d == 1 {
        if p > 2 {
            // Multiplication by a primitive root.
            let r = primitive_root(p);
            gens.push(basis_images(vec![vec![r]]));
        }
        return gens;
    }
    // Transvection e_1 -> e_1 + e_2.
    let mut t = identity_rows(d);
    t[0][1] = 1;
    gens.push(basis_images(t));
    // Cycle e_1 -> e_2 -> ... -> e_d -> e_1.
    let mut c = vec![vec![0u32; d]; d];
    for i in 0..d {
        c[i][(i + 1) % d] = 1;
    }
    gens.push(basis_images(c));
    if p > 2 {
        let mut s = identity_rows(d);
        s[0][0] = primitive_root(p);
        gens.push(basis_images(s));
    }
    gens
}

fn identity_rows(d: usize) -> Vec<Vec<u32>> {
    (0..d).map(|i| (0..d).map(|j| u32::from(i == j)).collect()).collect()
}

fn primitive_root(p: u32) -> u32 {
    'outer: for r in 2..p {
        let mut x = 1u64;
        for _ in 0..p - 2 {
            x = x * r as u64 % p as u64;
            if x == 1 {
                continue 'outer;
            }
        }
        return r;
    }
    1
}

/// Class-2 route. V = weight-1 generators, W = weight-2 generators (central,
/// elementary abelian). q(x) = x^p read in W, beta = commutator form.
fn class2_generators(pres: &PcPresentation, limits: &Limits) -> Result<Vec<AutImages>, TreeError> {
    let d = pres.dgens();
    let n = pres.ngens();
    let w_dim = n - d;
    let p = pres.prime();
    let order_gl = gl_order(d as u32, p);
    if order_gl > limits.aut_enum_cap as u128 {
        return Err(TreeError::CapExceeded(format!(
            "|GL({d},{p})| = {order_gl} exceeds the lifting enumeration cap"
        )));
    }
    let v_elem = |coords: &[u32]| -> Element {
        let mut exps = vec![0u32; n];
        exps[..d].copy_from_slice(coords);
        Element::from_exponents(pres, exps).unwrap()
    };
    let w_part = |e: &Element| -> Vec<u32> { e.exponents()[d..].to_vec() };
    // Constraint sources: q on the standard basis and beta on basis pairs.
    // Their images under sigma are recomputed per candidate.
    let q_of = |coords: &[u32]| -> Vec<u32> {
        let x = v_elem(coords);
        w_part(&pres.power(&x, p as i64))
    };
    let beta_of = |a: &[u32], b: &[u32]| -> Vec<u32> {
        let x = v_elem(a);
        let y = v_elem(b);
        w_part(&pres.commutator_of(&x, &y))
    };
    let mut src_rows: Vec<Vec<u32>> = Vec::new();
    let mut src_meta: Vec<(Vec<u32>, Option<Vec<u32>>)> = Vec::new();
    for i in 0..d {
        let e_i: Vec<u32> = (0..d).map(|j| u32::from(i == j)).collect();
        src_rows.push(q_of(&e_i));
        src_meta.push((e_i, None));
    }
    for j in 1..d {
        for i in 0..j {
            let e_i: Vec<u32> = (0..d).map(|t| u32::from(i == t)).collect();
            let e_j: Vec<u32> = (0..d).map(|t| u32::from(j == t)).collect();
            src_rows.push(beta_of(&e_j, &e_i));
            src_meta.push((e_j, Some(e_i)));
        }
    }
    // sigma lifts iff every F_p dependency among the sources holds among the
    // images: solve [src | img] and check no zero-source row has nonzero image.
    let liftable = |sigma: &[Vec<u32>]| -> bool {
        let mut aug: Vec<Vec<u32>> = Vec::with_capacity(src_rows.len());
        for (src, (a, b)) in src_rows.iter().zip(&src_meta) {
            let sa = apply_rows(sigma, a, p);
            let img = match b {
                None => q_of(&sa),
                Some(bb) => beta_of(&sa, &apply_rows(sigma, bb, p)),
            };
            let mut row = src.clone();
            row.extend(img);
            aug.push(row);
        }
        // Eliminate on the first w_dim columns; any leftover row with zero
        // source part but nonzero image part is an inconsistency.
        let mut rows = aug;
        rref_mod_p(&mut rows, p);
        for row in &rows {
            if row[..w_dim].iter().all(|&x| x == 0) && row[w_dim..].iter().any(|&x| x != 0) {
                return false;
            }
        }
        true
    };
    // Enumerate GL(d, p), filter to the lifting subgroup S, then greedily
    // extract a generating set of S by closure.
    let mut lifting: Vec<Vec<Vec<u32>>> = Vec::new();
    let mut mat = vec![vec![0u32; d]; d];
    enumerate_gl(&mut mat, 0, d, p, &mut |m| {
        if liftable(m) {
            lifting.push(m.to_vec());
        }
    });
    let sigma_gens = generating_subset(&lifting, d, p);
    let mut out: Vec<AutImages> = Vec::new();
    for sigma in sigma_gens {
        let images: AutImages = (0..d).map(|i| v_elem(&sigma[i])).collect();
        debug_assert!(verify_automorphism(pres, &images));
        out.push(images);
    }
    // Frattini translations a_i -> a_i w for each weight-2 basis generator.
    for i in 0..d {
        for wk in 0..w_dim {
            let mut images: AutImages = (0..d).map(|k| pres.generator(k).unwrap()).collect();
            let wgen = pres.generator(d + wk).unwrap();
            images[i] = pres.multiply(&images[i], &wgen);
            debug_assert!(verify_automorphism(pres, &images));
            out.push(images);
        }
    }
    Ok(out)
}

fn apply_rows(rows: &[Vec<u32>], v: &[u32], p: u32) -> Vec<u32> {
    let d = v.len();
    let mut out = vec![0u32; d];
    for (i, &c) in v.iter().enumerate() {
        if c != 0 {
            for j in 0..d {
                out[j] = (out[j] + c * rows[i][j]) % p;
            }
        }
    }
    out
}

fn gl_order(d: u32, p: u32) -> u128 {
    let mut ord = 1u128;
    let pd = (p as u128).pow(d);
    for k in 0..d {
        ord = ord.saturating_mul(pd - (p as u128).pow(k));
    }
    ord
}

/// Enumerate invertible matrices row by row (rows independent so far).
fn enumerate_gl(
    mat: &mut Vec<Vec<u32>>,
    row: usize,
    d: usize,
    p: u32,
    f: &mut impl FnMut(&[Vec<u32>]),
) {
    if row == d {
        f(mat);
        return;
    }
    let total = (p as u64).pow(d as u32);
    for code in 1..total {
        let mut v = Vec::with_capacity(d);
        let mut c = code;
        for _ in 0..d {
            v.push((c % p as u64) as u32);
            c /= p as u64;
        }
        mat[row] = v;
        let mut probe: Vec<Vec<u32>> = mat[..=row].to_vec();
        if rref_mod_p(&mut probe, p).len() == row + 1 {
            enumerate_gl(mat, row + 1, d, p, f);
        }
    }
}

/// Greedy generating subset of a finite matrix group given as a full list.
fn generating_subset(all: &[Vec<Vec<u32>>], d: usize, p: u32) -> Vec<Vec<Vec<u32>>> {
    let key = |m: &Vec<Vec<u32>>| -> Vec<u32> { m.iter().flatten().copied().collect() };
    let mul = |a: &Vec<Vec<u32>>, b: &Vec<Vec<u32>>| -> Vec<Vec<u32>> {
        let mut out = vec![vec![0u32; d]; d];
        for i in 0..d {
            for k in 0..d {
                if a[i][k] != 0 {
                    for j in 0..d {
                        out[i][j] = (out[i][j] + a[i][k] * b[k][j]) % p;
                    }
                }
            }
        }
        out
    };
    let mut gens: Vec<Vec<Vec<u32>>> = Vec::new();
    let mut closure: HashSet<Vec<u32>> = HashSet::new();
    closure.insert(key(&identity_rows(d)));
    for m in all {
        if closure.contains(&key(m)) {
            continue;
        }
        gens.push(m.clone());
        // Rebuild the closure with the enlarged generating set.
        closure.clear();
        closure.insert(key(&identity_rows(d)));
        let mut frontier: Vec<Vec<Vec<u32>>> = vec![identity_rows(d)];
        while let Some(x) = frontier.pop() {
            for g in &gens {
                let y = mul(&x, g);
                if closure.insert(key(&y)) {
                    frontier.push(y);
                }
            }
        }
        if closure.len() == all.len() {
            break;
        }
    }
    gens
}

/// Class >= 3: backtrack over image tuples with order and independence pruning.
fn backtrack_generators(pres: &PcPresentation, limits: &Limits) -> Result<Vec<AutImages>, TreeError> {
    let d = pres.dgens();
    let n = pres.ngens();
    let p = pres.prime();
    let size = (p as u64).checked_pow(n as u32).filter(|&s| {
        s.checked_pow(d as u32).is_some_and(|t| t <= limits.aut_backtrack_cap)
    });
    if size.is_none() {
        return Err(TreeError::CapExceeded(format!(
            "automorphism backtracking over |G|^{d} tuples exceeds the cap"
        )));
    }
    let size = size.unwrap();
    let gen_orders: Vec<u128> =
        (0..d).map(|i| pres.element_order(&pres.generator(i).unwrap())).collect();
    // Candidate images per slot, filtered by element order.
    let elems: Vec<Element> = (0..size)
        .map(|code| {
            let mut c = code;
            let mut exps = vec![0u32; n];
            for e in exps.iter_mut().rev() {
                *e = (c % p as u64) as u32;
                c /= p as u64;
            }
            Element::from_exponents(pres, exps).unwrap()
        })
        .collect();
    let candidates: Vec<Vec<&Element>> = (0..d)
        .map(|i| elems.iter().filter(|e| pres.element_order(e) == gen_orders[i]).collect())
        .collect();
    let mut all: Vec<AutImages> = Vec::new();
    let mut current: Vec<Element> = Vec::new();
    search_tuples(pres, &candidates, &mut current, &mut all);
    // Greedy generating subset by closure over composition.
    let compose = |a: &AutImages, b: &AutImages| -> AutImages {
        // (a ∘ b)(g_i) = a(b(g_i)): evaluate b's image word under a's extension.
        let full_a = extend_images(pres, pres, a).expect("verified automorphism extends");
        b.iter()
            .map(|img| {
                let mut acc = pres.identity();
                for (g, &e) in img.exponents().iter().enumerate() {
                    if e != 0 {
                        acc = pres.multiply(&acc, &pres.power(&full_a[g], e as i64));
                    }
                }
                acc
            })
            .collect()
    };
    let key = |a: &AutImages| -> Vec<u32> {
        a.iter().flat_map(|e| e.exponents().iter().copied()).collect()
    };
    let identity: AutImages = (0..d).map(|i| pres.generator(i).unwrap()).collect();
    let mut gens: Vec<AutImages> = Vec::new();
    let mut closure: HashSet<Vec<u32>> = HashSet::new();
    closure.insert(key(&identity));
    for a in &all {
        if closure.contains(&key(a)) {
            continue;
        }
        gens.push(a.clone());
        closure.clear();
        closure.insert(key(&identity));
        let mut frontier = vec![identity.clone()];
        while let Some(x) = frontier.pop() {
            for g in &gens {
                let y = compose(&x, g);
                if closure.insert(key(&y)) {
                    frontier.push(y);
                }
            }
        }
        if closure.len() == all.len() {
            break;
        }
    }
    Ok(gens)
}

fn search_tuples(
    pres: &PcPresentation,
    candidates: &[Vec<&Element>],
    current: &mut Vec<Element>,
    all: &mut Vec<AutImages>,
) {
    let d = candidates.len();
    if current.len() == d {
        if verify_automorphism(pres, current) {
            all.push(current.clone());
        }
        return;
    }
    let depth = current.len();
    for &cand in &candidates[depth] {
        // Prune: partial tuple must stay independent mod Frattini.
        current.push(cand.clone());
        let mut rows: Vec<Vec<u32>> =
            current.iter().map(|e| e.exponents()[..d].to_vec()).collect();
        if rref_mod_p(&mut rows, pres.prime()).len() == current.len() {
            search_tuples(pres, candidates, current, all);
        }
        current.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_generators_generate_gl42() {
        // Closure of the emitted generators must have order |GL(4,2)| = 20160.
        let e = PcPresentation::elementary_abelian(2, 4);
        let gens = automorphism_generators(&e, &Limits::default()).unwrap();
        let d = 4;
        let mats: Vec<Vec<Vec<u32>>> = gens
            .iter()
            .map(|imgs| imgs.iter().map(|e| e.exponents()[..d].to_vec()).collect())
            .collect();
        let mut closure: HashSet<Vec<u32>> = HashSet::new();
        let ident = identity_rows(d);
        let key = |m: &Vec<Vec<u32>>| -> Vec<u32> { m.iter().flatten().copied().collect() };
        closure.insert(key(&ident));
        let mut frontier = vec![ident];
        while let Some(x) = frontier.pop() {
            for g in &mats {
                let mut y = vec![vec![0u32; d]; d];
                for i in 0..d {
                    for k in 0..d {
                        if x[i][k] != 0 {
                            for j in 0..d {
                                y[i][j] ^= x[i][k] & g[k][j];
                            }
                        }
                    }
                }
                if closure.insert(key(&y)) {
                    frontier.push(y);
                }
            }
        }
        assert_eq!(closure.len(), 20160);
    }

    #[test]
    fn q8_automorphism_count() {
        // |Aut(Q8)| = 24: closure of the class-2 generating set.
        let q8 = PcPresentation::new(
            2,
            vec![1, 1, 2],
            vec![Definition::Initial, Definition::Initial, Definition::Power(0)],
            vec![vec![(2, 1)], vec![(2, 1)], vec![]],
            vec![vec![(2, 1)], vec![], vec![]],
        )
        .unwrap();
        let gens = automorphism_generators(&q8, &Limits::default()).unwrap();
        assert!(gens.iter().all(|g| verify_automorphism(&q8, g)));
        let full: Vec<Vec<Element>> = gens
            .iter()
            .map(|g| extend_images(&q8, &q8, g).unwrap())
            .collect();
        let _ = full;
        // Count the closure of the automorphism group via composition.
        let identity: AutImages = vec![q8.generator(0).unwrap(), q8.generator(1).unwrap()];
        let key = |a: &AutImages| -> Vec<u32> {
            a.iter().flat_map(|e| e.exponents().iter().copied()).collect()
        };
        let compose = |a: &AutImages, b: &AutImages| -> AutImages {
            let full_a = extend_images(&q8, &q8, a).unwrap();
            b.iter()
                .map(|img| {
                    let mut acc = q8.identity();
                    for (g, &e) in img.exponents().iter().enumerate() {
                        if e != 0 {
                            acc = q8.multiply(&acc, &q8.power(&full_a[g], e as i64));
                        }
                    }
                    acc
                })
                .collect()
        };
        let mut closure: HashSet<Vec<u32>> = HashSet::new();
        closure.insert(key(&identity));
        let mut frontier = vec![identity];
        while let Some(x) = frontier.pop() {
            for g in &gens {
                let y = compose(&x, g);
                if closure.insert(key(&y)) {
                    frontier.push(y);
                }
            }
        }
        assert_eq!(closure.len(), 24);
    }

    #[test]
    fn backtrack_matches_class2_route_on_d4() {
        let d4 = PcPresentation::new(
            2,
            vec![1, 1, 2],
            vec![Definition::Initial, Definition::Initial, Definition::Commutator(1, 0)],
            vec![vec![], vec![(2, 1)], vec![]],
            vec![vec![(2, 1)], vec![], vec![]],
        )
        .unwrap();
        // |Aut(D4)| = 8.
        let gens = class2_generators(&d4, &Limits::default()).unwrap();
        let bt = backtrack_generators(&d4, &Limits::default()).unwrap();
        let count = |gens: &[AutImages]| -> usize {
            let identity: AutImages = vec![d4.generator(0).unwrap(), d4.generator(1).unwrap()];
            let key = |a: &AutImages| -> Vec<u32> {
                a.iter().flat_map(|e| e.exponents().iter().copied()).collect()
            };
            let compose = |a: &AutImages, b: &AutImages| -> AutImages {
                let full_a = extend_images(&d4, &d4, a).unwrap();
                b.iter()
                    .map(|img| {
                        let mut acc = d4.identity();
                        for (g, &e) in img.exponents().iter().enumerate() {
                            if e != 0 {
                                acc = d4.multiply(&acc, &d4.power(&full_a[g], e as i64));
                            }
                        }
                        acc
                    })
                    .collect()
            };
            let mut closure: HashSet<Vec<u32>> = HashSet::new();
            closure.insert(key(&identity));
            let mut frontier = vec![identity];
            while let Some(x) = frontier.pop() {
                for g in gens {
                    let y = compose(&x, g);
                    if closure.insert(key(&y)) {
                        frontier.push(y);
                    }
                }
            }
            closure.len()
        };
        assert_eq!(count(&gens), 8);
        assert_eq!(count(&bt), 8);
    }
}
