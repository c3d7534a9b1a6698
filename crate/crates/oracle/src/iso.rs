//! Isomorphism testing between multiplication tables: cheap invariant
//! fingerprints, then backtracking over generator images.

use crate::table::TableGroup;

/// Invariants preserved by isomorphism, cheap to compute from a table:
/// order profile, center and derived sizes, square-image size, and the
/// multiset of (element order, centralizer size) pairs.
pub fn fingerprint(t: &TableGroup) -> Vec<u64> {
    let n = t.size as u16;
    let orders: Vec<u64> = (0..n).map(|x| t.order_of(x)).collect();
    let derived = t.derived_of(&(0..n).collect::<Vec<_>>()).len() as u64;
    let mut squares: Vec<u16> = (0..n).map(|x| t.mul(x, x)).collect();
    squares.sort_unstable();
    squares.dedup();
    let mut pairs: Vec<u64> = (0..n)
        .map(|x| {
            let cent = (0..n).filter(|&y| t.mul(x, y) == t.mul(y, x)).count() as u64;
            orders[x as usize] << 32 | cent
        })
        .collect();
    pairs.sort_unstable();
    let center = pairs.iter().filter(|&&p| p & 0xffff_ffff == n as u64).count() as u64;
    let mut fp = vec![t.size as u64, center, derived, squares.len() as u64];
    fp.extend(pairs);
    fp
}

/// Full isomorphism test by backtracking over images of a minimal
/// generating set.
pub fn isomorphic(a: &TableGroup, b: &TableGroup) -> bool {
    if a.size != b.size {
        return false;
    }
    if fingerprint(a) != fingerprint(b) {
        return false;
    }
    let orders_a: Vec<u64> = (0..a.size as u16).map(|x| a.order_of(x)).collect();
    let orders_b: Vec<u64> = (0..b.size as u16).map(|x| b.order_of(x)).collect();
    let gens = a.generating_set();
    let candidates: Vec<Vec<u16>> = gens
        .iter()
        .map(|&g| {
            let o = orders_a[g as usize];
            (0..b.size as u16).filter(|&x| orders_b[x as usize] == o).collect()
        })
        .collect();
    let ctx = IsoCtx { a, b, gens: &gens, candidates: &candidates, orders_a, orders_b };
    let mut images = vec![0u16; gens.len()];
    extend(&ctx, &mut images, 0)
}

struct IsoCtx<'x> {
    a: &'x TableGroup,
    b: &'x TableGroup,
    gens: &'x [u16],
    candidates: &'x [Vec<u16>],
    orders_a: Vec<u64>,
    orders_b: Vec<u64>,
}

fn extend(ctx: &IsoCtx<'_>, images: &mut Vec<u16>, depth: usize) -> bool {
    if depth == ctx.gens.len() {
        return check_map(ctx.a, ctx.b, ctx.gens, images);
    }
    'cand: for &cand in &ctx.candidates[depth] {
        // Cheap pairwise compatibility with the images already chosen.
        for i in 0..depth {
            let (ga, gb) = (ctx.gens[i], ctx.gens[depth]);
            let (ia, ib) = (images[i], cand);
            if ctx.orders_a[ctx.a.mul(ga, gb) as usize]
                != ctx.orders_b[ctx.b.mul(ia, ib) as usize]
                || ctx.orders_a[ctx.a.comm(ga, gb) as usize]
                    != ctx.orders_b[ctx.b.comm(ia, ib) as usize]
            {
                continue 'cand;
            }
        }
        images[depth] = cand;
        if extend(ctx, images, depth + 1) {
            return true;
        }
    }
    false
}

/// Grow the word map from the generator images and verify it is a bijective
/// homomorphism on the full table.
fn check_map(a: &TableGroup, b: &TableGroup, gens: &[u16], images: &[u16]) -> bool {
    let n = a.size;
    let mut phi: Vec<Option<u16>> = vec![None; n];
    phi[0] = Some(0);
    // BFS over the Cayley graph of A on `gens`, mapping as we go.
    let mut frontier = vec![0u16];
    let mut seen = 1usize;
    while let Some(x) = frontier.pop() {
        let px = phi[x as usize].unwrap();
        for (g, &pg) in gens.iter().zip(images) {
            let y = a.mul(x, *g);
            let py = b.mul(px, pg);
            match phi[y as usize] {
                None => {
                    phi[y as usize] = Some(py);
                    seen += 1;
                    frontier.push(y);
                }
                Some(existing) => {
                    if existing != py {
                        return false;
                    }
                }
            }
        }
    }
    if seen != n {
        return false; // gens do not generate A (cannot happen) or map collapses
    }
    // Bijectivity.
    let mut hit = vec![false; n];
    for v in phi.iter().flatten() {
        if hit[*v as usize] {
            return false;
        }
        hit[*v as usize] = true;
    }
    // Homomorphism on all pairs.
    for x in 0..n as u16 {
        for y in 0..n as u16 {
            let lhs = phi[a.mul(x, y) as usize].unwrap();
            let rhs = b.mul(phi[x as usize].unwrap(), phi[y as usize].unwrap());
            if lhs != rhs {
                return false;
            }
        }
    }
    true
}
