//! Enumeration of allowable subgroups up to the automorphism action.
//!
//! An allowable subgroup is a proper subspace M of the multiplicator V that
//! supplements the nucleus N. Writing W = M ∩ N (codimension s in N) and
//! fixing the coordinate complement C of N in V, M is the span of W and the
//! graph of a linear map C -> N/W, so the pairs (W, phi) index allowables
//! perfectly: a bitmap over that index space drives an exact orbit walk.

use std::collections::HashMap;

use pc_core::linalg::rref_mod_p;

use crate::error::TreeError;
use crate::rng::SplitMix64;
use crate::Limits;

/// Gaussian binomial [n choose k]_p.
pub fn gaussian_binomial(n: u32, k: u32, p: u32) -> u128 {
    if k > n {
        return 0;
    }
    let mut num = 1u128;
    let mut den = 1u128;
    for i in 0..k {
        num *= (p as u128).pow(n - i) - 1;
        den *= (p as u128).pow(i + 1) - 1;
    }
    num / den
}

/// Perfect index over reduced echelon bases of k-dimensional subspaces of
/// F_p^m: combination rank of the pivot set, then mixed-radix free entries.
pub struct EchelonIndexer {
    pub m: usize,
    pub k: usize,
    pub p: u32,
    pivot_sets: Vec<Vec<usize>>,
    offsets: Vec<u128>,
    set_rank: HashMap<Vec<usize>, usize>,
    pub total: u128,
}

impl EchelonIndexer {
    pub fn new(m: usize, k: usize, p: u32) -> Self {
        let mut pivot_sets = Vec::new();
        if k == 0 {
            pivot_sets.push(Vec::new());
        } else if k <= m {
            let mut combo: Vec<usize> = (0..k).collect();
            loop {
                pivot_sets.push(combo.clone());
                // Next combination in lex order; position i caps at m - (k - i).
                let mut i = k;
                let mut advanced = false;
                while i > 0 {
                    i -= 1;
                    if combo[i] < m - (k - i) {
                        combo[i] += 1;
                        for j in i + 1..k {
                            combo[j] = combo[j - 1] + 1;
                        }
                        advanced = true;
                        break;
                    }
                }
                if !advanced {
                    break;
                }
            }
        }
        let mut offsets = Vec::with_capacity(pivot_sets.len() + 1);
        let mut acc = 0u128;
        let mut set_rank = HashMap::new();
        for (ci, ps) in pivot_sets.iter().enumerate() {
            set_rank.insert(ps.clone(), ci);
            offsets.push(acc);
            acc += (p as u128).pow(free_count(ps, m) as u32);
        }
        offsets.push(acc);
        EchelonIndexer { m, k, p, pivot_sets, offsets, set_rank, total: acc }
    }

    /// Index of a subspace given by reduced echelon rows.
    pub fn index(&self, rows: &[Vec<u32>]) -> u128 {
        debug_assert_eq!(rows.len(), self.k);
        let pivots: Vec<usize> =
            rows.iter().map(|r| r.iter().position(|&x| x != 0).unwrap()).collect();
        let ci = self.set_rank[&pivots];
        let mut digits = 0u128;
        for (r, row) in rows.iter().enumerate() {
            for col in pivots[r] + 1..self.m {
                if !pivots.contains(&col) {
                    digits = digits * self.p as u128 + row[col] as u128;
                }
            }
        }
        self.offsets[ci] + digits
    }

    /// Reduced echelon rows of the subspace with the given index.
    pub fn rows(&self, idx: u128) -> Vec<Vec<u32>> {
        let ci = match self.offsets.binary_search(&idx) {
            Ok(exact) => {
                // offsets has a trailing total; an exact hit on it is out of range
                if exact == self.offsets.len() - 1 { exact - 1 } else { exact }
            }
            Err(ins) => ins - 1,
        };
        let pivots = &self.pivot_sets[ci];
        let mut digits = idx - self.offsets[ci];
        let nfree = free_count(pivots, self.m);
        let mut free_vals = vec![0u32; nfree];
        for slot in (0..nfree).rev() {
            free_vals[slot] = (digits % self.p as u128) as u32;
            digits /= self.p as u128;
        }
        let mut rows = vec![vec![0u32; self.m]; self.k];
        let mut slot = 0usize;
        for (r, &piv) in pivots.iter().enumerate() {
            rows[r][piv] = 1;
            for col in piv + 1..self.m {
                if !pivots.contains(&col) {
                    rows[r][col] = free_vals[slot];
                    slot += 1;
                }
            }
        }
        rows
    }
}

fn free_count(pivots: &[usize], m: usize) -> usize {
    pivots
        .iter()
        .map(|&piv| (piv + 1..m).filter(|c| !pivots.contains(c)).count())
        .sum()
}

/// Fixed adapted coordinates for allowable-subgroup bookkeeping.
pub struct AllowableSpace {
    pub p: u32,
    pub mu: usize,
    /// Nucleus in reduced echelon form over the multiplicator coordinates.
    pub nucleus: Vec<Vec<u32>>,
    pub n_pivots: Vec<usize>,
    /// Complement coordinates (the non-pivot columns of the nucleus).
    pub free_cols: Vec<usize>,
}

impl AllowableSpace {
    pub fn new(p: u32, mu: usize, nucleus: Vec<Vec<u32>>) -> Self {
        let n_pivots: Vec<usize> =
            nucleus.iter().map(|r| r.iter().position(|&x| x != 0).unwrap()).collect();
        let free_cols: Vec<usize> = (0..mu).filter(|c| !n_pivots.contains(c)).collect();
        AllowableSpace { p, mu, nucleus, n_pivots, free_cols }
    }

    pub fn nu(&self) -> usize {
        self.nucleus.len()
    }

    /// Number of allowable subgroups of codimension s.
    pub fn count_at_codim(&self, s: usize) -> u128 {
        let nu = self.nu() as u32;
        let cdim = (self.mu - self.nu()) as u32;
        gaussian_binomial(nu, nu - s as u32, self.p)
            * (self.p as u128).pow(s as u32 * cdim)
    }

    /// Reduce a multiplicator vector by the nucleus; the residue's free-column
    /// entries are its coordinates in V/N.
    fn reduce_by_nucleus(&self, v: &mut [u32]) {
        for (row, &piv) in self.nucleus.iter().zip(&self.n_pivots) {
            let c = v[piv];
            if c != 0 {
                for j in 0..self.mu {
                    v[j] = (v[j] + (self.p - c) * row[j]) % self.p;
                }
            }
        }
    }

    /// Nucleus coordinates of a vector that lies in N.
    fn nucleus_coords(&self, v: &[u32]) -> Vec<u32> {
        let coords: Vec<u32> = self.n_pivots.iter().map(|&piv| v[piv]).collect();
        debug_assert!({
            let mut check = v.to_vec();
            self.reduce_by_nucleus(&mut check);
            check.iter().all(|&x| x == 0)
        });
        coords
    }

    fn nucleus_vector(&self, coords: &[u32]) -> Vec<u32> {
        let mut v = vec![0u32; self.mu];
        for (c, row) in coords.iter().zip(&self.nucleus) {
            if *c != 0 {
                for j in 0..self.mu {
                    v[j] = (v[j] + c * row[j]) % self.p;
                }
            }
        }
        v
    }

    /// Decompose an allowable subspace (rref rows over V) into (W, phi):
    /// W in nucleus coordinates (rref) and the phi digits. None if the rows
    /// do not describe an allowable subspace of codimension s.
    pub fn decompose(&self, rows: &[Vec<u32>], s: usize) -> Option<(Vec<Vec<u32>>, Vec<u32>)> {
        let p = self.p;
        let cdim = self.free_cols.len();
        if rows.len() + s != self.mu {
            return None;
        }
        // Projection of each row to V/N, augmented with the row combination.
        let mut aug: Vec<Vec<u32>> = Vec::with_capacity(rows.len());
        for (r, row) in rows.iter().enumerate() {
            let mut v = row.clone();
            self.reduce_by_nucleus(&mut v);
            let mut a: Vec<u32> = self.free_cols.iter().map(|&c| v[c]).collect();
            let mut tag = vec![0u32; rows.len()];
            tag[r] = 1;
            a.append(&mut tag);
            aug.push(a);
        }
        let pivots = rref_mod_p(&mut aug, p);
        // Allowable iff the projection has full rank cdim.
        let proj_rank = pivots.iter().filter(|&&c| c < cdim).count();
        if proj_rank != cdim {
            return None;
        }
        // Kernel rows (zero projection part) give W as combinations of rows.
        let mut w_rows: Vec<Vec<u32>> = Vec::new();
        for a in &aug {
            if a[..cdim].iter().all(|&x| x == 0) {
                let mut vec = vec![0u32; self.mu];
                for (r, &c) in a[cdim..].iter().enumerate() {
                    if c != 0 {
                        for j in 0..self.mu {
                            vec[j] = (vec[j] + c * rows[r][j]) % p;
                        }
                    }
                }
                w_rows.push(self.nucleus_coords(&vec));
            }
        }
        rref_mod_p(&mut w_rows, p);
        if w_rows.len() != self.nu() - s {
            return None;
        }
        let w_pivots: Vec<usize> =
            w_rows.iter().map(|r| r.iter().position(|&x| x != 0).unwrap()).collect();
        // phi: for the basis vector of C at free column f, find m in M with
        // projection e_f; its nucleus part mod W has s canonical digits.
        let mut phi_digits: Vec<u32> = Vec::with_capacity(cdim * s);
        for (fi, &f) in self.free_cols.iter().enumerate() {
            // Solve x · proj = e_fi using the rref of the augmented matrix:
            // the row with pivot at column fi gives the combination directly.
            let row = aug
                .iter()
                .zip(&pivots)
                .find(|(_, &piv)| piv == fi)
                .map(|(a, _)| a.clone())
                .expect("full-rank projection has a pivot per free column");
            // The projection part of `row` may have other nonzero entries only
            // at non-pivot columns; with full column rank cdim = rank, rref
            // makes the projection part exactly e_fi.
            debug_assert!(row[..cdim]
                .iter()
                .enumerate()
                .all(|(c, &x)| (c == fi) == (x == 1) || x == 0));
            let mut m_vec = vec![0u32; self.mu];
            for (r, &c) in row[cdim..].iter().enumerate() {
                if c != 0 {
                    for j in 0..self.mu {
                        m_vec[j] = (m_vec[j] + c * rows[r][j]) % p;
                    }
                }
            }
            // n-part = m - e_f lies in N.
            m_vec[f] = (m_vec[f] + p - 1) % p;
            let mut ncoords = self.nucleus_coords(&m_vec);
            // Canonical residue mod W.
            for (wrow, &wpiv) in w_rows.iter().zip(&w_pivots) {
                let c = ncoords[wpiv];
                if c != 0 {
                    for j in 0..self.nu() {
                        ncoords[j] = (ncoords[j] + (p - c) * wrow[j]) % p;
                    }
                }
            }
            for j in 0..self.nu() {
                if !w_pivots.contains(&j) {
                    phi_digits.push(ncoords[j]);
                }
            }
            let _ = fi;
        }
        debug_assert_eq!(phi_digits.len(), cdim * s);
        Some((w_rows, phi_digits))
    }

    /// Rebuild the rref basis of the allowable subspace from (W, phi digits).
    pub fn compose(&self, w_rows: &[Vec<u32>], phi_digits: &[u32], s: usize) -> Vec<Vec<u32>> {
        let p = self.p;
        let w_pivots: Vec<usize> =
            w_rows.iter().map(|r| r.iter().position(|&x| x != 0).unwrap()).collect();
        let coset_cols: Vec<usize> =
            (0..self.nu()).filter(|j| !w_pivots.contains(j)).collect();
        debug_assert_eq!(coset_cols.len(), s);
        let mut rows: Vec<Vec<u32>> = w_rows.iter().map(|r| self.nucleus_vector(r)).collect();
        for (fi, &f) in self.free_cols.iter().enumerate() {
            let digits = &phi_digits[fi * s..(fi + 1) * s];
            let mut ncoords = vec![0u32; self.nu()];
            for (d, &col) in digits.iter().zip(&coset_cols) {
                ncoords[col] = *d;
            }
            let mut v = self.nucleus_vector(&ncoords);
            v[f] = (v[f] + 1) % p;
            rows.push(v);
        }
        rref_mod_p(&mut rows, p);
        debug_assert_eq!(rows.len(), self.mu - s);
        rows
    }

    /// Uniformly random allowable subspace of codimension s.
    pub fn sample(&self, s: usize, rng: &mut SplitMix64) -> Vec<Vec<u32>> {
        let p = self.p;
        let wdim = self.nu() - s;
        // Uniform subspace: row space of a uniform full-rank wdim x nu matrix.
        let w_rows: Vec<Vec<u32>> = loop {
            let mut cand: Vec<Vec<u32>> = (0..wdim)
                .map(|_| (0..self.nu()).map(|_| rng.below(p as u64) as u32).collect())
                .collect();
            if rref_mod_p(&mut cand, p).len() == wdim {
                break cand;
            }
            if wdim == 0 {
                break Vec::new();
            }
        };
        let cdim = self.free_cols.len();
        let phi: Vec<u32> = (0..cdim * s).map(|_| rng.below(p as u64) as u32).collect();
        self.compose(&w_rows, &phi, s)
    }
}

/// One orbit of allowable subgroups under the automorphism action.
#[derive(Debug, Clone)]
pub struct AllowableOrbit {
    pub codim: usize,
    /// rref basis (over multiplicator coordinates) of the minimal-index member.
    pub rep_rows: Vec<Vec<u32>>,
    pub min_index: u128,
    pub size: u64,
}

/// Enumerate every orbit of allowable subgroups under the matrices in
/// `actions` (rows = images of the multiplicator basis). Uses the bit-packed
/// kernel for p = 2, the generic digit kernel otherwise.
pub fn enumerate_allowable_orbits(
    space: &AllowableSpace,
    actions: &[Vec<Vec<u32>>],
    limits: &Limits,
) -> Result<Vec<AllowableOrbit>, TreeError> {
    let mut out = Vec::new();
    for s in 1..=space.nu() {
        match crate::orbit_p2::orbits_at_codim_p2(space, actions, s, limits)? {
            Some(orbits) => out.extend(orbits),
            None => out.extend(orbits_at_codim(space, actions, s, limits)?),
        }
    }
    Ok(out)
}

pub fn orbits_at_codim(
    space: &AllowableSpace,
    actions: &[Vec<Vec<u32>>],
    s: usize,
    limits: &Limits,
) -> Result<Vec<AllowableOrbit>, TreeError> {
    let p = space.p;
    let nu = space.nu();
    let cdim = space.free_cols.len();
    let w_indexer = EchelonIndexer::new(nu, nu - s, p);
    let phi_count = (p as u128).pow((s * cdim) as u32);
    let total = w_indexer.total * phi_count;
    if total > limits.orbit_bitmap_bits {
        return Err(TreeError::CapExceeded(format!(
            "codimension-{s} allowables need a bitmap of {total} bits"
        )));
    }
    let index_of = |rows: &[Vec<u32>]| -> u128 {
        let (w_rows, phi_digits) =
            space.decompose(rows, s).expect("action must preserve allowability");
        let mut phi_idx = 0u128;
        for &d in &phi_digits {
            phi_idx = phi_idx * p as u128 + d as u128;
        }
        w_indexer.index(&w_rows) * phi_count + phi_idx
    };
    let rows_of = |idx: u128| -> Vec<Vec<u32>> {
        let w_idx = idx / phi_count;
        let mut phi_idx = idx % phi_count;
        let w_rows = w_indexer.rows(w_idx);
        let mut phi_digits = vec![0u32; s * cdim];
        for slot in (0..s * cdim).rev() {
            phi_digits[slot] = (phi_idx % p as u128) as u32;
            phi_idx /= p as u128;
        }
        space.compose(&w_rows, &phi_digits, s)
    };
    let apply = |rows: &[Vec<u32>], a: &[Vec<u32>]| -> Vec<Vec<u32>> {
        let mut img: Vec<Vec<u32>> = rows
            .iter()
            .map(|r| {
                let mut v = vec![0u32; space.mu];
                for (i, &c) in r.iter().enumerate() {
                    if c != 0 {
                        for j in 0..space.mu {
                            v[j] = (v[j] + c * a[i][j]) % p;
                        }
                    }
                }
                v
            })
            .collect();
        rref_mod_p(&mut img, p);
        img
    };

    let words = ((total + 63) / 64) as usize;
    let mut visited = vec![0u64; words];
    let mut orbits = Vec::new();
    let mut seed = 0u128;
    while seed < total {
        let word = (seed / 64) as usize;
        if visited[word] == u64::MAX {
            seed = (seed / 64 + 1) * 64;
            continue;
        }
        if visited[word] >> (seed % 64) & 1 == 1 {
            seed += 1;
            continue;
        }
        visited[word] |= 1 << (seed % 64);
        let mut min_index = seed;
        let mut size = 1u64;
        let mut frontier: Vec<u128> = vec![seed];
        while !frontier.is_empty() {
            // Images of the whole frontier under every action generator.
            let images: Vec<u128> = if frontier.len() >= 64 {
                use rayon::prelude::*;
                frontier
                    .par_iter()
                    .flat_map_iter(|&idx| {
                        let rows = rows_of(idx);
                        actions
                            .iter()
                            .map(|a| index_of(&apply(&rows, a)))
                            .collect::<Vec<_>>()
                            .into_iter()
                    })
                    .collect()
            } else {
                frontier
                    .iter()
                    .flat_map(|&idx| {
                        let rows = rows_of(idx);
                        actions.iter().map(|a| index_of(&apply(&rows, a))).collect::<Vec<_>>()
                    })
                    .collect()
            };
            frontier.clear();
            for idx in images {
                let w = (idx / 64) as usize;
                let bit = 1u64 << (idx % 64);
                if visited[w] & bit == 0 {
                    visited[w] |= bit;
                    frontier.push(idx);
                    size += 1;
                    min_index = min_index.min(idx);
                }
            }
        }
        orbits.push(AllowableOrbit { codim: s, rep_rows: rows_of(min_index), min_index, size });
        seed += 1;
    }
    Ok(orbits)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_binomials() {
        assert_eq!(gaussian_binomial(4, 2, 2), 35);
        assert_eq!(gaussian_binomial(10, 5, 2), 109221651);
        assert_eq!(gaussian_binomial(3, 1, 3), 13);
    }

    #[test]
    fn echelon_indexer_roundtrip() {
        let idx = EchelonIndexer::new(4, 2, 2);
        assert_eq!(idx.total, 35);
        for i in 0..35u128 {
            let rows = idx.rows(i);
            assert_eq!(idx.index(&rows), i);
        }
        // Degenerate dimensions.
        let zero = EchelonIndexer::new(5, 0, 2);
        assert_eq!(zero.total, 1);
        assert!(zero.rows(0).is_empty());
        let full = EchelonIndexer::new(3, 3, 2);
        assert_eq!(full.total, 1);
    }

    #[test]
    fn counts_sum_over_codims() {
        // Full nucleus: allowables of codim s are all subspaces of dim nu - s.
        let nucleus: Vec<Vec<u32>> = (0..3)
            .map(|i| (0..3).map(|j| u32::from(i == j)).collect())
            .collect();
        let space = AllowableSpace::new(2, 3, nucleus);
        let total: u128 = (1..=3).map(|s| space.count_at_codim(s)).sum();
        // Proper subspaces of F_2^3: 7 + 7 + 1 = 15.
        assert_eq!(total, 15);
    }

    #[test]
    fn decompose_compose_roundtrip() {
        // mu = 4, nucleus = first 2 coordinates.
        let nucleus = vec![vec![1, 0, 0, 0], vec![0, 1, 0, 0]];
        let space = AllowableSpace::new(2, 4, nucleus);
        let s = 1;
        let w_indexer = EchelonIndexer::new(2, 1, 2);
        let phi_count = (2u128).pow((s * 2) as u32);
        let mut seen = std::collections::HashSet::new();
        for widx in 0..w_indexer.total {
            for phi in 0..phi_count {
                let w_rows = w_indexer.rows(widx);
                let mut digits = vec![0u32; s * 2];
                let mut v = phi;
                for slot in (0..s * 2).rev() {
                    digits[slot] = (v % 2) as u32;
                    v /= 2;
                }
                let rows = space.compose(&w_rows, &digits, s);
                let (w2, d2) = space.decompose(&rows, s).unwrap();
                assert_eq!(w2, w_rows);
                assert_eq!(d2, digits);
                seen.insert(rows);
            }
        }
        assert_eq!(seen.len() as u128, space.count_at_codim(1));
    }
}
