//! Bit-packed orbit kernel for p = 2: subspace bases are u32 bitmask rows,
//! matrix application is an XOR fold, and echelon forms take a few dozen
//! bit operations. Same (W, phi) indexing scheme as the generic kernel.


use crate::error::TreeError;
use crate::orbit::{AllowableOrbit, AllowableSpace, EchelonIndexer};
use crate::Limits;

const MAX_MU: usize = 28;

/// Reduced echelon form of bitmask rows; rows come back sorted by pivot.
#[inline]
fn rref_bits(rows: &mut Vec<u32>) {
    let mut table: [u32; MAX_MU + 1] = [0; MAX_MU + 1];
    for mut r in rows.drain(..) {
        while r != 0 {
            let piv = r.trailing_zeros() as usize;
            if table[piv] == 0 {
                table[piv] = r;
                break;
            }
            r ^= table[piv];
        }
    }
    // Back-substitute for the fully reduced form, high pivots first.
    for piv in (0..MAX_MU).rev() {
        if table[piv] == 0 {
            continue;
        }
        let mut r = table[piv];
        let mut rest = r & !(1 << piv);
        while rest != 0 {
            let q = rest.trailing_zeros() as usize;
            if table[q] != 0 && q != piv {
                r ^= table[q];
            }
            rest &= rest - 1;
            rest &= r; // keep only bits still present
        }
        table[piv] = r;
    }
    for (piv, &r) in table.iter().enumerate() {
        if r != 0 {
            debug_assert_eq!(r.trailing_zeros() as usize, piv);
            rows.push(r);
        }
    }
}

/// Perfect index over k-dimensional subspaces of F_2^m, bitmask flavor.
struct EchelonIndexerP2 {
    m: usize,
    /// Combination index lookup: pivot bitmask -> rank, or u32::MAX.
    rank_of_mask: Vec<u32>,
    /// Per pivot set: its mask, cumulative offset, and the (row, col) free
    /// slots in fixed (row-major, ascending column) order.
    masks: Vec<u32>,
    offsets: Vec<u128>,
    slots: Vec<Vec<(u8, u8)>>,
    total: u128,
}

impl EchelonIndexerP2 {
    fn new(m: usize, k: usize) -> Self {
        // Generate pivot position combinations in the same lex order as the
        // generic indexer so the two kernels agree on indices.
        let generic = EchelonIndexer::new(m, k, 2);
        let mut rank_of_mask = vec![u32::MAX; 1 << m];
        let mut masks = Vec::new();
        let mut offsets = Vec::new();
        let mut slots = Vec::new();
        let mut acc = 0u128;
        let mut ci = 0u32;
        // Reconstruct combination order by decoding each offset start.
        loop {
            if acc >= generic.total && !(generic.total == 1 && ci == 0) {
                break;
            }
            let rows = generic.rows(acc);
            let pivots: Vec<usize> =
                rows.iter().map(|r| r.iter().position(|&x| x != 0).unwrap()).collect();
            let mask = pivots.iter().fold(0u32, |m, &p| m | (1 << p));
            let mut sl: Vec<(u8, u8)> = Vec::new();
            for (r, &piv) in pivots.iter().enumerate() {
                for col in piv + 1..m {
                    if mask >> col & 1 == 0 {
                        sl.push((r as u8, col as u8));
                    }
                }
            }
            let span = 1u128 << sl.len();
            rank_of_mask[mask as usize] = ci;
            masks.push(mask);
            offsets.push(acc);
            slots.push(sl);
            acc += span;
            ci += 1;
            if k == 0 {
                break;
            }
        }
        EchelonIndexerP2 { m, rank_of_mask, masks, offsets, slots, total: acc }
    }

    #[inline]
    fn index(&self, rows: &[u32]) -> u128 {
        let mask = rows.iter().fold(0u32, |m, &r| m | (r & r.wrapping_neg()));
        let ci = self.rank_of_mask[mask as usize] as usize;
        let mut digits = 0u128;
        for &(r, col) in &self.slots[ci] {
            digits = digits << 1 | (rows[r as usize] >> col & 1) as u128;
        }
        self.offsets[ci] + digits
    }

    #[inline]
    fn rows(&self, idx: u128, out: &mut Vec<u32>) {
        let ci = match self.offsets.binary_search(&idx) {
            Ok(c) => c,
            Err(ins) => ins - 1,
        };
        out.clear();
        let mask = self.masks[ci];
        let mut m = mask;
        while m != 0 {
            out.push(m & m.wrapping_neg());
            m &= m - 1;
        }
        let mut digits = idx - self.offsets[ci];
        for &(r, col) in self.slots[ci].iter().rev() {
            if digits & 1 == 1 {
                out[r as usize] |= 1 << col;
            }
            digits >>= 1;
        }
        let _ = self.m;
    }
}

/// Adapted coordinates, bitmask flavor.
pub struct P2Space {
    pub mu: usize,
    nucleus_rows: Vec<u32>,
    n_pivot_pos: Vec<usize>,
    free_cols: Vec<usize>,
}

impl P2Space {
    pub fn new(space: &AllowableSpace) -> Option<P2Space> {
        // The pivot-mask lookup table has 2^nu entries; beyond that fall back
        // to the generic kernel.
        if space.p != 2 || space.mu > MAX_MU || space.nucleus.len() > 20 {
            return None;
        }
        let to_mask = |row: &[u32]| -> u32 {
            row.iter().enumerate().fold(0u32, |m, (j, &v)| if v != 0 { m | (1 << j) } else { m })
        };
        Some(P2Space {
            mu: space.mu,
            nucleus_rows: space.nucleus.iter().map(|r| to_mask(r)).collect(),
            n_pivot_pos: space.n_pivots.clone(),
            free_cols: space.free_cols.clone(),
        })
    }

    pub fn nu(&self) -> usize {
        self.nucleus_rows.len()
    }

    /// Residue of v modulo the nucleus.
    #[inline]
    fn reduce_by_nucleus(&self, mut v: u32) -> u32 {
        for (row, &piv) in self.nucleus_rows.iter().zip(&self.n_pivot_pos) {
            if v >> piv & 1 == 1 {
                v ^= row;
            }
        }
        v
    }

    /// Nucleus coordinates (bit r = coefficient of nucleus row r) of v in N.
    #[inline]
    fn nucleus_coords(&self, v: u32) -> u32 {
        let mut c = 0u32;
        for (r, &piv) in self.n_pivot_pos.iter().enumerate() {
            c |= (v >> piv & 1) << r;
        }
        debug_assert_eq!(self.reduce_by_nucleus(v), 0);
        c
    }

    #[inline]
    fn nucleus_vector(&self, coords: u32) -> u32 {
        let mut v = 0u32;
        let mut c = coords;
        while c != 0 {
            let r = c.trailing_zeros() as usize;
            v ^= self.nucleus_rows[r];
            c &= c - 1;
        }
        v
    }
}

struct CodimCtx<'a> {
    space: &'a P2Space,
    s: usize,
    cdim: usize,
    w_indexer: EchelonIndexerP2,
    phi_count: u128,
}

/// Reusable buffers for the hot path.
#[derive(Default)]
struct Scratch {
    aug: Vec<u32>,
    table: Vec<u32>,
    kernel_tags: Vec<u32>,
    w_rows: Vec<u32>,
    digit_sets: Vec<u32>,
}

impl CodimCtx<'_> {
    /// (W, phi) index of an allowable subspace given as rref bitmask rows.
    fn index(&self, rows: &[u32], sc: &mut Scratch) -> u128 {
        // With a full nucleus the coordinates are the identity and the
        // subspace indexes itself.
        if self.cdim == 0 {
            return self.w_indexer.index(rows);
        }
        let sp = self.space;
        let nu = sp.nu();
        let k = rows.len();
        // Augment projection-to-V/N with row tags; cdim + k bits per row.
        sc.aug.clear();
        for (r, &row) in rows.iter().enumerate() {
            let res = sp.reduce_by_nucleus(row);
            let mut proj = 0u32;
            for (fi, &f) in sp.free_cols.iter().enumerate() {
                proj |= (res >> f & 1) << fi;
            }
            sc.aug.push(proj | 1 << (self.cdim + r));
        }
        // Echelonize on the projection bits only.
        sc.table.clear();
        sc.table.resize(self.cdim, 0);
        sc.kernel_tags.clear();
        let proj_mask: u32 = (1 << self.cdim) - 1;
        for i in 0..k {
            let mut a = sc.aug[i];
            loop {
                let pbits = a & proj_mask;
                if pbits == 0 {
                    sc.kernel_tags.push(a >> self.cdim);
                    break;
                }
                let piv = pbits.trailing_zeros() as usize;
                if sc.table[piv] == 0 {
                    sc.table[piv] = a;
                    break;
                }
                a ^= sc.table[piv];
            }
        }
        debug_assert!(sc.table.iter().all(|&t| t != 0), "projection must have full rank");
        // Fully reduce so each table row's projection part is exactly e_piv.
        for piv in (0..self.cdim).rev() {
            let mut row = sc.table[piv];
            let mut rest = row & proj_mask & !(1 << piv);
            while rest != 0 {
                let q = rest.trailing_zeros() as usize;
                row ^= sc.table[q];
                rest = row & proj_mask & !(1 << piv);
            }
            sc.table[piv] = row;
        }
        // W rows in nucleus coordinates.
        sc.w_rows.clear();
        for &tags in &sc.kernel_tags {
            let mut v = 0u32;
            let mut t = tags;
            while t != 0 {
                let r = t.trailing_zeros() as usize;
                v ^= rows[r];
                t &= t - 1;
            }
            sc.w_rows.push(sp.nucleus_coords(v));
        }
        rref_bits(&mut sc.w_rows);
        let w_rows = &sc.w_rows;
        debug_assert_eq!(w_rows.len(), nu - self.s);
        let w_pivmask = w_rows.iter().fold(0u32, |m, &r| m | (r & r.wrapping_neg()));
        let w_idx = self.w_indexer.index(w_rows);
        // phi digits: for each free column f, the canonical N/W residue of the
        // nucleus part of the member projecting to e_f.
        let mut phi = 0u128;
        for fi in 0..self.cdim {
            let tags = sc.table[fi] >> self.cdim;
            let mut m_vec = 0u32;
            let mut t = tags;
            while t != 0 {
                let r = t.trailing_zeros() as usize;
                m_vec ^= rows[r];
                t &= t - 1;
            }
            m_vec ^= 1 << sp.free_cols[fi];
            let mut ncoords = sp.nucleus_coords(m_vec);
            for &w in w_rows.iter() {
                let piv = w.trailing_zeros();
                if ncoords >> piv & 1 == 1 {
                    ncoords ^= w;
                }
            }
            for j in 0..nu {
                if w_pivmask >> j & 1 == 0 {
                    phi = phi << 1 | (ncoords >> j & 1) as u128;
                }
            }
        }
        w_idx * self.phi_count + phi
    }

    /// Rebuild rref rows from an index.
    fn rows(&self, idx: u128, out: &mut Vec<u32>, sc: &mut Scratch) {
        if self.cdim == 0 {
            self.w_indexer.rows(idx, out);
            return;
        }
        let sp = self.space;
        let nu = sp.nu();
        let w_idx = idx / self.phi_count;
        let mut phi = idx % self.phi_count;
        self.w_indexer.rows(w_idx, &mut sc.w_rows);
        let w_rows = &sc.w_rows;
        let w_pivmask = w_rows.iter().fold(0u32, |m, &r| m | (r & r.wrapping_neg()));
        out.clear();
        for &w in w_rows.iter() {
            out.push(sp.nucleus_vector(w));
        }
        // Decode phi digits in reverse order of packing.
        sc.digit_sets.clear();
        sc.digit_sets.resize(self.cdim, 0);
        for fi in (0..self.cdim).rev() {
            let mut ncoords = 0u32;
            for j in (0..nu).rev() {
                if w_pivmask >> j & 1 == 0 {
                    ncoords |= ((phi & 1) as u32) << j;
                    phi >>= 1;
                }
            }
            sc.digit_sets[fi] = ncoords;
        }
        for (fi, &f) in sp.free_cols.iter().enumerate() {
            out.push(sp.nucleus_vector(sc.digit_sets[fi]) ^ (1 << f));
        }
        rref_bits(out);
        debug_assert_eq!(out.len(), sp.mu - self.s);
    }
}

/// Orbit enumeration at one codimension with the bitmask kernel.
pub fn orbits_at_codim_p2(
    space: &AllowableSpace,
    actions_digits: &[Vec<Vec<u32>>],
    s: usize,
    limits: &Limits,
) -> Result<Option<Vec<AllowableOrbit>>, TreeError> {
    let Some(sp) = P2Space::new(space) else { return Ok(None) };
    let nu = sp.nu();
    let cdim = sp.free_cols.len();
    let w_indexer = EchelonIndexerP2::new(nu, nu - s);
    let phi_bits = s * cdim;
    let phi_count = 1u128 << phi_bits;
    let total = w_indexer.total * phi_count;
    if total > limits.orbit_bitmap_bits {
        return Err(TreeError::CapExceeded(format!(
            "codimension-{s} allowables need a bitmap of {total} bits"
        )));
    }
    if total > 1 << 62 {
        return Err(TreeError::CapExceeded("allowable index space exceeds u64".into()));
    }
    let total64 = total as u64;
    let ctx = CodimCtx { space: &sp, s, cdim, w_indexer, phi_count };
    // Action matrices as rows of bitmasks.
    let actions: Vec<Vec<u32>> = actions_digits
        .iter()
        .map(|a| {
            a.iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .fold(0u32, |m, (j, &v)| if v != 0 { m | (1 << j) } else { m })
                })
                .collect()
        })
        .collect();
    let apply = |rows: &[u32], act: &[u32], out: &mut Vec<u32>| {
        out.clear();
        for &r in rows {
            let mut img = 0u32;
            let mut bits = r;
            while bits != 0 {
                img ^= act[bits.trailing_zeros() as usize];
                bits &= bits - 1;
            }
            out.push(img);
        }
        rref_bits(out);
    };

    let words = (total64 as usize + 63) / 64;
    let mut visited = vec![0u64; words];
    let mut orbits = Vec::new();
    let mut rows_buf: Vec<u32> = Vec::new();
    let mut img_buf: Vec<u32> = Vec::new();
    let mut scratch = Scratch::default();
    let nthreads = rayon::current_num_threads().max(1);
    let mut seed = 0u64;
    while seed < total64 {
        let w = (seed / 64) as usize;
        if visited[w] == u64::MAX {
            seed = (seed / 64 + 1) * 64;
            continue;
        }
        if visited[w] >> (seed % 64) & 1 == 1 {
            seed += 1;
            continue;
        }
        visited[w] |= 1 << (seed % 64);
        let mut min_index = seed;
        let mut size = 1u64;
        let mut frontier: Vec<u64> = vec![seed];
        while !frontier.is_empty() {
            let images: Vec<u64> = if frontier.len() >= 2048 && nthreads > 1 {
                use rayon::prelude::*;
                frontier
                    .par_chunks(1024)
                    .flat_map_iter(|chunk| {
                        let mut rb: Vec<u32> = Vec::new();
                        let mut ib: Vec<u32> = Vec::new();
                        let mut sc = Scratch::default();
                        let mut out = Vec::with_capacity(chunk.len() * actions.len());
                        for &idx in chunk {
                            ctx.rows(idx as u128, &mut rb, &mut sc);
                            for act in &actions {
                                apply(&rb, act, &mut ib);
                                out.push(ctx.index(&ib, &mut sc) as u64);
                            }
                        }
                        out.into_iter()
                    })
                    .collect()
            } else {
                let mut out = Vec::with_capacity(frontier.len() * actions.len());
                for &idx in &frontier {
                    ctx.rows(idx as u128, &mut rows_buf, &mut scratch);
                    for act in &actions {
                        apply(&rows_buf, act, &mut img_buf);
                        out.push(ctx.index(&img_buf, &mut scratch) as u64);
                    }
                }
                out
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
        let mut rep: Vec<u32> = Vec::new();
        ctx.rows(min_index as u128, &mut rep, &mut scratch);
        let rep_rows: Vec<Vec<u32>> = rep
            .iter()
            .map(|&r| (0..sp.mu).map(|j| r >> j & 1).collect())
            .collect();
        orbits.push(AllowableOrbit { codim: s, rep_rows, min_index: min_index as u128, size });
        seed += 1;
    }
    Ok(Some(orbits))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p2_indexer_matches_generic() {
        let generic = EchelonIndexer::new(5, 2, 2);
        let packed = EchelonIndexerP2::new(5, 2);
        assert_eq!(generic.total, packed.total);
        let mut buf = Vec::new();
        for idx in 0..generic.total {
            let rows = generic.rows(idx);
            let masks: Vec<u32> = rows
                .iter()
                .map(|r| r.iter().enumerate().fold(0u32, |m, (j, &v)| m | (v << j)))
                .collect();
            assert_eq!(packed.index(&masks), idx);
            packed.rows(idx, &mut buf);
            assert_eq!(buf, masks);
        }
    }

    #[test]
    fn rref_bits_reduces_fully() {
        let mut rows = vec![0b110u32, 0b011, 0b101];
        rref_bits(&mut rows);
        // Rank 2: pivots at bits 0 and 1, fully reduced.
        assert_eq!(rows.len(), 2);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.trailing_zeros() as usize, i);
        }
    }
}
