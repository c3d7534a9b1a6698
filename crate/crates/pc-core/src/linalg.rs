//! Small dense linear algebra over F_p and over Z/p^B (the p-local
//! integers truncated at a precision exceeding every invariant factor
//! that can occur for the group at hand).

use crate::error::PcError;

/// Multiplicative inverse mod a prime.
pub fn inv_mod_p(a: u32, p: u32) -> u32 {
    // p is small; extended Euclid via i64.
    let (mut t, mut new_t) = (0i64, 1i64);
    let (mut r, mut new_r) = (p as i64, (a % p) as i64);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    debug_assert_eq!(r, 1, "not invertible mod p");
    t.rem_euclid(p as i64) as u32
}

/// Reduced row echelon form over F_p, in place. Returns pivot column indices
/// (strictly increasing). Zero rows are removed.
pub fn rref_mod_p(rows: &mut Vec<Vec<u32>>, p: u32) -> Vec<usize> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivots: Vec<usize> = Vec::new();
    let mut rank = 0usize;
    for col in 0..ncols {
        let Some(sel) = (rank..rows.len()).find(|&r| rows[r][col] % p != 0) else {
            continue;
        };
        rows.swap(rank, sel);
        let inv = inv_mod_p(rows[rank][col] % p, p);
        for x in rows[rank].iter_mut() {
            *x = (*x * inv) % p;
        }
        for r in 0..rows.len() {
            if r != rank && rows[r][col] % p != 0 {
                let c = rows[r][col] % p;
                for k in col..ncols {
                    let sub = (c * rows[rank][k]) % p;
                    rows[r][k] = (rows[r][k] + p - sub) % p;
                }
            }
        }
        pivots.push(col);
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rows.truncate(rank);
    pivots
}

/// Reduce `row` modulo the span of `basis` (assumed in rref with `pivots`).
pub fn reduce_row_mod_p(row: &mut [u32], basis: &[Vec<u32>], pivots: &[usize], p: u32) {
    for (b, &col) in basis.iter().zip(pivots) {
        let c = row[col] % p;
        if c != 0 {
            for k in 0..row.len() {
                let sub = (c * b[k]) % p;
                row[k] = (row[k] + p - sub) % p;
            }
        }
    }
}

/// Smith normal form of a matrix over Z/p^bexp, with row transforms tracked.
///
/// Because every entry is p-local, pivoting on a minimal-valuation entry keeps
/// all elimination quotients integral, entries never grow, and the diagonal
/// valuations come out non-decreasing. Valuation `bexp` means the entry is zero
/// at working precision.
pub struct PadicSnf {
    /// Diagonal p-valuations, one per pivot, non-decreasing.
    pub diag: Vec<u32>,
    /// Row transform: `left * input ~ diag` after the untracked column ops.
    pub left: Vec<Vec<u128>>,
    /// Inverse of `left`, mod p^bexp.
    pub left_inv: Vec<Vec<u128>>,
    pub p: u32,
    pub bexp: u32,
}

impl PadicSnf {
    pub fn modulus(&self) -> u128 {
        (self.p as u128).pow(self.bexp)
    }
}

fn val_p(mut x: u128, p: u128, bexp: u32) -> u32 {
    if x == 0 {
        return bexp;
    }
    let mut v = 0;
    while x % p == 0 {
        x /= p;
        v += 1;
        if v >= bexp {
            return bexp;
        }
    }
    v
}

/// Inverse of a unit mod p^B by Newton lifting from the inverse mod p.
fn inv_unit_mod(a: u128, p: u128, modulus: u128) -> u128 {
    let mut x = u128::from(inv_mod_p((a % p) as u32, p as u32));
    let mut m = p;
    while m < modulus {
        m = m.checked_mul(m).map_or(modulus, |mm| mm.min(modulus));
        let t = (2u128 % m + m - mulmod(a % m, x % m, m)) % m;
        x = mulmod(x % m, t, m);
    }
    debug_assert_eq!(mulmod(a % modulus, x, modulus), 1 % modulus);
    x
}

#[inline]
fn mulmod(a: u128, b: u128, m: u128) -> u128 {
    // Entries stay below 2^124 / 2; widening via split keeps this exact.
    // For our moduli (p^B < 2^124) use 128-bit splitting multiplication.
    let (ah, al) = (a >> 64, a & ((1u128 << 64) - 1));
    let (bh, bl) = (b >> 64, b & ((1u128 << 64) - 1));
    // a*b = ah*bh*2^128 + (ah*bl + al*bh)*2^64 + al*bl; reduce stepwise.
    let mut acc = mulmod_shift(ah.wrapping_mul(bh) % m, 128, m);
    acc = (acc + mulmod_shift((mulmod64(ah, bl, m) + mulmod64(al, bh, m)) % m, 64, m)) % m;
    (acc + mulmod64(al, bl, m)) % m
}

#[inline]
fn mulmod64(a: u128, b: u128, m: u128) -> u128 {
    // a, b < 2^64 so the product fits u128 exactly.
    (a * b) % m
}

#[inline]
fn mulmod_shift(mut x: u128, shift: u32, m: u128) -> u128 {
    for _ in 0..shift {
        x <<= 1;
        if x >= m {
            x %= m;
        }
    }
    x
}

/// Compute the Smith normal form of `mat` (rows × cols) over Z/p^bexp,
/// tracking row operations. Column operations are applied but not tracked.
pub fn snf_p_local(
    mut mat: Vec<Vec<u128>>,
    p: u32,
    bexp: u32,
) -> Result<PadicSnf, PcError> {
    let nrows = mat.len();
    let ncols = mat.first().map_or(0, |r| r.len());
    if (p as u128).checked_pow(bexp).is_none() || bexp == 0 {
        return Err(PcError::CapExceeded(format!(
            "p-local precision p^{bexp} does not fit in u128"
        )));
    }
    let modulus = (p as u128).pow(bexp);
    let pu = p as u128;
    for row in mat.iter_mut() {
        for x in row.iter_mut() {
            *x %= modulus;
        }
    }
    let mut left: Vec<Vec<u128>> = (0..nrows)
        .map(|i| (0..nrows).map(|j| u128::from(i == j)).collect())
        .collect();
    let mut left_inv = left.clone();
    let mut diag: Vec<u32> = Vec::new();

    let steps = nrows.min(ncols);
    for t in 0..steps {
        // Minimal-valuation pivot in the trailing submatrix.
        let mut best: Option<(usize, usize, u32)> = None;
        for i in t..nrows {
            for j in t..ncols {
                let v = val_p(mat[i][j], pu, bexp);
                if v < bexp && best.map_or(true, |(_, _, bv)| v < bv) {
                    best = Some((i, j, v));
                }
            }
        }
        let Some((pi, pj, pv)) = best else { break };
        mat.swap(t, pi);
        left.swap(t, pi);
        for row in left_inv.iter_mut() {
            row.swap(t, pi);
        }
        for row in mat.iter_mut() {
            row.swap(t, pj);
        }
        // Normalize the pivot to exactly p^pv.
        let unit = mat[t][t] / pu.pow(pv);
        let unit_inv = inv_unit_mod(unit % modulus, pu, modulus);
        for x in mat[t].iter_mut() {
            *x = mulmod(*x, unit_inv, modulus);
        }
        for x in left[t].iter_mut() {
            *x = mulmod(*x, unit_inv, modulus);
        }
        for row in left_inv.iter_mut() {
            row[t] = mulmod(row[t], unit, modulus);
        }
        let pivot_pow = pu.pow(pv);
        // Clear the rest of column t (rows) and row t (columns).
        for i in 0..nrows {
            if i == t || mat[i][t] == 0 {
                continue;
            }
            let q = mat[i][t] / pivot_pow;
            for j in 0..ncols {
                let sub = mulmod(q, mat[t][j], modulus);
                mat[i][j] = (mat[i][j] + modulus - sub) % modulus;
            }
            for j in 0..nrows {
                let sub = mulmod(q, left[t][j], modulus);
                left[i][j] = (left[i][j] + modulus - sub) % modulus;
                let add = mulmod(q, left_inv[j][i], modulus);
                left_inv[j][t] = (left_inv[j][t] + add) % modulus;
            }
        }
        for j in 0..ncols {
            if j == t || mat[t][j] == 0 {
                continue;
            }
            let q = mat[t][j] / pivot_pow;
            for i in 0..nrows {
                let sub = mulmod(q, mat[i][t], modulus);
                mat[i][j] = (mat[i][j] + modulus - sub) % modulus;
            }
        }
        diag.push(pv);
    }
    Ok(PadicSnf { diag, left, left_inv, p, bexp })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rref_basic() {
        let mut rows = vec![vec![1, 1, 0], vec![1, 0, 1], vec![0, 1, 1]];
        let pivots = rref_mod_p(&mut rows, 2);
        assert_eq!(pivots, vec![0, 1]);
        assert_eq!(rows.len(), 2);
    }

    #[test]
    fn inverse_mod_small_primes() {
        for p in [2u32, 3, 5, 7, 11] {
            for a in 1..p {
                assert_eq!((a * inv_mod_p(a, p)) % p, 1);
            }
        }
    }

    #[test]
    fn snf_diag_of_z4_times_z2() {
        // Relation matrix for Z/4 x Z/2 as rows (2x2): diag(4, 2) transposed.
        let mat = vec![vec![4u128, 0], vec![0, 2]];
        let snf = snf_p_local(mat, 2, 20).unwrap();
        let mut d = snf.diag.clone();
        d.sort_unstable();
        assert_eq!(d, vec![1, 2]);
    }

    #[test]
    fn snf_left_transform_consistency() {
        let mat = vec![vec![2u128, 6], vec![4, 8]];
        let snf = snf_p_local(mat.clone(), 2, 24).unwrap();
        let m = snf.modulus();
        // left * left_inv = identity mod 2^24
        for i in 0..2 {
            for j in 0..2 {
                let mut s = 0u128;
                for k in 0..2 {
                    s = (s + snf.left[i][k] * snf.left_inv[k][j]) % m;
                }
                assert_eq!(s, u128::from(i == j));
            }
        }
    }
}
