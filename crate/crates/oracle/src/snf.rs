//! Classical integer Smith normal form by elementary row and column
//! operations with full pivoting on the least nonzero magnitude.

use pc_core::PcPresentation;

/// Invariant factors (absolute values, ascending, units dropped).
pub fn smith_invariants(mut m: Vec<Vec<i128>>) -> Vec<i128> {
    let nrows = m.len();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut out = Vec::new();
    let mut t = 0usize;
    while t < nrows.min(ncols) {
        // Find the entry of least nonzero magnitude in the trailing block.
        let mut best: Option<(usize, usize)> = None;
        for i in t..nrows {
            for j in t..ncols {
                if m[i][j] != 0
                    && best.map_or(true, |(bi, bj)| m[i][j].abs() < m[bi][bj].abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        m.swap(t, bi);
        for row in m.iter_mut() {
            row.swap(t, bj);
        }
        // Reduce column and row; repeat until the pivot divides its cross.
        let mut dirty = true;
        while dirty {
            dirty = false;
            for i in t + 1..nrows {
                if m[i][t] != 0 {
                    let q = m[i][t].div_euclid(m[t][t]);
                    for j in t..ncols {
                        m[i][j] -= q * m[t][j];
                    }
                    if m[i][t] != 0 {
                        m.swap(t, i);
                        dirty = true;
                    }
                }
            }
            for j in t + 1..ncols {
                if m[t][j] != 0 {
                    let q = m[t][j].div_euclid(m[t][t]);
                    for row in m.iter_mut() {
                        let v = row[t];
                        row[j] -= q * v;
                    }
                    if m[t][j] != 0 {
                        for row in m.iter_mut() {
                            row.swap(t, j);
                        }
                        dirty = true;
                    }
                }
            }
        }
        out.push(m[t][t].abs());
        t += 1;
    }
    // Enforce the divisibility chain d_1 | d_2 | ... by gcd/lcm swaps.
    let mut changed = true;
    while changed {
        changed = false;
        for i in 1..out.len() {
            if out[i - 1] != 0 && out[i] % out[i - 1] != 0 {
                let g = gcd(out[i - 1], out[i]);
                let l = out[i - 1] / g * out[i];
                out[i - 1] = g;
                out[i] = l;
                changed = true;
            }
        }
    }
    out.retain(|&d| d > 1);
    out.sort_unstable();
    out
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Abelian invariants of G/[G,G] straight from the relation matrix, as
/// p-exponents ascending. Independent of the p-local route.
pub fn abelian_invariant_exponents(pres: &PcPresentation) -> Vec<u32> {
    let n = pres.ngens();
    let p = pres.prime() as i128;
    let mut rows: Vec<Vec<i128>> = Vec::new();
    for i in 0..n {
        let mut row = vec![0i128; n];
        row[i] = p;
        for &(g, e) in pres.power_word(i) {
            row[g] -= e as i128;
        }
        rows.push(row);
    }
    for j in 1..n {
        for i in 0..j {
            let w = pres.commutator_word(j, i);
            if !w.is_empty() {
                let mut row = vec![0i128; n];
                for &(g, e) in w {
                    row[g] = e as i128;
                }
                rows.push(row);
            }
        }
    }
    let inv = smith_invariants(rows);
    inv.iter()
        .map(|&d| {
            let mut k = 0u32;
            let mut v = d;
            while v % p == 0 {
                v /= p;
                k += 1;
            }
            assert_eq!(v, 1, "invariant factor is not a p-power");
            k
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diag_chain() {
        let m = vec![vec![2, 0], vec![0, 4]];
        assert_eq!(smith_invariants(m), vec![2, 4]);
        let m = vec![vec![0, 4], vec![6, 0]];
        assert_eq!(smith_invariants(m), vec![2, 12]);
    }
}
