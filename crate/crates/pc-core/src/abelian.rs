//! Abelian invariants via p-local diagonalization of the relation matrix
//! of the abelianized presentation.

use crate::element::Element;
use crate::error::PcError;
use crate::linalg::{snf_p_local, PadicSnf};
use crate::presentation::PcPresentation;
use crate::subgroup::Subgroup;

/// Multiset of prime-power cyclic orders, canonically sorted ascending.
/// The paper's bracket notation: [2,4,8] = Z/2 x Z/4 x Z/8.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AbelianInvariants {
    p: u32,
    /// Exponents k of the cyclic orders p^k, ascending, all k >= 1.
    exps: Vec<u32>,
}

impl AbelianInvariants {
    pub fn new(p: u32, mut exps: Vec<u32>) -> Self {
        exps.retain(|&k| k > 0);
        exps.sort_unstable();
        AbelianInvariants { p, exps }
    }

    pub fn trivial(p: u32) -> Self {
        AbelianInvariants { p, exps: Vec::new() }
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    /// Exponents of the cyclic factors, ascending.
    pub fn exponents(&self) -> &[u32] {
        &self.exps
    }

    /// Number of cyclic factors (the rank).
    pub fn rank(&self) -> usize {
        self.exps.len()
    }

    /// log_p of the group order.
    pub fn order_exponent(&self) -> u64 {
        self.exps.iter().map(|&k| k as u64).sum()
    }

    /// The cyclic orders themselves, ascending. Guards against overflow.
    pub fn orders(&self) -> Vec<u128> {
        self.exps.iter().map(|&k| (self.p as u128).pow(k)).collect()
    }

    /// True if `self` is (the invariant list of) a quotient of the abelian
    /// group with invariants `other`: descending-sorted exponent domination.
    pub fn is_quotient_of(&self, other: &AbelianInvariants) -> bool {
        if self.p != other.p || self.exps.len() > other.exps.len() {
            return false;
        }
        // Both ascending; align the largest entries.
        let off = other.exps.len() - self.exps.len();
        self.exps.iter().zip(&other.exps[off..]).all(|(a, b)| a <= b)
    }
}

impl std::fmt::Display for AbelianInvariants {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[")?;
        for (i, &k) in self.exps.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", (self.p as u128).pow(k))?;
        }
        write!(f, "]")
    }
}

/// Abelianization data with the coordinate change retained, so that
/// group elements can be mapped to canonical coordinates of G/[G,G].
pub struct AbelianizedGroup {
    pub invariants: AbelianInvariants,
    snf: PadicSnf,
    /// Row indices of `snf.left` corresponding to the nontrivial factors.
    factor_rows: Vec<usize>,
    ngens: usize,
}

impl AbelianizedGroup {
    /// Coordinates of an exponent vector in the invariant-factor basis,
    /// entry t reduced mod p^k_t (orders ascending as in `invariants`).
    pub fn coordinates(&self, exps: &[u32]) -> Vec<u128> {
        let m = self.snf.modulus();
        self.factor_rows
            .iter()
            .zip(self.invariants.exponents())
            .map(|(&row, &k)| {
                let mut acc = 0u128;
                for (j, &e) in exps.iter().enumerate() {
                    acc = (acc + self.snf.left[row][j] * e as u128) % m;
                }
                acc % (self.snf.p as u128).pow(k)
            })
            .collect()
    }

    /// An exponent-vector representative of the t-th canonical generator
    /// (entries mod p^B; reduce mod element orders before powering).
    pub fn canonical_generator(&self, t: usize) -> Vec<u128> {
        let row = self.factor_rows[t];
        (0..self.ngens).map(|j| self.snf.left_inv[j][row]).collect()
    }
}

fn relation_rows(pres: &PcPresentation) -> Vec<Vec<i128>> {
    let n = pres.ngens();
    let p = pres.prime() as i128;
    let mut rows = Vec::new();
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
    rows
}

fn precision_for(pres: &PcPresentation) -> Result<u32, PcError> {
    let p = pres.prime();
    let n = pres.ngens() as u32;
    let max = (126.0 / (p as f64).log2()).floor() as u32;
    let want = n + 2;
    if want > max {
        return Err(PcError::CapExceeded(format!(
            "abelianization precision p^{want} exceeds u128"
        )));
    }
    Ok(want)
}

fn invariants_from_matrix(
    rows: Vec<Vec<i128>>,
    ncols: usize,
    p: u32,
    bexp: u32,
) -> Result<AbelianizedGroup, PcError> {
    let modulus = (p as u128).pow(bexp);
    // Transpose: columns of the relation matrix span the lattice; SNF with
    // tracked row ops on the transpose yields the basis change of Z^n.
    let mut tmat = vec![vec![0u128; rows.len().max(1)]; ncols];
    for (r, row) in rows.iter().enumerate() {
        for (c, &v) in row.iter().enumerate() {
            tmat[c][r] = v.rem_euclid(modulus as i128) as u128;
        }
    }
    let snf = snf_p_local(tmat, p, bexp)?;
    if snf.diag.len() < ncols {
        return Err(PcError::Malformed(
            "relation matrix not of full rank; presentation is not a finite p-group".into(),
        ));
    }
    let mut exps = Vec::new();
    let mut factor_rows = Vec::new();
    for (t, &k) in snf.diag.iter().enumerate() {
        if k >= bexp {
            return Err(PcError::Malformed("invariant factor at working precision".into()));
        }
        if k > 0 {
            exps.push(k);
            factor_rows.push(t);
        }
    }
    // Canonical order is ascending; p-local SNF already yields non-decreasing
    // valuations, so factor_rows is aligned with the sorted exponents.
    debug_assert!(exps.windows(2).all(|w| w[0] <= w[1]));
    Ok(AbelianizedGroup {
        invariants: AbelianInvariants::new(p, exps.clone()),
        snf,
        factor_rows,
        ngens: ncols,
    })
}

/// Invariants of G/[G,G].
pub fn abelian_invariants(pres: &PcPresentation) -> AbelianInvariants {
    abelianized_group(pres).invariants
}

/// Abelianization with coordinates, for transfer-map computations.
pub fn abelianized_group(pres: &PcPresentation) -> AbelianizedGroup {
    let bexp = precision_for(pres).expect("presentation exceeds abelianization precision cap");
    invariants_from_matrix(relation_rows(pres), pres.ngens(), pres.prime(), bexp)
        .expect("consistent presentation must have finite abelianization")
}

/// Relation matrix of a subgroup along its pivot sequence: pivot powers and
/// pivot commutators, re-expressed in pivot coordinates by sifting.
fn subgroup_relation_rows(pres: &PcPresentation, sub: &Subgroup) -> Vec<Vec<i128>> {
    let p = pres.prime() as i128;
    let mut rows = Vec::new();
    for (t, pivot) in sub.pivots().iter().enumerate() {
        let pw = pres.power(pivot, pres.prime() as i64);
        let coords = sub
            .coordinates(pres, &pw)
            .expect("pivot power must stay in the subgroup");
        let mut row: Vec<i128> = coords.iter().map(|&c| -(c as i128)).collect();
        row[t] += p;
        rows.push(row);
    }
    for (a, s) in sub.pivots().iter().enumerate() {
        for t in sub.pivots()[a + 1..].iter() {
            let c = pres.commutator_of(t, s);
            if !c.is_identity() {
                rows.push(c_coords(pres, sub, &c));
            }
        }
    }
    rows
}

fn c_coords(pres: &PcPresentation, sub: &Subgroup, x: &Element) -> Vec<i128> {
    sub.coordinates(pres, x)
        .expect("commutator of subgroup elements must stay in the subgroup")
        .iter()
        .map(|&c| c as i128)
        .collect()
}

/// Invariants of H/[H,H] for a subgroup H.
pub fn subgroup_abelian_invariants(pres: &PcPresentation, sub: &Subgroup) -> AbelianInvariants {
    subgroup_abelianized(pres, sub).invariants
}

/// Subgroup abelianization with coordinates retained.
pub fn subgroup_abelianized(pres: &PcPresentation, sub: &Subgroup) -> AbelianizedGroup {
    if sub.is_trivial() {
        let bexp = 4;
        return invariants_from_matrix(Vec::new(), 0, pres.prime(), bexp).unwrap();
    }
    let bexp = precision_for(pres).expect("presentation exceeds abelianization precision cap");
    invariants_from_matrix(subgroup_relation_rows(pres, sub), sub.rank(), pres.prime(), bexp)
        .expect("subgroup of a finite p-group must have finite abelianization")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::fixtures::*;

    #[test]
    fn classic_abelianizations() {
        assert_eq!(abelian_invariants(&quaternion8()), AbelianInvariants::new(2, vec![1, 1]));
        assert_eq!(abelian_invariants(&dihedral8()), AbelianInvariants::new(2, vec![1, 1]));
        assert_eq!(abelian_invariants(&cyclic4()), AbelianInvariants::new(2, vec![2]));
        assert_eq!(
            abelian_invariants(&PcPresentation::elementary_abelian(2, 4)),
            AbelianInvariants::new(2, vec![1, 1, 1, 1])
        );
    }

    #[test]
    fn display_matches_bracket_notation() {
        let inv = AbelianInvariants::new(2, vec![3, 1, 2]);
        assert_eq!(inv.to_string(), "[2,4,8]");
    }

    #[test]
    fn quotient_domination() {
        let a = AbelianInvariants::new(2, vec![1, 1]);
        let b = AbelianInvariants::new(2, vec![2]);
        let c = AbelianInvariants::new(2, vec![1, 2]);
        assert!(!a.is_quotient_of(&b), "(Z/2)^2 is not a quotient of Z/4");
        assert!(b.is_quotient_of(&c));
        assert!(a.is_quotient_of(&c));
        assert!(b.is_quotient_of(&b));
        assert!(!c.is_quotient_of(&b));
    }

    #[test]
    fn whole_group_subgroup_matches() {
        for pres in [dihedral8(), quaternion8(), cyclic4()] {
            let whole = Subgroup::whole_group(&pres);
            assert_eq!(subgroup_abelian_invariants(&pres, &whole), abelian_invariants(&pres));
        }
    }

    #[test]
    fn trivial_subgroup_empty_invariants() {
        let d4 = dihedral8();
        let t = Subgroup::trivial();
        assert_eq!(subgroup_abelian_invariants(&d4, &t), AbelianInvariants::trivial(2));
    }

    #[test]
    fn coordinates_respect_products() {
        let d4 = dihedral8();
        let abg = abelianized_group(&d4);
        let g1 = d4.generator(0).unwrap();
        let g2 = d4.generator(1).unwrap();
        let prod = d4.multiply(&g1, &g2);
        let mut sum = abg.coordinates(g1.exponents());
        let c2 = abg.coordinates(g2.exponents());
        for (t, v) in sum.iter_mut().enumerate() {
            let k = abg.invariants.exponents()[t];
            *v = (*v + c2[t]) % (2u128).pow(k);
        }
        assert_eq!(sum, abg.coordinates(prod.exponents()));
    }
}
