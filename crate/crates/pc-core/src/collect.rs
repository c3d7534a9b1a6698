//! Collection from the left: the normal-form engine underlying everything.
//!
//! To multiply a normal word by a generator, the generator is commuted past
//! the tail of higher-indexed generators; each exchange a_j a_i -> a_i a_j
//! [a_j, a_i] (for j > i) pushes correction factors of strictly larger index,
//! so the process terminates for any weighted presentation. The commutator
//! convention throughout is (x, y) = x^-1 y^-1 x y.

use crate::element::Element;
use crate::error::PcError;
use crate::presentation::{PcPresentation, Word};

impl PcPresentation {
    pub fn identity(&self) -> Element {
        Element { exps: vec![0; self.ngens()] }
    }

    /// The i-th pc generator as an element.
    pub fn generator(&self, i: usize) -> Result<Element, PcError> {
        if i >= self.ngens() {
            return Err(PcError::GeneratorOutOfRange { index: i, ngens: self.ngens() });
        }
        let mut e = self.identity();
        e.exps[i] = 1;
        Ok(e)
    }

    fn check(&self, x: &Element) -> Result<(), PcError> {
        if x.exps.len() != self.ngens() {
            return Err(PcError::LengthMismatch { expected: self.ngens(), got: x.exps.len() });
        }
        Ok(())
    }

    /// Product a · b in normal form.
    pub fn multiply(&self, a: &Element, b: &Element) -> Element {
        debug_assert!(self.check(a).is_ok() && self.check(b).is_ok());
        let mut u = a.exps.clone();
        let mut stack: Vec<(usize, u32)> = Vec::with_capacity(16);
        for (g, &e) in b.exps.iter().enumerate().rev() {
            if e != 0 {
                stack.push((g, e));
            }
        }
        self.run_collection(&mut u, &mut stack);
        Element { exps: u }
    }

    /// Multiply on the right by a single generator power (e may exceed p).
    pub fn multiply_by_generator(&self, a: &Element, g: usize, e: u32) -> Element {
        let mut u = a.exps.clone();
        let mut stack = vec![(g, e)];
        self.run_collection(&mut u, &mut stack);
        Element { exps: u }
    }

    fn run_collection(&self, u: &mut Vec<u32>, stack: &mut Vec<(usize, u32)>) {
        let p = self.prime();
        while let Some((g, e)) = stack.pop() {
            if e == 0 {
                continue;
            }
            if e > 1 {
                stack.push((g, e - 1));
            }
            // Insert a single a_g into u.
            let tail_start = g + 1;
            let has_tail = u[tail_start..].iter().any(|&x| x != 0);
            if !has_tail {
                u[g] += 1;
                if u[g] == p {
                    u[g] = 0;
                    push_word_reversed(stack, self.power_word(g));
                }
                continue;
            }
            // Move the tail aside: u = prefix · tail, and
            // prefix · tail · a_g = prefix · a_g · (a_g^-1 tail a_g).
            // Conjugation generator-by-generator: a_j^(a_g) = a_j [a_j, a_g].
            // Push in reverse processing order.
            let tail: Vec<(usize, u32)> = (tail_start..u.len())
                .filter(|&j| u[j] != 0)
                .map(|j| (j, u[j]))
                .collect();
            for &(j, _) in &tail {
                u[j] = 0;
            }
            for &(j, ej) in tail.iter().rev() {
                let w = self.commutator_word(j, g);
                if w.is_empty() {
                    stack.push((j, ej));
                } else {
                    for _ in 0..ej {
                        push_word_reversed(stack, w);
                        stack.push((j, 1));
                    }
                }
            }
            stack.push((g, 1));
        }
    }

    /// Inverse by digit fixing along the polycyclic filtration.
    pub fn inverse(&self, a: &Element) -> Element {
        let mut x = self.identity();
        for i in 0..self.ngens() {
            let e = self.multiply(a, &x).exps[i];
            if e != 0 {
                x = self.multiply_by_generator(&x, i, self.prime() - e);
            }
        }
        debug_assert!(self.multiply(a, &x).is_identity());
        x
    }

    /// a^e for any integer exponent, by square and multiply.
    pub fn power(&self, a: &Element, e: i64) -> Element {
        if e < 0 {
            return self.power(&self.inverse(a), -e);
        }
        let mut result = self.identity();
        let mut base = a.clone();
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                result = self.multiply(&result, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.multiply(&base, &base);
            }
        }
        result
    }

    /// (a, b) = a^-1 b^-1 a b.
    pub fn commutator_of(&self, a: &Element, b: &Element) -> Element {
        let ia = self.inverse(a);
        let ib = self.inverse(b);
        self.multiply(&self.multiply(&ia, &ib), &self.multiply(a, b))
    }

    /// b^-1 a b.
    pub fn conjugate(&self, a: &Element, b: &Element) -> Element {
        let ib = self.inverse(b);
        self.multiply(&self.multiply(&ib, a), b)
    }

    /// Normal form of a word given as signed generator powers.
    pub fn collect(&self, word: &[(usize, i64)]) -> Result<Element, PcError> {
        let mut acc = self.identity();
        for &(g, e) in word {
            if g >= self.ngens() {
                return Err(PcError::GeneratorOutOfRange { index: g, ngens: self.ngens() });
            }
            let gen = self.generator(g)?;
            acc = self.multiply(&acc, &self.power(&gen, e));
        }
        Ok(acc)
    }

    /// Normal form of a stored relation word (all exponents positive).
    pub fn element_of_word(&self, word: &Word) -> Element {
        let mut u = vec![0; self.ngens()];
        let mut stack: Vec<(usize, u32)> = word.iter().rev().map(|&(g, e)| (g, e)).collect();
        self.run_collection(&mut u, &mut stack);
        Element { exps: u }
    }

    /// Order of an element (a power of p).
    pub fn element_order(&self, a: &Element) -> u128 {
        let mut ord = 1u128;
        let mut x = a.clone();
        while !x.is_identity() {
            x = self.power(&x, self.prime() as i64);
            ord *= self.prime() as u128;
        }
        ord
    }

    /// Exhaustive consistency check: definition congruence, weight discipline,
    /// and every associativity / power overlap test word. A true result
    /// certifies |G| = p^ngens. Quadratic-to-cubic in ngens; meant for
    /// moderate presentations (the descendant machinery uses the weighted
    /// subset of tests internally).
    pub fn consistency_check(&self) -> bool {
        let n = self.ngens();
        let p = self.prime();
        for k in 0..n {
            if !self.defining_word_ok(k) {
                return false;
            }
        }
        // Weight discipline: RHS entries must weigh at least the LHS.
        for i in 0..n {
            let lhs_w = self.weight(i) + 1;
            if self.power_word(i).iter().any(|&(g, _)| self.weight(g) < lhs_w) {
                return false;
            }
        }
        for j in 1..n {
            for i in 0..j {
                let lhs_w = self.weight(j) + self.weight(i);
                if self.commutator_word(j, i).iter().any(|&(g, _)| self.weight(g) < lhs_w) {
                    return false;
                }
            }
        }
        // Overlap tests. gens[i] = a_i as an element.
        let gens: Vec<Element> = (0..n).map(|i| self.generator(i).unwrap()).collect();
        for k in 2..n {
            for j in 1..k {
                for i in 0..j {
                    let lhs = self.multiply(&self.multiply(&gens[k], &gens[j]), &gens[i]);
                    let rhs = self.multiply(&gens[k], &self.multiply(&gens[j], &gens[i]));
                    if lhs != rhs {
                        return false;
                    }
                }
            }
        }
        for j in 0..n {
            for i in 0..j {
                // (a_j^p) a_i  vs  a_j^(p-1) (a_j a_i)
                let lhs = self.multiply_by_generator(&self.element_of_word(self.power_word(j)), i, 1);
                let rhs = self.multiply(
                    &self.power(&gens[j], (p - 1) as i64),
                    &self.multiply(&gens[j], &gens[i]),
                );
                if lhs != rhs {
                    return false;
                }
                // a_j (a_i^p)  vs  (a_j a_i) a_i^(p-1)
                let lhs = self.multiply(&gens[j], &self.element_of_word(self.power_word(i)));
                let rhs = self.multiply(
                    &self.multiply(&gens[j], &gens[i]),
                    &self.power(&gens[i], (p - 1) as i64),
                );
                if lhs != rhs {
                    return false;
                }
            }
        }
        for i in 0..n {
            // a_i (a_i^p) vs (a_i^p) a_i
            let w = self.element_of_word(self.power_word(i));
            if self.multiply(&gens[i], &w) != self.multiply(&w, &gens[i]) {
                return false;
            }
        }
        true
    }
}

pub(crate) fn push_word_reversed(stack: &mut Vec<(usize, u32)>, word: &Word) {
    for &(g, e) in word.iter().rev() {
        stack.push((g, e));
    }
}

#[cfg(test)]
mod tests {
    use crate::presentation::fixtures::*;
    use crate::presentation::{Definition, PcPresentation};

    #[test]
    fn d4_forced_values() {
        let d4 = dihedral8();
        // g2 · g2 = g3
        let g2 = d4.generator(1).unwrap();
        let sq = d4.multiply(&g2, &g2);
        assert_eq!(sq.exponents(), &[0, 0, 1]);
        // commutator(g2, g1) = g3
        let g1 = d4.generator(0).unwrap();
        assert_eq!(d4.commutator_of(&g2, &g1).exponents(), &[0, 0, 1]);
        // empty word = identity
        assert!(d4.collect(&[]).unwrap().is_identity());
    }

    #[test]
    fn element_ops_basics() {
        let q8 = quaternion8();
        let id = q8.identity();
        assert_eq!(q8.inverse(&id), id);
        let g1 = q8.generator(0).unwrap();
        assert!(q8.commutator_of(&g1, &g1).is_identity());
        // i^4 = 1, i^2 = -1 = g3
        assert_eq!(q8.power(&g1, 2).exponents(), &[0, 0, 1]);
        assert!(q8.power(&g1, 4).is_identity());
        assert_eq!(q8.element_order(&g1), 4);
        // inverse really inverts
        let g2 = q8.generator(1).unwrap();
        let prod = q8.multiply(&g1, &g2);
        assert!(q8.multiply(&prod, &q8.inverse(&prod)).is_identity());
        assert_eq!(q8.power(&g1, -1), q8.inverse(&g1));
    }

    #[test]
    fn consistency_verdicts() {
        assert!(dihedral8().consistency_check());
        assert!(quaternion8().consistency_check());
        assert!(cyclic4().consistency_check());
        assert!(PcPresentation::elementary_abelian(2, 4).consistency_check());
        // Broken D4 from the module contract: commutator relation killed while
        // the definition of g3 still points at it.
        let broken = PcPresentation::new(
            2,
            vec![1, 1, 2],
            vec![Definition::Initial, Definition::Initial, Definition::Commutator(1, 0)],
            vec![vec![], vec![(2, 1)], vec![]],
            vec![vec![], vec![], vec![]],
        )
        .unwrap();
        assert!(!broken.consistency_check());
    }

    #[test]
    fn collect_handles_signed_words() {
        let d4 = dihedral8();
        // g1^-1 = g1 in D4 (order 2); mixed word normalizes.
        let w = d4.collect(&[(0, -1), (1, 3), (0, 1)]).unwrap();
        // g1 g2^3 g1 = g1 g2 g3 g1 = ... just check round-trip through product of parts.
        let a = d4.collect(&[(0, -1)]).unwrap();
        let b = d4.collect(&[(1, 3)]).unwrap();
        let c = d4.collect(&[(0, 1)]).unwrap();
        assert_eq!(w, d4.multiply(&d4.multiply(&a, &b), &c));
    }
}
