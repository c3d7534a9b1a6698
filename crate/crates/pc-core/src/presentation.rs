//! Weighted power-commutator presentations and their canonical text record.

use crate::error::PcError;
use crate::pair_index;

/// A normal word: strictly ascending generator indices, exponents in 1..p.
pub type Word = Vec<(usize, u32)>;

/// How a non-initial generator is introduced by the presentation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Definition {
    /// A minimal (weight-1) generator.
    Initial,
    /// Defined by the power relation a_j^p = w · a_k.
    Power(usize),
    /// Defined by the commutator relation [a_j, a_i] = w · a_k, j > i.
    Commutator(usize, usize),
    /// Definition lost in a quotient; the presentation is still usable for
    /// arithmetic but not as input to the covering-group construction.
    Orphan,
}

/// A finite p-group encoded by power and commutator relations on weighted
/// pc-generators. Immutable after construction; safe to share across threads.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PcPresentation {
    prime: u32,
    weights: Vec<u32>,
    definitions: Vec<Definition>,
    /// powers[i] = normal word equal to a_i^p, supported on indices > i.
    powers: Vec<Word>,
    /// Flattened lower triangle: entry pair_index(j, i) = word for [a_j, a_i].
    commutators: Vec<Word>,
    dgens: usize,
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut q = 2;
    while q * q <= p {
        if p % q == 0 {
            return false;
        }
        q += 1;
    }
    true
}

impl PcPresentation {
    /// Build and structurally validate a presentation.
    pub fn new(
        prime: u32,
        weights: Vec<u32>,
        definitions: Vec<Definition>,
        powers: Vec<Word>,
        commutators: Vec<Word>,
    ) -> Result<Self, PcError> {
        let n = weights.len();
        if !is_prime(prime) {
            return Err(PcError::Malformed(format!("{prime} is not prime")));
        }
        if definitions.len() != n || powers.len() != n || commutators.len() != n * (n.max(1) - 1) / 2 {
            return Err(PcError::Malformed("field lengths disagree with ngens".into()));
        }
        let mut dgens = 0;
        for (i, &w) in weights.iter().enumerate() {
            if w == 0 {
                return Err(PcError::Malformed("weights must be positive".into()));
            }
            if i > 0 && w < weights[i - 1] {
                return Err(PcError::Malformed("weights must be non-decreasing".into()));
            }
            if w == 1 {
                dgens += 1;
            }
        }
        let pres = PcPresentation { prime, weights, definitions, powers, commutators, dgens };
        pres.validate_words()?;
        pres.validate_definitions()?;
        Ok(pres)
    }

    fn validate_words(&self) -> Result<(), PcError> {
        let n = self.ngens();
        let check = |word: &Word, floor: usize| -> Result<(), PcError> {
            let mut last: Option<usize> = None;
            for &(g, e) in word {
                if g >= n {
                    return Err(PcError::GeneratorOutOfRange { index: g, ngens: n });
                }
                if g <= floor {
                    return Err(PcError::Malformed(format!(
                        "relation RHS touches generator {g} at or below its LHS ({floor})"
                    )));
                }
                if e == 0 || e >= self.prime {
                    return Err(PcError::Malformed("exponent outside [1, p)".into()));
                }
                if let Some(l) = last {
                    if g <= l {
                        return Err(PcError::Malformed("word not in ascending normal form".into()));
                    }
                }
                last = Some(g);
            }
            Ok(())
        };
        for i in 0..n {
            check(&self.powers[i], i)?;
        }
        for j in 1..n {
            for i in 0..j {
                check(&self.commutators[pair_index(j, i)], j)?;
            }
        }
        Ok(())
    }

    fn validate_definitions(&self) -> Result<(), PcError> {
        for k in 0..self.ngens() {
            match self.definitions[k] {
                Definition::Initial => {
                    if self.weights[k] != 1 {
                        return Err(PcError::Malformed(format!(
                            "generator {k} has weight {} but no definition",
                            self.weights[k]
                        )));
                    }
                }
                Definition::Power(j) => {
                    if j >= k {
                        return Err(PcError::Malformed("definition must use earlier generators".into()));
                    }
                }
                Definition::Commutator(j, i) => {
                    if i >= j || j >= k {
                        return Err(PcError::Malformed("definition must use earlier generators".into()));
                    }
                }
                Definition::Orphan => {
                    if self.weights[k] == 1 {
                        return Err(PcError::Malformed("weight-1 generators are initial, not orphaned".into()));
                    }
                }
            }
        }
        Ok(())
    }

    /// The defining relation of a_k must read  LHS = w · a_k  with w supported
    /// strictly below k and a_k carrying exponent exactly 1. Checked by
    /// `consistency_check`, not the constructor, so that broken inputs can be
    /// probed rather than rejected outright.
    pub(crate) fn defining_word_ok(&self, k: usize) -> bool {
        let word = match self.definitions[k] {
            Definition::Initial => return self.weights[k] == 1,
            Definition::Orphan => return self.weights[k] > 1,
            Definition::Power(j) => &self.powers[j],
            Definition::Commutator(j, i) => &self.commutators[pair_index(j, i)],
        };
        word.iter().all(|&(g, e)| g < k || (g == k && e == 1))
            && word.iter().any(|&(g, e)| g == k && e == 1)
    }

    /// The unique group of order p^0.
    pub fn trivial(prime: u32) -> Self {
        PcPresentation {
            prime,
            weights: Vec::new(),
            definitions: Vec::new(),
            powers: Vec::new(),
            commutators: Vec::new(),
            dgens: 0,
        }
    }

    /// Elementary abelian group (Z/p)^d: the p-class 1 root of the tree.
    pub fn elementary_abelian(prime: u32, d: usize) -> Self {
        PcPresentation {
            prime,
            weights: vec![1; d],
            definitions: vec![Definition::Initial; d],
            powers: vec![Vec::new(); d],
            commutators: vec![Vec::new(); d * d.saturating_sub(1) / 2],
            dgens: d,
        }
    }

    pub fn prime(&self) -> u32 {
        self.prime
    }

    pub fn ngens(&self) -> usize {
        self.weights.len()
    }

    /// Minimal generator count d(G): the number of weight-1 generators.
    pub fn dgens(&self) -> usize {
        self.dgens
    }

    pub fn weight(&self, i: usize) -> u32 {
        self.weights[i]
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    /// The largest declared weight; equals the p-class for presentations
    /// produced by the descendant machinery.
    pub fn weight_class(&self) -> u32 {
        self.weights.last().copied().unwrap_or(0)
    }

    pub fn definition(&self, k: usize) -> Definition {
        self.definitions[k]
    }

    pub fn power_word(&self, i: usize) -> &Word {
        &self.powers[i]
    }

    /// RHS of [a_j, a_i] for j > i.
    pub fn commutator_word(&self, j: usize, i: usize) -> &Word {
        &self.commutators[pair_index(j, i)]
    }

    /// log_p of the group order (= ngens for a consistent presentation).
    pub fn order_exponent(&self) -> usize {
        self.ngens()
    }

    /// Canonical versioned text record; byte-exact round-trip with `parse`.
    pub fn to_canonical_text(&self) -> String {
        let mut s = String::new();
        s.push_str("pcpresentation v1\n");
        s.push_str(&format!("p {}\n", self.prime));
        s.push_str(&format!("ngens {}\n", self.ngens()));
        s.push_str("weights");
        for w in &self.weights {
            s.push_str(&format!(" {w}"));
        }
        s.push('\n');
        s.push_str("definitions");
        for d in &self.definitions {
            match d {
                Definition::Initial => s.push_str(" -"),
                Definition::Orphan => s.push_str(" o"),
                Definition::Power(j) => s.push_str(&format!(" p{}", j + 1)),
                Definition::Commutator(j, i) => s.push_str(&format!(" c{},{}", j + 1, i + 1)),
            }
        }
        s.push('\n');
        s.push_str("powers\n");
        for (i, w) in self.powers.iter().enumerate() {
            s.push_str(&format!("{} ={}\n", i + 1, format_word(w)));
        }
        s.push_str("commutators\n");
        for j in 1..self.ngens() {
            for i in 0..j {
                s.push_str(&format!(
                    "{} {} ={}\n",
                    j + 1,
                    i + 1,
                    format_word(&self.commutators[pair_index(j, i)])
                ));
            }
        }
        s.push_str("end\n");
        s
    }

    /// Parse the canonical text record produced by `to_canonical_text`.
    pub fn parse(text: &str) -> Result<Self, PcError> {
        let mut lines = text.lines();
        let err = |m: &str| PcError::Parse(m.to_string());
        if lines.next().map(str::trim) != Some("pcpresentation v1") {
            return Err(err("expected header `pcpresentation v1`"));
        }
        let p: u32 = field(lines.next(), "p")?;
        let ngens: usize = field(lines.next(), "ngens")?;
        let wline = lines.next().ok_or_else(|| err("missing weights"))?;
        let weights: Vec<u32> = tail_numbers(wline, "weights")?;
        if weights.len() != ngens {
            return Err(err("weights length mismatch"));
        }
        let dline = lines.next().ok_or_else(|| err("missing definitions"))?;
        let dtoks: Vec<&str> = dline.split_whitespace().collect();
        if dtoks.first() != Some(&"definitions") || dtoks.len() != ngens + 1 {
            return Err(err("malformed definitions line"));
        }
        let mut definitions = Vec::with_capacity(ngens);
        for t in &dtoks[1..] {
            definitions.push(parse_definition(t)?);
        }
        if lines.next().map(str::trim) != Some("powers") {
            return Err(err("expected `powers` section"));
        }
        let mut powers = Vec::with_capacity(ngens);
        for i in 0..ngens {
            let line = lines.next().ok_or_else(|| err("missing power relation"))?;
            powers.push(parse_relation_line(line, &[i + 1])?);
        }
        if lines.next().map(str::trim) != Some("commutators") {
            return Err(err("expected `commutators` section"));
        }
        let mut commutators = vec![Vec::new(); ngens * ngens.saturating_sub(1) / 2];
        for j in 1..ngens {
            for i in 0..j {
                let line = lines.next().ok_or_else(|| err("missing commutator relation"))?;
                commutators[pair_index(j, i)] = parse_relation_line(line, &[j + 1, i + 1])?;
            }
        }
        if lines.next().map(str::trim) != Some("end") {
            return Err(err("expected `end`"));
        }
        PcPresentation::new(p, weights, definitions, powers, commutators)
    }
}

fn format_word(w: &Word) -> String {
    let mut s = String::new();
    for &(g, e) in w {
        s.push_str(&format!(" {}^{}", g + 1, e));
    }
    s
}

fn field<T: std::str::FromStr>(line: Option<&str>, key: &str) -> Result<T, PcError> {
    let line = line.ok_or_else(|| PcError::Parse(format!("missing field {key}")))?;
    let mut it = line.split_whitespace();
    if it.next() != Some(key) {
        return Err(PcError::Parse(format!("expected field {key}")));
    }
    it.next()
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| PcError::Parse(format!("bad value for {key}")))
}

fn tail_numbers<T: std::str::FromStr>(line: &str, key: &str) -> Result<Vec<T>, PcError> {
    let mut it = line.split_whitespace();
    if it.next() != Some(key) {
        return Err(PcError::Parse(format!("expected field {key}")));
    }
    it.map(|v| v.parse().map_err(|_| PcError::Parse(format!("bad number in {key}"))))
        .collect()
}

fn parse_definition(tok: &str) -> Result<Definition, PcError> {
    if tok == "-" {
        return Ok(Definition::Initial);
    }
    if tok == "o" {
        return Ok(Definition::Orphan);
    }
    if let Some(rest) = tok.strip_prefix('p') {
        let j: usize = rest.parse().map_err(|_| PcError::Parse("bad power definition".into()))?;
        return Ok(Definition::Power(j - 1));
    }
    if let Some(rest) = tok.strip_prefix('c') {
        let (a, b) = rest
            .split_once(',')
            .ok_or_else(|| PcError::Parse("bad commutator definition".into()))?;
        let j: usize = a.parse().map_err(|_| PcError::Parse("bad definition index".into()))?;
        let i: usize = b.parse().map_err(|_| PcError::Parse("bad definition index".into()))?;
        return Ok(Definition::Commutator(j - 1, i - 1));
    }
    Err(PcError::Parse(format!("unknown definition token `{tok}`")))
}

fn parse_relation_line(line: &str, expect_lhs: &[usize]) -> Result<Word, PcError> {
    let (lhs, rhs) = line
        .split_once('=')
        .ok_or_else(|| PcError::Parse("relation line missing `=`".into()))?;
    let lhs_nums: Vec<usize> = lhs
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| PcError::Parse("bad relation LHS".into())))
        .collect::<Result<_, _>>()?;
    if lhs_nums != expect_lhs {
        return Err(PcError::Parse(format!(
            "relation LHS {lhs_nums:?} out of order (expected {expect_lhs:?})"
        )));
    }
    let mut word = Vec::new();
    for tok in rhs.split_whitespace() {
        let (g, e) = tok
            .split_once('^')
            .ok_or_else(|| PcError::Parse(format!("bad word token `{tok}`")))?;
        let g: usize = g.parse().map_err(|_| PcError::Parse("bad generator index".into()))?;
        let e: u32 = e.parse().map_err(|_| PcError::Parse("bad exponent".into()))?;
        word.push((g - 1, e));
    }
    Ok(word)
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// D4 = <g1, g2 | g1^2, g2^2 = g3, g3 = [g2, g1] central of order 2>.
    pub fn dihedral8() -> PcPresentation {
        PcPresentation::new(
            2,
            vec![1, 1, 2],
            vec![Definition::Initial, Definition::Initial, Definition::Commutator(1, 0)],
            vec![vec![], vec![(2, 1)], vec![]],
            vec![vec![(2, 1)], vec![], vec![]],
        )
        .unwrap()
    }

    /// Q8 with g3 = g1^2 = g2^2 = [g2, g1] central.
    pub fn quaternion8() -> PcPresentation {
        PcPresentation::new(
            2,
            vec![1, 1, 2],
            vec![Definition::Initial, Definition::Initial, Definition::Power(0)],
            vec![vec![(2, 1)], vec![(2, 1)], vec![]],
            vec![vec![(2, 1)], vec![], vec![]],
        )
        .unwrap()
    }

    /// Z/4 as a 2-group: g2 = g1^2.
    pub fn cyclic4() -> PcPresentation {
        PcPresentation::new(
            2,
            vec![1, 2],
            vec![Definition::Initial, Definition::Power(0)],
            vec![vec![(1, 1)], vec![]],
            vec![vec![]],
        )
        .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn roundtrip_is_byte_exact() {
        for pres in [dihedral8(), quaternion8(), cyclic4(), PcPresentation::elementary_abelian(2, 4)]
        {
            let text = pres.to_canonical_text();
            let back = PcPresentation::parse(&text).unwrap();
            assert_eq!(back, pres);
            assert_eq!(back.to_canonical_text(), text);
        }
    }

    #[test]
    fn rejects_bad_weights() {
        let r = PcPresentation::new(
            2,
            vec![2, 1],
            vec![Definition::Initial, Definition::Initial],
            vec![vec![], vec![]],
            vec![vec![]],
        );
        assert!(r.is_err());
    }

    #[test]
    fn dangling_definition_builds_but_is_flagged() {
        // g3 claimed to be defined by [g2, g1] while that relation is trivial.
        let pres = PcPresentation::new(
            2,
            vec![1, 1, 2],
            vec![Definition::Initial, Definition::Initial, Definition::Commutator(1, 0)],
            vec![vec![], vec![(2, 1)], vec![]],
            vec![vec![], vec![], vec![]],
        )
        .unwrap();
        assert!(!pres.defining_word_ok(2));
    }

    #[test]
    fn trivial_group_is_legal() {
        let t = PcPresentation::trivial(2);
        assert_eq!(t.ngens(), 0);
        assert_eq!(t.dgens(), 0);
        let text = t.to_canonical_text();
        assert_eq!(PcPresentation::parse(&text).unwrap(), t);
    }
}
