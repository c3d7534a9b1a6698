//! Abstract finitely presented pro-p groups: generators a..z, relator words
//! with integer powers and left-normed commutator terms (x,y,z) = ((x,y),z).
//! Relators are comma-separated at parenthesis depth 0.

use pc_core::{Element, PcPresentation};

use crate::error::TreeError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FpAtom {
    Gen(usize),
    /// Left-normed commutator of two or more words.
    Comm(Vec<FpWord>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FpFactor {
    pub atom: FpAtom,
    pub exp: i64,
}

pub type FpWord = Vec<FpFactor>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FpPresentation {
    ngens: usize,
    relators: Vec<FpWord>,
    source: String,
}

impl FpPresentation {
    pub fn ngens(&self) -> usize {
        self.ngens
    }

    pub fn relators(&self) -> &[FpWord] {
        &self.relators
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// Parse `a,b,c,d | relator, relator, ...` (whitespace and newlines free).
    pub fn parse(text: &str) -> Result<Self, TreeError> {
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let (gens_part, rel_part) = match compact.split_once('|') {
            Some(parts) => parts,
            None => (compact.as_str(), ""),
        };
        let mut ngens = 0usize;
        for tok in gens_part.split(',').filter(|t| !t.is_empty()) {
            let chars: Vec<char> = tok.chars().collect();
            if chars.len() != 1 || !chars[0].is_ascii_lowercase() {
                return Err(TreeError::Parse(format!("bad generator name `{tok}`")));
            }
            let idx = chars[0] as usize - 'a' as usize;
            if idx != ngens {
                return Err(TreeError::Parse("generators must be a, b, c, ... in order".into()));
            }
            ngens += 1;
        }
        if ngens == 0 {
            return Err(TreeError::Parse("no generators declared".into()));
        }
        let mut relators = Vec::new();
        for rel in split_depth0(rel_part) {
            if rel.is_empty() {
                continue;
            }
            let mut chars = rel.chars().peekable();
            let word = parse_word(&mut chars, ngens, false)?;
            if chars.peek().is_some() {
                return Err(TreeError::Parse(format!("trailing input in relator `{rel}`")));
            }
            relators.push(word);
        }
        Ok(FpPresentation { ngens, relators, source: text.trim().to_string() })
    }

    /// Evaluate a relator at generator images inside a pc group.
    pub fn evaluate(&self, word: &FpWord, pres: &PcPresentation, images: &[Element]) -> Element {
        eval_word(word, pres, images)
    }

    /// Exponent-sum vector of a relator mod p (commutator terms contribute 0).
    pub fn exponent_sums(&self, word: &FpWord, p: u32) -> Vec<u32> {
        let mut sums = vec![0i64; self.ngens];
        accumulate_sums(word, 1, &mut sums);
        sums.iter().map(|&s| s.rem_euclid(p as i64) as u32).collect()
    }
}

fn accumulate_sums(word: &FpWord, mult: i64, sums: &mut [i64]) {
    for f in word {
        if let FpAtom::Gen(g) = f.atom {
            sums[g] += mult * f.exp;
        }
        // Commutator atoms have zero exponent sums.
    }
}

fn eval_word(word: &FpWord, pres: &PcPresentation, images: &[Element]) -> Element {
    let mut acc = pres.identity();
    for f in word {
        let base = match &f.atom {
            FpAtom::Gen(g) => images[*g].clone(),
            FpAtom::Comm(parts) => {
                let mut cur = eval_word(&parts[0], pres, images);
                for part in &parts[1..] {
                    let rhs = eval_word(part, pres, images);
                    cur = pres.commutator_of(&cur, &rhs);
                }
                cur
            }
        };
        acc = pres.multiply(&acc, &pres.power(&base, f.exp));
    }
    acc
}

fn split_depth0(s: &str) -> Vec<String> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for c in s.chars() {
        match c {
            '(' => {
                depth += 1;
                cur.push(c);
            }
            ')' => {
                depth -= 1;
                cur.push(c);
            }
            ',' if depth == 0 => {
                parts.push(std::mem::take(&mut cur));
            }
            _ => cur.push(c),
        }
    }
    parts.push(cur);
    parts
}

fn parse_word(
    chars: &mut std::iter::Peekable<std::str::Chars<'_>>,
    ngens: usize,
    inside_comm: bool,
) -> Result<FpWord, TreeError> {
    let mut word = Vec::new();
    loop {
        match chars.peek() {
            None => break,
            Some(&c) if c == ',' || c == ')' => {
                if !inside_comm {
                    return Err(TreeError::Parse(format!("unexpected `{c}`")));
                }
                break;
            }
            Some(&c) if c.is_ascii_lowercase() => {
                chars.next();
                let g = c as usize - 'a' as usize;
                if g >= ngens {
                    return Err(TreeError::Parse(format!("generator `{c}` not declared")));
                }
                let exp = parse_exponent(chars)?;
                word.push(FpFactor { atom: FpAtom::Gen(g), exp });
            }
            Some('(') => {
                chars.next();
                let mut parts = vec![parse_word(chars, ngens, true)?];
                loop {
                    match chars.next() {
                        Some(',') => parts.push(parse_word(chars, ngens, true)?),
                        Some(')') => break,
                        other => {
                            return Err(TreeError::Parse(format!(
                                "expected `,` or `)` in commutator, got {other:?}"
                            )))
                        }
                    }
                }
                if parts.len() < 2 {
                    return Err(TreeError::Parse("commutator needs at least two parts".into()));
                }
                let exp = parse_exponent(chars)?;
                word.push(FpFactor { atom: FpAtom::Comm(parts), exp });
            }
            Some(&c) => return Err(TreeError::Parse(format!("unexpected character `{c}`"))),
        }
    }
    Ok(word)
}

fn parse_exponent(chars: &mut std::iter::Peekable<std::str::Chars<'_>>) -> Result<i64, TreeError> {
    if chars.peek() != Some(&'^') {
        return Ok(1);
    }
    chars.next();
    let mut s = String::new();
    if chars.peek() == Some(&'-') {
        s.push('-');
        chars.next();
    }
    while let Some(&c) = chars.peek() {
        if c.is_ascii_digit() {
            s.push(c);
            chars.next();
        } else {
            break;
        }
    }
    s.parse().map_err(|_| TreeError::Parse("bad exponent".into()))
}

/// Built-in presentations from the search for the 2-tower group of
/// Q(sqrt(-5460)); names are accepted anywhere a presentation file is.
pub fn builtin(name: &str) -> Option<FpPresentation> {
    let text = match name {
        // Koch's presentation whose 2-class 2 quotient is Q_2(G_K).
        "koch-q2" => {
            "a,b,c,d | a^-2(d,c), b^-2(d,a)((d,b),b), c^-2(b,a)((d,b),b), \
             d^-2(c,a)(d,a)(d,b), (b,c)"
        }
        // The two conjectured presentations for Q_3(G_K).
        "conj72-1" => {
            "a,b,c,d | a^-2(d,c), b^-2(d,a)((d,b),b), c^-2(b,a)((d,b),b), \
             d^-2(c,a)(d,a)(d,b)(b,a,a)(c,a,a)(d,a,a), (b,c)"
        }
        "conj72-2" => {
            "a,b,c,d | a^-2(d,c), b^-2(d,a)((d,b),b), c^-2(b,a)(b,a,d)(c,a,a)((d,b),b), \
             d^-2(c,a)(d,a)(d,b)(b,a,a)(b,a,d), (b,c)"
        }
        // An infinite descendant of the first of the 128 class-3 candidates.
        "ex93" => {
            "a,b,c,d | a^-2(d,c), b^-2(d,a)(d,b,b)(b,a,a,c), \
             c^-2(b,a)(d,b,b)(b,a,a,c), d^-2(c,a)(d,a)(d,b), (b,c)"
        }
        // Free pro-2 groups (class-1 quotient is elementary abelian).
        "free-1" => "a |",
        "free-2" => "a,b |",
        "free-3" => "a,b,c |",
        "free-4" => "a,b,c,d |",
        _ => return None,
    };
    Some(FpPresentation::parse(text).expect("builtin presentations must parse"))
}

pub fn builtin_names() -> &'static [&'static str] {
    &["koch-q2", "conj72-1", "conj72-2", "ex93", "free-1", "free-2", "free-3", "free-4"]
}
