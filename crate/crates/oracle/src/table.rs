//! Multiplication tables built by naive leftmost-violation word rewriting.
//!
//! A word is a flat sequence of generator symbols. The rewriting rules are
//! read straight off the presentation: a descent a_j a_i (j > i) becomes
//! a_i a_j [a_j, a_i], and a run of p equal symbols becomes the power
//! relation's right-hand side. Leftmost violation first, until normal.

use pc_core::{Element, PcPresentation};

#[derive(Debug, Clone)]
pub struct TableGroup {
    pub prime: u32,
    pub ngens: usize,
    pub size: usize,
    /// table[x * size + y] = index of the product.
    pub table: Vec<u16>,
    pub inv: Vec<u16>,
}

const REWRITE_FUEL: usize = 2_000_000;

impl TableGroup {
    /// Build the full table for a presentation of order at most `max_size`:
    /// normalize x·a_g by word rewriting for every element and generator
    /// (the Cayley-graph closure), then compose arbitrary products from
    /// those edges.
    pub fn build(pres: &PcPresentation, max_size: usize) -> Option<TableGroup> {
        let p = pres.prime() as usize;
        let ngens = pres.ngens();
        let size = p.checked_pow(ngens as u32).filter(|&s| s <= max_size)?;
        let mut gen_mult = vec![0u16; size * ngens.max(1)];
        for x in 0..size {
            let wx = flat_of_index(pres, x);
            for g in 0..ngens {
                let mut w = wx.clone();
                w.push(g);
                let digits = normalize(pres, w)?;
                gen_mult[x * ngens + g] = index_of_digits(pres, &digits) as u16;
            }
        }
        let mut table = vec![0u16; size * size];
        for x in 0..size {
            for y in 0..size {
                let mut acc = x as u16;
                for g in flat_of_index(pres, y) {
                    acc = gen_mult[acc as usize * ngens + g];
                }
                table[x * size + y] = acc;
            }
        }
        let mut inv = vec![0u16; size];
        for x in 0..size {
            let y = (0..size).find(|&y| table[x * size + y] == 0)?;
            inv[x] = y as u16;
        }
        Some(TableGroup { prime: pres.prime(), ngens, size, table, inv })
    }

    #[inline]
    pub fn mul(&self, x: u16, y: u16) -> u16 {
        self.table[x as usize * self.size + y as usize]
    }

    pub fn conj(&self, x: u16, g: u16) -> u16 {
        self.mul(self.mul(self.inv[g as usize], x), g)
    }

    pub fn comm(&self, x: u16, y: u16) -> u16 {
        let ix = self.inv[x as usize];
        let iy = self.inv[y as usize];
        self.mul(self.mul(ix, iy), self.mul(x, y))
    }

    pub fn pow(&self, x: u16, e: u64) -> u16 {
        let mut acc = 0u16;
        for _ in 0..e {
            acc = self.mul(acc, x);
        }
        acc
    }

    pub fn order_of(&self, x: u16) -> u64 {
        let mut acc = x;
        let mut n = 1u64;
        while acc != 0 {
            acc = self.mul(acc, x);
            n += 1;
        }
        n
    }

    /// Exhaustive associativity check plus identity and inverses.
    pub fn is_consistent_table(&self) -> bool {
        let n = self.size as u16;
        for a in 0..n {
            if self.mul(0, a) != a || self.mul(a, 0) != a {
                return false;
            }
        }
        for a in 0..n {
            for b in 0..n {
                let ab = self.mul(a, b);
                for c in 0..n {
                    if self.mul(ab, c) != self.mul(a, self.mul(b, c)) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Index of a pc-core element (digit vector) in this table.
    pub fn index_of_element(&self, e: &Element) -> u16 {
        let mut idx = 0usize;
        for &d in e.exponents() {
            idx = idx * self.prime as usize + d as usize;
        }
        idx as u16
    }

    /// Digit vector of a table index.
    pub fn digits_of(&self, mut x: u16) -> Vec<u32> {
        let p = self.prime;
        let mut out = vec![0u32; self.ngens];
        for i in (0..self.ngens).rev() {
            out[i] = (x as u32) % p;
            x /= p as u16;
        }
        out
    }

    /// Closure of a subset under multiplication (subgroup generated by it).
    pub fn closure(&self, gens: &[u16]) -> Vec<u16> {
        let mut in_set = vec![false; self.size];
        in_set[0] = true;
        let mut members = vec![0u16];
        let mut frontier = vec![0u16];
        while let Some(x) = frontier.pop() {
            for &g in gens {
                let y = self.mul(x, g);
                if !in_set[y as usize] {
                    in_set[y as usize] = true;
                    members.push(y);
                    frontier.push(y);
                }
            }
        }
        members.sort_unstable();
        members
    }

    /// Every subgroup, as sorted element lists (breadth-first closure lattice).
    pub fn all_subgroups(&self) -> Vec<Vec<u16>> {
        use std::collections::HashSet;
        let mut seen: HashSet<Vec<u16>> = HashSet::new();
        let trivial = vec![0u16];
        seen.insert(trivial.clone());
        let mut frontier = vec![trivial];
        let mut all = vec![vec![0u16]];
        while let Some(sub) = frontier.pop() {
            for g in 1..self.size as u16 {
                if sub.binary_search(&g).is_ok() {
                    continue;
                }
                let mut gens = sub.clone();
                gens.push(g);
                let bigger = self.closure(&gens);
                if seen.insert(bigger.clone()) {
                    all.push(bigger.clone());
                    frontier.push(bigger);
                }
            }
        }
        all
    }

    /// Derived subgroup of a subgroup given by its element list.
    pub fn derived_of(&self, members: &[u16]) -> Vec<u16> {
        let mut gens = Vec::new();
        for &a in members {
            for &b in members {
                let c = self.comm(a, b);
                if c != 0 {
                    gens.push(c);
                }
            }
        }
        if gens.is_empty() {
            return vec![0];
        }
        self.closure(&gens)
    }

    /// A minimal generating sequence of size d(G): start the span at the
    /// Frattini subgroup (squares and commutators for p = 2; p-th powers in
    /// general), then greedy picks are independent mod Frattini (Burnside).
    pub fn generating_set(&self) -> Vec<u16> {
        let n = self.size as u16;
        let mut frat_gens: Vec<u16> = Vec::new();
        for x in 0..n {
            let px = self.pow(x, self.prime as u64);
            if px != 0 {
                frat_gens.push(px);
            }
            for y in 0..n {
                let c = self.comm(x, y);
                if c != 0 {
                    frat_gens.push(c);
                }
            }
        }
        frat_gens.sort_unstable();
        frat_gens.dedup();
        let mut base = self.closure(&frat_gens);
        let mut gens: Vec<u16> = Vec::new();
        while base.len() < self.size {
            let g = (1..n)
                .find(|g| base.binary_search(g).is_err())
                .expect("group not exhausted but no element outside span");
            gens.push(g);
            let mut all = base.clone();
            all.push(g);
            base = self.closure(&all);
        }
        gens
    }
}

fn flat_of_index(pres: &PcPresentation, mut x: usize) -> Vec<usize> {
    let p = pres.prime() as usize;
    let n = pres.ngens();
    let mut digits = vec![0usize; n];
    for i in (0..n).rev() {
        digits[i] = x % p;
        x /= p;
    }
    let mut word = Vec::new();
    for (g, &d) in digits.iter().enumerate() {
        for _ in 0..d {
            word.push(g);
        }
    }
    word
}

fn index_of_digits(pres: &PcPresentation, digits: &[u32]) -> usize {
    let p = pres.prime() as usize;
    let mut idx = 0usize;
    for &d in digits {
        idx = idx * p + d as usize;
    }
    idx
}

/// Leftmost-violation rewriting to normal digits. Returns None on fuel
/// exhaustion (non-terminating only for pathological inputs).
pub fn normalize(pres: &PcPresentation, mut word: Vec<usize>) -> Option<Vec<u32>> {
    let p = pres.prime() as usize;
    for _ in 0..REWRITE_FUEL {
        let mut violation: Option<(usize, bool)> = None; // (pos, is_run)
        let mut i = 0;
        while i < word.len() {
            // Run of p equal symbols starting at i?
            if i + p <= word.len() && word[i..i + p].iter().all(|&g| g == word[i]) {
                violation = Some((i, true));
                break;
            }
            if i + 1 < word.len() && word[i] > word[i + 1] {
                violation = Some((i, false));
                break;
            }
            i += 1;
        }
        match violation {
            None => {
                let mut digits = vec![0u32; pres.ngens()];
                for &g in &word {
                    digits[g] += 1;
                }
                debug_assert!(digits.iter().all(|&d| d < pres.prime()));
                return Some(digits);
            }
            Some((pos, true)) => {
                let g = word[pos];
                let mut replacement: Vec<usize> = Vec::new();
                for &(h, e) in pres.power_word(g) {
                    for _ in 0..e {
                        replacement.push(h);
                    }
                }
                word.splice(pos..pos + p, replacement);
            }
            Some((pos, false)) => {
                let (j, i0) = (word[pos], word[pos + 1]);
                let mut replacement: Vec<usize> = vec![i0, j];
                for &(h, e) in pres.commutator_word(j, i0) {
                    for _ in 0..e {
                        replacement.push(h);
                    }
                }
                word.splice(pos..pos + 2, replacement);
            }
        }
    }
    None
}
