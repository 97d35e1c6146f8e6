//! Signed alphabets, words, free reduction and abelianization.
//!
//! A letter is a small integer `2·g + s` for generator index `g` and sign bit
//! `s` (1 for the inverse). The induced order is a₁ < a₁⁻¹ < b₁ < b₁⁻¹ < …,
//! which is the order used for lexicographic normal forms.

use std::fmt;

use crate::error::{Error, Result};
use crate::lattice::LatticeVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(u8);

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        assert!(generator < 128, "generator index out of range");
        Letter((generator as u8) << 1 | inverse as u8)
    }

    pub fn from_code(code: u8) -> Self {
        Letter(code)
    }

    pub fn code(self) -> u8 {
        self.0
    }

    pub fn generator(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn inverse(self) -> Self {
        Letter(self.0 ^ 1)
    }
}

/// Which family of generator names an alphabet uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Alphabet {
    /// a1..ak
    Free { rank: usize },
    /// a1, b1, ..., ak, bk
    Surface { genus: usize },
    /// x1..xn, the unknowns of an equation
    Variables { count: usize },
}

impl Alphabet {
    pub fn generators(self) -> usize {
        match self {
            Alphabet::Free { rank } => rank,
            Alphabet::Surface { genus } => 2 * genus,
            Alphabet::Variables { count } => count,
        }
    }

    /// Number of signed letters.
    pub fn size(self) -> usize {
        2 * self.generators()
    }

    pub fn letters(self) -> impl Iterator<Item = Letter> {
        (0..self.size() as u8).map(Letter)
    }

    pub fn generator_name(self, g: usize) -> String {
        match self {
            Alphabet::Free { .. } => format!("a{}", g + 1),
            Alphabet::Surface { .. } => {
                format!("{}{}", if g.is_multiple_of(2) { 'a' } else { 'b' }, g / 2 + 1)
            }
            Alphabet::Variables { .. } => format!("x{}", g + 1),
        }
    }

    fn generator_index(self, stem: char, index: usize) -> Option<usize> {
        if index == 0 {
            return None;
        }
        let g = match (self, stem) {
            (Alphabet::Free { .. }, 'a') => index - 1,
            (Alphabet::Surface { .. }, 'a') => 2 * (index - 1),
            (Alphabet::Surface { .. }, 'b') => 2 * (index - 1) + 1,
            (Alphabet::Variables { .. }, 'x') => index - 1,
            _ => return None,
        };
        (g < self.generators()).then_some(g)
    }

    pub fn format_letter(self, l: Letter) -> String {
        let name = self.generator_name(l.generator());
        if l.is_inverse() {
            name.to_uppercase()
        } else {
            name
        }
    }

    /// Parses words like `a1 b1 A1 B1`, `a1b1a1^-1b1^-1` or `x1^2 x2^-3`.
    ///
    /// Uppercase stems and `^-1` both denote inverses; `1` or an empty string
    /// is the empty word.
    pub fn parse(self, text: &str) -> Result<GroupWord> {
        let chars: Vec<char> = text.chars().collect();
        let mut letters = Vec::new();
        let mut i = 0;
        let err = |msg: String| Error::arg(format!("cannot parse word {text:?}: {msg}"));
        while i < chars.len() {
            let c = chars[i];
            if c.is_whitespace() || c == ',' || c == '*' || c == '.' {
                i += 1;
                continue;
            }
            if c == '1' && (i + 1 == chars.len() || !chars[i + 1].is_ascii_digit()) && letters.is_empty() {
                i += 1;
                continue;
            }
            if !c.is_ascii_alphabetic() {
                return Err(err(format!("unexpected {c:?}")));
            }
            let upper = c.is_ascii_uppercase();
            let stem = c.to_ascii_lowercase();
            i += 1;
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let index: usize = chars[start..i]
                .iter()
                .collect::<String>()
                .parse()
                .map_err(|_| err(format!("generator {c} needs an index")))?;
            let g = self
                .generator_index(stem, index)
                .ok_or_else(|| err(format!("{c}{index} is not a generator of {self:?}")))?;
            let mut exponent: i64 = 1;
            if i < chars.len() && chars[i] == '^' {
                i += 1;
                let start = i;
                if i < chars.len() && chars[i] == '-' {
                    i += 1;
                }
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                exponent = chars[start..i]
                    .iter()
                    .collect::<String>()
                    .parse()
                    .map_err(|_| err("bad exponent".into()))?;
            }
            let inverse = upper ^ (exponent < 0);
            for _ in 0..exponent.unsigned_abs() {
                letters.push(Letter::new(g, inverse));
            }
        }
        Ok(GroupWord(letters))
    }

    pub fn format(self, w: &GroupWord) -> String {
        if w.is_empty() {
            return "1".to_string();
        }
        w.0.iter().map(|&l| self.format_letter(l)).collect::<Vec<_>>().join(" ")
    }
}

/// A finite sequence of letters. Equality is sequence equality.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupWord(pub Vec<Letter>);

impl GroupWord {
    pub fn empty() -> Self {
        GroupWord(Vec::new())
    }

    pub fn from_codes(codes: &[u8]) -> Self {
        GroupWord(codes.iter().map(|&c| Letter(c)).collect())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> GroupWord {
        GroupWord(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn concat(&self, other: &GroupWord) -> GroupWord {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        GroupWord(v)
    }

    pub fn push(&mut self, l: Letter) {
        self.0.push(l);
    }

    pub fn is_freely_reduced(&self) -> bool {
        self.0.windows(2).all(|w| w[0] != w[1].inverse())
    }

    pub fn free_reduce(&self) -> GroupWord {
        let mut out: Vec<Letter> = Vec::with_capacity(self.0.len());
        for &l in &self.0 {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        GroupWord(out)
    }

    /// Product in the free group: concatenation followed by free reduction.
    pub fn mul_reduced(&self, other: &GroupWord) -> GroupWord {
        self.concat(other).free_reduce()
    }

    /// Signed generator counts.
    pub fn abelianize(&self, rank: usize) -> LatticeVector {
        let mut v = vec![0i64; rank];
        for l in &self.0 {
            assert!(l.generator() < rank, "letter outside the alphabet");
            v[l.generator()] += if l.is_inverse() { -1 } else { 1 };
        }
        LatticeVector(v)
    }

    /// w^e for an integer exponent (free reduction applied).
    pub fn pow(&self, e: i64) -> GroupWord {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut acc = GroupWord::empty();
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul_reduced(&base);
        }
        acc
    }
}

/// Commutator [u, v] = u v u⁻¹ v⁻¹.
pub fn commutator(u: &GroupWord, v: &GroupWord) -> GroupWord {
    u.concat(v).concat(&u.inverse()).concat(&v.inverse())
}

/// A free or orientable-surface presentation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    pub alphabet: Alphabet,
    pub relators: Vec<GroupWord>,
}

impl Presentation {
    pub fn free(rank: usize) -> Self {
        Presentation { alphabet: Alphabet::Free { rank }, relators: Vec::new() }
    }

    /// ⟨a₁, b₁, …, a_k, b_k | [a₁,b₁]⋯[a_k,b_k]⟩.
    pub fn surface(genus: usize) -> Self {
        Presentation { alphabet: Alphabet::Surface { genus }, relators: vec![surface_relator(genus)] }
    }

    pub fn abelian_rank(&self) -> usize {
        self.alphabet.generators()
    }
}

pub fn surface_relator(genus: usize) -> GroupWord {
    let mut r = GroupWord::empty();
    for i in 0..genus {
        let a = GroupWord(vec![Letter::new(2 * i, false)]);
        let b = GroupWord(vec![Letter::new(2 * i + 1, false)]);
        r = r.concat(&commutator(&a, &b));
    }
    r
}

/// All freely reduced words of exactly `len` letters over `generators`
/// generators, in lexicographic order.
pub fn reduced_words(generators: usize, len: usize) -> Vec<GroupWord> {
    let size = 2 * generators as u8;
    let mut out = vec![GroupWord::empty()];
    for _ in 0..len {
        let mut next = Vec::with_capacity(out.len() * (size as usize).saturating_sub(1).max(1));
        for w in &out {
            for c in 0..size {
                let l = Letter(c);
                if w.0.last() == Some(&l.inverse()) {
                    continue;
                }
                let mut v = w.0.clone();
                v.push(l);
                next.push(GroupWord(v));
            }
        }
        out = next;
    }
    out
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "g{}{}", l.generator(), if l.is_inverse() { "'" } else { "" })?;
        }
        Ok(())
    }
}
