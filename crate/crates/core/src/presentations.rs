//! Words, finitely presented groups and the defining relators of the families.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{Family, FamilyParams};

/// A word stored as syllables `(generator, exponent)`; exponents are nonzero and
/// adjacent syllables use distinct generators.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Word {
    syllables: Vec<(usize, i64)>,
}

impl Word {
    pub fn identity() -> Self {
        Word::default()
    }

    pub fn gen(g: usize) -> Self {
        Word::power_of(g, 1)
    }

    pub fn power_of(g: usize, e: i64) -> Self {
        Word::from_syllables(vec![(g, e)])
    }

    pub fn from_syllables(syllables: Vec<(usize, i64)>) -> Self {
        let mut w = Word { syllables };
        w.free_reduce_in_place();
        w
    }

    /// Word from letters `±(g + 1)`.
    pub fn from_letters(letters: &[i32]) -> Self {
        Word::from_syllables(
            letters
                .iter()
                .map(|&l| ((l.unsigned_abs() - 1) as usize, l.signum() as i64))
                .collect(),
        )
    }

    pub fn syllables(&self) -> &[(usize, i64)] {
        &self.syllables
    }

    pub fn is_identity(&self) -> bool {
        self.syllables.is_empty()
    }

    /// Number of letters.
    pub fn len(&self) -> usize {
        self.syllables.iter().map(|&(_, e)| e.unsigned_abs() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }

    pub fn max_generator(&self) -> Option<usize> {
        self.syllables.iter().map(|&(g, _)| g).max()
    }

    pub fn invert(&self) -> Word {
        Word {
            syllables: self.syllables.iter().rev().map(|&(g, e)| (g, -e)).collect(),
        }
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut s = self.syllables.clone();
        s.extend_from_slice(&other.syllables);
        Word::from_syllables(s)
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.invert() } else { self.clone() };
        let mut s = Vec::with_capacity(base.syllables.len() * k.unsigned_abs() as usize);
        for _ in 0..k.unsigned_abs() {
            s.extend_from_slice(&base.syllables);
        }
        Word::from_syllables(s)
    }

    /// `[a, b] = a^{-1} b^{-1} a b`.
    pub fn commutator(a: &Word, b: &Word) -> Word {
        a.invert().concat(&b.invert()).concat(a).concat(b)
    }

    /// `a^b = b^{-1} a b`.
    pub fn conjugate(a: &Word, b: &Word) -> Word {
        b.invert().concat(a).concat(b)
    }

    pub fn free_reduce(&self) -> Word {
        Word::from_syllables(self.syllables.clone())
    }

    fn free_reduce_in_place(&mut self) {
        let mut out: Vec<(usize, i64)> = Vec::with_capacity(self.syllables.len());
        for &(g, e) in &self.syllables {
            if e == 0 {
                continue;
            }
            match out.last_mut() {
                Some(last) if last.0 == g => {
                    last.1 += e;
                    if last.1 == 0 {
                        out.pop();
                    }
                }
                _ => out.push((g, e)),
            }
        }
        self.syllables = out;
    }

    /// Cyclic reduction, used for relators.
    pub fn cyclic_reduce(&self) -> Word {
        let mut s = self.syllables.clone();
        loop {
            if s.len() >= 2 && s[0].0 == s[s.len() - 1].0 {
                let (_, e) = s.pop().unwrap();
                s[0].1 += e;
                if s[0].1 == 0 {
                    s.remove(0);
                }
            } else {
                break;
            }
        }
        Word::from_syllables(s)
    }

    /// Letters `2g` for generator g and `2g + 1` for its inverse.
    pub fn letters(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.len());
        for &(g, e) in &self.syllables {
            let l = if e > 0 { 2 * g } else { 2 * g + 1 };
            out.extend(std::iter::repeat_n(l, e.unsigned_abs() as usize));
        }
        out
    }

    pub fn display_with(&self, names: &[String]) -> String {
        if self.syllables.is_empty() {
            return "1".into();
        }
        self.syllables
            .iter()
            .map(|&(g, e)| {
                let n = names.get(g).cloned().unwrap_or_else(|| format!("g{g}"));
                if e == 1 {
                    n
                } else {
                    format!("{n}^{e}")
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Presentation {
    pub names: Vec<String>,
    pub relators: Vec<Word>,
}

impl Presentation {
    pub fn new(ngens: usize, relators: Vec<Word>) -> Self {
        let names = default_names(ngens);
        Presentation::with_names(names, relators)
    }

    pub fn with_names(names: Vec<String>, relators: Vec<Word>) -> Self {
        let relators = relators
            .into_iter()
            .map(|w| w.cyclic_reduce())
            .filter(|w| !w.is_identity())
            .collect();
        Presentation { names, relators }
    }

    pub fn ngens(&self) -> usize {
        self.names.len()
    }

    pub fn with_extra_relators(&self, extra: impl IntoIterator<Item = Word>) -> Presentation {
        let mut rels = self.relators.clone();
        rels.extend(extra);
        Presentation::with_names(self.names.clone(), rels)
    }

    pub fn parse(text: &str) -> Result<Presentation> {
        parse_presentation(text)
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rels: Vec<String> = self.relators.iter().map(|w| w.display_with(&self.names)).collect();
        write!(f, "{} | {}", self.names.join(", "), rels.join(", "))
    }
}

fn default_names(n: usize) -> Vec<String> {
    const BASE: [&str; 4] = ["x", "y", "z", "w"];
    (0..n)
        .map(|i| BASE.get(i).map(|s| s.to_string()).unwrap_or_else(|| format!("g{i}")))
        .collect()
}

/// Relator of `a^{[a,b]} = a^e`, i.e. `[a,b]^{-1} a [a,b] a^{-e}`.
pub fn conj_by_commutator_relator(a: usize, b: usize, e: i64) -> Word {
    let (wa, wb) = (Word::gen(a), Word::gen(b));
    let c = Word::commutator(&wa, &wb);
    Word::conjugate(&wa, &c).concat(&Word::power_of(a, -e))
}

/// Symmetric residue of `e` modulo `n`, in `(-n/2, n/2]`.
pub fn symmetric_residue(e: i64, n: i64) -> i64 {
    let r = e.rem_euclid(n);
    if 2 * r > n {
        r - n
    } else {
        r
    }
}

fn macdonald_relators(beta: i64) -> Vec<Word> {
    vec![
        conj_by_commutator_relator(0, 1, beta),
        conj_by_commutator_relator(1, 0, beta),
    ]
}

/// Defining relators of a family; α is replaced by its symmetric residue modulo the
/// exponent of the power relators, which leaves the group unchanged.
pub fn presentation(params: &FamilyParams) -> Result<Presentation> {
    use Family::*;
    match params.family {
        H3 | K3 => return Err(Error::ConstructAsQuotient(if params.family == H3 { "H3" } else { "K3" })),
        G => return macdonald_presentation(params.alpha),
        _ => {}
    }
    let n = params.power_exponent().expect("J/H/K families have a power exponent");
    let alpha = symmetric_residue(params.alpha, n);
    let mut rels = macdonald_relators(alpha);
    rels.push(Word::power_of(0, n));
    rels.push(Word::power_of(1, n));
    match params.family {
        K1 => rels.push(Word::commutator(&Word::gen(0), &Word::gen(1)).pow(params.pm())),
        K2 => rels.push(Word::commutator(&Word::gen(0), &Word::gen(1)).pow(1 << (params.m - 1))),
        _ => {}
    }
    Ok(Presentation::new(2, rels))
}

pub fn macdonald_presentation(beta: i64) -> Result<Presentation> {
    if beta == 1 {
        return Err(Error::InfiniteGroup);
    }
    Ok(Presentation::new(2, macdonald_relators(beta)))
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    names: &'a [String],
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && (self.chars[self.pos].is_whitespace() || self.chars[self.pos] == '*') {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::Parse(format!("expected '{c}' at offset {}", self.pos)))
        }
    }

    fn integer(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        if matches!(self.chars.get(self.pos), Some('-') | Some('+')) {
            self.pos += 1;
        }
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().map_err(|_| Error::Parse(format!("bad integer '{s}'")))
    }

    fn ident(&mut self) -> Result<usize> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && (self.chars[self.pos].is_alphanumeric() || self.chars[self.pos] == '_') {
            self.pos += 1;
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        self.names
            .iter()
            .position(|n| *n == s)
            .ok_or_else(|| Error::Parse(format!("unknown generator '{s}'")))
    }

    /// word := factor*
    fn word(&mut self) -> Result<Word> {
        let mut w = Word::identity();
        while let Some(c) = self.peek() {
            if c == ',' || c == ']' || c == ')' || c == '=' {
                break;
            }
            let f = self.factor()?;
            w = w.concat(&f);
        }
        Ok(w)
    }

    /// factor := atom ('^' ('-'? integer | '-'? atom))*
    fn factor(&mut self) -> Result<Word> {
        let mut base = self.atom()?;
        while self.peek() == Some('^') {
            self.pos += 1;
            let negate = self.peek() == Some('-');
            let digit_follows = {
                let i = self.pos + usize::from(negate);
                self.chars.get(i).is_some_and(|c| c.is_ascii_digit())
            };
            if digit_follows {
                base = base.pow(self.integer()?);
            } else {
                if negate {
                    self.pos += 1;
                }
                let by = self.atom()?;
                base = Word::conjugate(&base, &by);
                if negate {
                    base = base.invert();
                }
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Word> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let w = self.word()?;
                self.expect(')')?;
                Ok(w)
            }
            Some('[') => {
                self.pos += 1;
                let a = self.word()?;
                self.expect(',')?;
                let b = self.word()?;
                self.expect(']')?;
                Ok(Word::commutator(&a, &b))
            }
            Some('1') => {
                self.pos += 1;
                Ok(Word::identity())
            }
            Some(_) => Ok(Word::gen(self.ident()?)),
            None => Err(Error::Parse("unexpected end of input".into())),
        }
    }

    /// relation := word ('=' word)?
    fn relation(&mut self) -> Result<Word> {
        let lhs = self.word()?;
        if self.peek() == Some('=') {
            self.pos += 1;
            let rhs = self.word()?;
            Ok(lhs.concat(&rhs.invert()))
        } else {
            Ok(lhs)
        }
    }
}

pub fn parse_word(text: &str, names: &[String]) -> Result<Word> {
    let mut p = Parser {
        chars: text.chars().collect(),
        pos: 0,
        names,
    };
    let w = p.relation()?;
    if p.peek().is_some() {
        return Err(Error::Parse(format!("trailing input at offset {}", p.pos)));
    }
    Ok(w)
}

fn parse_presentation(text: &str) -> Result<Presentation> {
    let (gens, rels) = text
        .split_once('|')
        .ok_or_else(|| Error::Parse("missing '|'".into()))?;
    let names: Vec<String> = gens
        .split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect();
    if names.is_empty() {
        return Err(Error::Parse("no generators".into()));
    }
    for n in &names {
        if !n.chars().all(|c| c.is_alphanumeric() || c == '_') || n.chars().next().unwrap().is_ascii_digit() {
            return Err(Error::Parse(format!("bad generator name '{n}'")));
        }
    }
    let mut p = Parser {
        chars: rels.chars().collect(),
        pos: 0,
        names: &names,
    };
    let mut relators = Vec::new();
    while p.peek().is_some() {
        relators.push(p.relation()?);
        match p.peek() {
            Some(',') => p.pos += 1,
            None => break,
            Some(c) => return Err(Error::Parse(format!("unexpected '{c}' at offset {}", p.pos))),
        }
    }
    Ok(Presentation::with_names(names, relators))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Word {
        Word::gen(0)
    }
    fn y() -> Word {
        Word::gen(1)
    }

    #[test]
    fn word_ops() {
        let xy = x().concat(&y());
        assert_eq!(xy.invert(), Word::from_syllables(vec![(1, -1), (0, -1)]));
        assert!(x().concat(&x().invert()).is_identity());
        let w = Word::from_syllables(vec![(0, 1), (1, 1), (1, -1), (0, 1)]);
        assert_eq!(w, Word::power_of(0, 2));
    }

    #[test]
    fn relator_shape() {
        let r = conj_by_commutator_relator(0, 1, 6);
        let expect = Word::from_letters(&[-2, -1, 2, 1, -2, 1, 2]).concat(&Word::power_of(0, -6));
        assert_eq!(r, expect);
        assert_eq!(r.len(), 13);
        let r = conj_by_commutator_relator(1, 0, 6);
        let expect = Word::from_letters(&[-1, -2, 1, 2, -1, 2, 1]).concat(&Word::power_of(1, -6));
        assert_eq!(r, expect);
    }

    #[test]
    fn family_presentations() {
        let j3 = presentation(&FamilyParams::new(Family::J3, 3, 1, 2).unwrap()).unwrap();
        assert_eq!(j3.relators.len(), 4);
        assert_eq!(j3.relators[2], Word::power_of(0, 81));
        let k1 = presentation(&FamilyParams::new(Family::K1, 5, 1, 1).unwrap()).unwrap();
        assert_eq!(k1.relators.len(), 5);
        assert_eq!(k1.relators[4], Word::commutator(&x(), &y()).pow(5));
        let h2 = presentation(&FamilyParams::new(Family::H2, 2, 2, 1).unwrap()).unwrap();
        assert_eq!(h2.relators[3], Word::power_of(1, 8));
        let h3 = FamilyParams::new(Family::H3, 3, 1, 2).unwrap();
        assert!(matches!(presentation(&h3), Err(Error::ConstructAsQuotient(_))));
    }

    #[test]
    fn macdonald() {
        let g = macdonald_presentation(3).unwrap();
        assert_eq!(g.relators.len(), 2);
        assert_eq!(g.relators[0], conj_by_commutator_relator(0, 1, 3));
        assert!(macdonald_presentation(0).is_ok());
        assert_eq!(macdonald_presentation(1), Err(Error::InfiniteGroup));
    }

    #[test]
    fn parse_round_trip() {
        let p = presentation(&FamilyParams::new(Family::K1, 5, 1, 1).unwrap()).unwrap();
        let text = p.to_string();
        assert_eq!(Presentation::parse(&text).unwrap(), p);
        let q = Presentation::parse("x, y | x^[x,y] = x^6, y^[y,x] = y^6, x^125, y^125").unwrap();
        let j = presentation(&FamilyParams::new(Family::J1, 5, 1, 1).unwrap()).unwrap();
        assert_eq!(q, j);
        let r = Presentation::parse("a | [a,a]").unwrap();
        assert!(r.relators.is_empty());
        assert!(Presentation::parse("x | z").is_err());
    }
}
