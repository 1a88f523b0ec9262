//! Free-group words over named generator alphabets.
//!
//! A [`Word`] is always freely reduced, so equality of words is equality in
//! the free group. Unreduced letter sequences appear only in derivation
//! traces and proof replay, where they are plain `Vec<Letter>`s.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GeneratorId(pub u16);

impl GeneratorId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A generator or its inverse. Ordering is `a < a^-1 < b < b^-1 < ...`,
/// which is the order used for canonical relator rotations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub gen: GeneratorId,
    pub inverse: bool,
}

impl Letter {
    pub fn new(gen: GeneratorId, sign: i8) -> Self {
        debug_assert!(sign == 1 || sign == -1);
        Letter {
            gen,
            inverse: sign < 0,
        }
    }

    pub fn pos(gen: u16) -> Self {
        Letter {
            gen: GeneratorId(gen),
            inverse: false,
        }
    }

    pub fn neg(gen: u16) -> Self {
        Letter {
            gen: GeneratorId(gen),
            inverse: true,
        }
    }

    pub fn sign(self) -> i64 {
        if self.inverse {
            -1
        } else {
            1
        }
    }

    pub fn inv(self) -> Self {
        Letter {
            gen: self.gen,
            inverse: !self.inverse,
        }
    }

    pub fn cancels(self, other: Letter) -> bool {
        self.gen == other.gen && self.inverse != other.inverse
    }
}

/// Immutable symbol table. Two alphabets are equal when their names agree.
#[derive(Clone)]
pub struct Alphabet(Arc<[String]>);

impl Alphabet {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for n in names {
            let n = n.as_ref();
            if !is_valid_name(n) {
                return Err(Error::InvalidName(n.to_string()));
            }
            if !seen.insert(n) {
                return Err(Error::DuplicateGenerator(n.to_string()));
            }
        }
        if names.len() > u16::MAX as usize {
            return Err(Error::Malformed("too many generators".into()));
        }
        Ok(Alphabet(
            names.iter().map(|n| n.as_ref().to_string()).collect(),
        ))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn name(&self, g: GeneratorId) -> &str {
        &self.0[g.index()]
    }

    pub fn lookup(&self, name: &str) -> Option<GeneratorId> {
        self.0
            .iter()
            .position(|n| n == name)
            .map(|i| GeneratorId(i as u16))
    }

    pub fn generators(&self) -> impl Iterator<Item = GeneratorId> {
        (0..self.0.len() as u16).map(GeneratorId)
    }

    pub fn ensure_same(&self, other: &Alphabet) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::AlphabetMismatch {
                left: self.0.join(","),
                right: other.0.join(","),
            })
        }
    }
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl Eq for Alphabet {}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.0.join(","))
    }
}

pub fn is_valid_name(n: &str) -> bool {
    let mut chars = n.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Free reduction of a letter sequence (stack based, single pass).
pub fn reduce_letters(raw: &[Letter]) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::with_capacity(raw.len());
    for &l in raw {
        match out.last() {
            Some(&top) if top.cancels(l) => {
                out.pop();
            }
            _ => out.push(l),
        }
    }
    out
}

pub fn invert_letters(raw: &[Letter]) -> Vec<Letter> {
    raw.iter().rev().map(|l| l.inv()).collect()
}

pub fn is_reduced(raw: &[Letter]) -> bool {
    raw.windows(2).all(|w| !w[0].cancels(w[1]))
}

pub fn is_cyclically_reduced(raw: &[Letter]) -> bool {
    is_reduced(raw)
        && match (raw.first(), raw.last()) {
            (Some(&f), Some(&l)) if raw.len() > 1 => !f.cancels(l),
            _ => true,
        }
}

#[derive(Clone, PartialEq, Eq)]
pub struct Word {
    alphabet: Alphabet,
    letters: Vec<Letter>,
}

impl Word {
    pub fn identity(alphabet: &Alphabet) -> Self {
        Word {
            alphabet: alphabet.clone(),
            letters: Vec::new(),
        }
    }

    /// `reduce`: the unique freely reduced form of a raw letter sequence.
    pub fn from_letters(alphabet: &Alphabet, raw: &[Letter]) -> Self {
        debug_assert!(raw.iter().all(|l| l.gen.index() < alphabet.len()));
        Word {
            alphabet: alphabet.clone(),
            letters: reduce_letters(raw),
        }
    }

    pub fn generator(alphabet: &Alphabet, g: GeneratorId) -> Self {
        Word {
            alphabet: alphabet.clone(),
            letters: vec![Letter {
                gen: g,
                inverse: false,
            }],
        }
    }

    /// `g^e` for a generator named `name`.
    pub fn gen_power(alphabet: &Alphabet, name: &str, e: i64) -> Result<Self> {
        let g = alphabet
            .lookup(name)
            .ok_or_else(|| Error::MissingImage(name.to_string()))?;
        Ok(Word::generator(alphabet, g).pow(e))
    }

    pub fn parse(alphabet: &Alphabet, text: &str) -> Result<Self> {
        let raw = parse_letters(alphabet, text, 1, 1)?;
        Ok(Word::from_letters(alphabet, &raw))
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Result<Word> {
        self.alphabet.ensure_same(&other.alphabet)?;
        let mut letters = self.letters.clone();
        for &l in &other.letters {
            match letters.last() {
                Some(&top) if top.cancels(l) => {
                    letters.pop();
                }
                _ => letters.push(l),
            }
        }
        Ok(Word {
            alphabet: self.alphabet.clone(),
            letters,
        })
    }

    /// Product of several words over one alphabet.
    pub fn product<'a, I: IntoIterator<Item = &'a Word>>(
        alphabet: &Alphabet,
        words: I,
    ) -> Result<Word> {
        words
            .into_iter()
            .try_fold(Word::identity(alphabet), |acc, w| acc.concat(w))
    }

    pub fn inverse(&self) -> Word {
        Word {
            alphabet: self.alphabet.clone(),
            letters: invert_letters(&self.letters),
        }
    }

    pub fn pow(&self, e: i64) -> Word {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut raw = Vec::with_capacity(base.len() * e.unsigned_abs() as usize);
        for _ in 0..e.unsigned_abs() {
            raw.extend_from_slice(&base.letters);
        }
        Word::from_letters(&self.alphabet, &raw)
    }

    pub fn substitute(&self, map: &Substitution) -> Result<Word> {
        let raw = map.apply_raw(&self.alphabet, &self.letters)?;
        Ok(Word::from_letters(&map.target, &raw))
    }

    /// Returns `(core, conjugator)` with `self = conjugator * core * conjugator^-1`
    /// and `core` cyclically reduced.
    pub fn cyclic_reduce(&self) -> (Word, Word) {
        let l = &self.letters;
        let mut i = 0;
        while l.len() >= 2 * i + 2 && l[i].cancels(l[l.len() - 1 - i]) {
            i += 1;
        }
        let core = l[i..l.len() - i].to_vec();
        let conj = l[..i].to_vec();
        (
            Word {
                alphabet: self.alphabet.clone(),
                letters: core,
            },
            Word {
                alphabet: self.alphabet.clone(),
                letters: conj,
            },
        )
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        is_cyclically_reduced(&self.letters)
    }

    /// Cyclic rotation by `k` letters to the left. Only meaningful (and only
    /// guaranteed reduced) for cyclically reduced words.
    pub fn rotate(&self, k: usize) -> Word {
        if self.letters.is_empty() {
            return self.clone();
        }
        let k = k % self.letters.len();
        let mut letters = self.letters[k..].to_vec();
        letters.extend_from_slice(&self.letters[..k]);
        Word::from_letters(&self.alphabet, &letters)
    }

    pub fn stats(&self) -> WordStats {
        let n = self.alphabet.len();
        let mut exponent_sum = vec![0i64; n];
        let mut occurrences = vec![0usize; n];
        for l in &self.letters {
            exponent_sum[l.gen.index()] += l.sign();
            occurrences[l.gen.index()] += 1;
        }
        WordStats {
            exponent_sum,
            occurrences,
            is_positive: self.letters.iter().all(|l| !l.inverse),
            length: self.letters.len(),
        }
    }

    pub fn exponent_sum(&self, g: GeneratorId) -> i64 {
        self.letters
            .iter()
            .filter(|l| l.gen == g)
            .map(|l| l.sign())
            .sum()
    }

    pub fn render(&self) -> String {
        render_letters(&self.alphabet, &self.letters)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            write!(f, "Word(1)")
        } else {
            write!(f, "Word({})", self.render())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordStats {
    pub exponent_sum: Vec<i64>,
    pub occurrences: Vec<usize>,
    pub is_positive: bool,
    pub length: usize,
}

impl WordStats {
    pub fn contains(&self, g: GeneratorId) -> bool {
        self.occurrences[g.index()] > 0
    }
}

/// Homomorphism of free groups given by generator images.
#[derive(Debug, Clone)]
pub struct Substitution {
    pub source: Alphabet,
    pub target: Alphabet,
    images: Vec<Option<Word>>,
}

impl Substitution {
    pub fn new(source: &Alphabet, target: &Alphabet) -> Self {
        Substitution {
            source: source.clone(),
            target: target.clone(),
            images: vec![None; source.len()],
        }
    }

    pub fn identity(alphabet: &Alphabet) -> Self {
        let mut s = Substitution::new(alphabet, alphabet);
        for g in alphabet.generators() {
            s.images[g.index()] = Some(Word::generator(alphabet, g));
        }
        s
    }

    /// Builds a map from `(source name, target word text)` pairs.
    pub fn from_pairs(
        source: &Alphabet,
        target: &Alphabet,
        pairs: &[(&str, &str)],
    ) -> Result<Self> {
        let mut s = Substitution::new(source, target);
        for (name, text) in pairs {
            let w = Word::parse(target, text)?;
            s.set(name, w)?;
        }
        Ok(s)
    }

    pub fn set(&mut self, name: &str, image: Word) -> Result<()> {
        let g = self
            .source
            .lookup(name)
            .ok_or_else(|| Error::MissingImage(name.to_string()))?;
        self.target.ensure_same(image.alphabet())?;
        self.images[g.index()] = Some(image);
        Ok(())
    }

    pub fn image(&self, g: GeneratorId) -> Option<&Word> {
        self.images.get(g.index()).and_then(|w| w.as_ref())
    }

    /// Letter-wise image with no reduction.
    pub fn apply_raw(&self, alphabet: &Alphabet, letters: &[Letter]) -> Result<Vec<Letter>> {
        self.source.ensure_same(alphabet)?;
        let mut out = Vec::new();
        for l in letters {
            let img = self
                .image(l.gen)
                .ok_or_else(|| Error::MissingImage(self.source.name(l.gen).to_string()))?;
            if l.inverse {
                out.extend(invert_letters(img.letters()));
            } else {
                out.extend_from_slice(img.letters());
            }
        }
        Ok(out)
    }

    pub fn is_total(&self) -> bool {
        self.images.iter().all(|i| i.is_some())
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, Option<&Word>)> {
        self.source
            .names()
            .iter()
            .zip(self.images.iter())
            .map(|(n, w)| (n.as_str(), w.as_ref()))
    }
}

pub fn render_letters(alphabet: &Alphabet, letters: &[Letter]) -> String {
    let mut parts = Vec::new();
    let mut i = 0;
    while i < letters.len() {
        let l = letters[i];
        let mut j = i;
        while j < letters.len() && letters[j] == l {
            j += 1;
        }
        let e = (j - i) as i64 * l.sign();
        let name = alphabet.name(l.gen);
        if e == 1 {
            parts.push(name.to_string());
        } else {
            parts.push(format!("{name}^{e}"));
        }
        i = j;
    }
    parts.join(" ")
}

/// Parses `factor*` with `factor := name ('^' integer)?` into raw letters.
/// `line`/`column` give the position of `text` inside a larger document.
pub fn parse_letters(
    alphabet: &Alphabet,
    text: &str,
    line: usize,
    column: usize,
) -> Result<Vec<Letter>> {
    let mut out = Vec::new();
    let mut cur = Cursor::new(text, line, column);
    loop {
        cur.skip_ws();
        let (line, col) = cur.pos();
        let Some(c) = cur.peek() else { break };
        if !c.is_ascii_alphabetic() {
            return Err(Error::Syntax {
                line,
                column: col,
                message: format!("expected generator name, found `{c}`"),
            });
        }
        let name = cur.take_while(|c| c.is_ascii_alphanumeric() || c == '_');
        let g = alphabet.lookup(&name).ok_or(Error::UnknownGenerator {
            name: name.clone(),
            line,
            column: col,
        })?;
        cur.skip_ws();
        let mut exp: i64 = 1;
        if cur.peek() == Some('^') {
            cur.bump();
            cur.skip_ws();
            let (l2, c2) = cur.pos();
            let mut digits = String::new();
            if let Some(s) = cur.peek().filter(|&c| c == '-' || c == '+') {
                digits.push(s);
                cur.bump();
            }
            digits.push_str(&cur.take_while(|c| c.is_ascii_digit()));
            exp = digits.parse().map_err(|_| Error::Syntax {
                line: l2,
                column: c2,
                message: "expected integer exponent".into(),
            })?;
        }
        let letter = Letter {
            gen: g,
            inverse: exp < 0,
        };
        for _ in 0..exp.unsigned_abs() {
            out.push(letter);
        }
    }
    Ok(out)
}

pub(crate) struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl<'a> Cursor<'a> {
    pub(crate) fn new(text: &'a str, line: usize, column: usize) -> Self {
        Cursor {
            chars: text.chars().peekable(),
            line,
            column,
        }
    }

    pub(crate) fn pos(&self) -> (usize, usize) {
        (self.line, self.column)
    }

    pub(crate) fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    pub(crate) fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    pub(crate) fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_whitespace()) {
            self.bump();
        }
    }

    pub(crate) fn take_while(&mut self, f: impl Fn(char) -> bool) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek().filter(|&c| f(c)) {
            s.push(c);
            self.bump();
        }
        s
    }
}

/// Convenience map from generator names to image words.
pub fn substitution_from_map(
    source: &Alphabet,
    target: &Alphabet,
    map: &HashMap<String, Word>,
) -> Result<Substitution> {
    let mut s = Substitution::new(source, target);
    for (k, v) in map {
        s.set(k, v.clone())?;
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> Alphabet {
        Alphabet::new(&["a", "b"]).unwrap()
    }

    fn w(s: &str) -> Word {
        Word::parse(&ab(), s).unwrap()
    }

    #[test]
    fn reduce_examples() {
        let al = ab();
        let raw = parse_letters(&al, "a a^-1 b", 1, 1).unwrap();
        assert_eq!(Word::from_letters(&al, &raw), w("b"));
        assert!(Word::from_letters(&al, &[]).is_empty());
        let raw = parse_letters(&al, "b a a a^-1 b^-1", 1, 1).unwrap();
        assert_eq!(Word::from_letters(&al, &raw).render(), "b a b^-1");
    }

    #[test]
    fn concat_examples() {
        assert_eq!(w("a b").concat(&w("b^-1 a")).unwrap(), w("a^2"));
        assert_eq!(w("a b").concat(&w("")).unwrap(), w("a b"));
        assert_eq!(w("b a b^-1").concat(&w("b a^-1")).unwrap(), w("b"));
    }

    #[test]
    fn concat_rejects_mixed_alphabets() {
        let xy = Alphabet::new(&["x", "y"]).unwrap();
        let u = Word::parse(&xy, "x").unwrap();
        assert!(matches!(
            w("a").concat(&u),
            Err(Error::AlphabetMismatch { .. })
        ));
    }

    #[test]
    fn invert_and_power() {
        assert_eq!(w("a b^-1").inverse(), w("b a^-1"));
        assert_eq!(w("b a b").inverse().render(), "b^-1 a^-1 b^-1");
        assert_eq!(w("b a").pow(2).render(), "b a b a");
        assert_eq!(w("a").pow(-3).render(), "a^-3");
        assert_eq!(w("a b a^-1").pow(3).render(), "a b^3 a^-1");
    }

    #[test]
    fn substitute_examples() {
        let xy = Alphabet::new(&["x", "y"]).unwrap();
        let ay = Alphabet::new(&["a", "y"]).unwrap();
        let s = Substitution::from_pairs(&xy, &ay, &[("x", "a^-1 y"), ("y", "y")]).unwrap();
        let u = Word::parse(&xy, "x^2").unwrap();
        assert_eq!(u.substitute(&s).unwrap().render(), "a^-1 y a^-1 y");

        let id = Substitution::identity(&xy);
        let u = Word::parse(&xy, "x y^-2 x").unwrap();
        assert_eq!(u.substitute(&id).unwrap(), u);

        let xab = Alphabet::new(&["x", "a", "b"]).unwrap();
        let xy_to_xab = Substitution::from_pairs(&xy, &xab, &[("y", "b a"), ("x", "x")]).unwrap();
        let u = Word::parse(&xy, "y^-1 x").unwrap();
        assert_eq!(u.substitute(&xy_to_xab).unwrap().render(), "a^-1 b^-1 x");
    }

    #[test]
    fn substitute_missing_image() {
        let s = Substitution::from_pairs(&ab(), &ab(), &[("a", "b")]).unwrap();
        assert_eq!(
            w("a b").substitute(&s),
            Err(Error::MissingImage("b".into()))
        );
    }

    #[test]
    fn cyclic_reduce_examples() {
        let (c, g) = w("a b a^-1").cyclic_reduce();
        assert_eq!((c, g), (w("b"), w("a")));
        let (c, g) = w("b a b^-2 a").cyclic_reduce();
        assert_eq!((c, g), (w("b a b^-2 a"), w("")));
        let (c, g) = w("").cyclic_reduce();
        assert!(c.is_empty() && g.is_empty());
    }

    #[test]
    fn stats_examples() {
        // u = v = 1: ((ba) b^2)^2 (ba) b
        let s = w("b a b^2 b a b^2 b a b").stats();
        assert_eq!(s.exponent_sum, vec![3, 8]);
        assert!(s.is_positive);
        assert!(s.contains(GeneratorId(1)));
        let s = w("a^-1 b").stats();
        assert_eq!(s.exponent_sum, vec![-1, 1]);
        assert!(!s.is_positive);
        let s = w("").stats();
        assert_eq!(s.exponent_sum, vec![0, 0]);
        assert!(s.is_positive);
        assert!(!s.contains(GeneratorId(1)));
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = Word::parse(&ab(), "a b^-2\n c").unwrap_err();
        assert_eq!(
            err,
            Error::UnknownGenerator {
                name: "c".into(),
                line: 2,
                column: 2
            }
        );
        assert!(matches!(
            Word::parse(&ab(), "a ^ x"),
            Err(Error::Syntax { .. })
        ));
        assert!(matches!(
            Word::parse(&ab(), "a * b"),
            Err(Error::Syntax { .. })
        ));
    }

    #[test]
    fn render_parse_roundtrip_simple() {
        for s in ["", "a", "a^-3 b^2 a", "b a b^-2 a"] {
            assert_eq!(w(s).render(), s);
        }
    }
}
