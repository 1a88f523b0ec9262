//! Finitely presented groups, generator changes and Dehn fillings.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trace::{DerivationTrace, Justification};
use crate::words::{parse_letters, Alphabet, Cursor, Letter, Substitution, Word};

/// Least letter sequence among all rotations of the cyclic reduction of
/// `w` and of its inverse.
pub fn canonical_relator(w: &Word) -> Word {
    let (core, _) = w.cyclic_reduce();
    if core.is_empty() {
        return core;
    }
    let inv = core.inverse();
    let n = core.len();
    let mut best: Option<Vec<Letter>> = None;
    for base in [&core, &inv] {
        let l = base.letters();
        for k in 0..n {
            let cand: Vec<Letter> = l[k..].iter().chain(l[..k].iter()).copied().collect();
            if best.as_ref().is_none_or(|b| cand < *b) {
                best = Some(cand);
            }
        }
    }
    Word::from_letters(w.alphabet(), &best.unwrap())
}

/// True if `u` and `v` are equal as cyclic words up to inversion.
pub fn same_cyclic_class(u: &Word, v: &Word) -> bool {
    canonical_relator(u) == canonical_relator(v)
}

#[derive(Clone, PartialEq, Eq)]
pub struct Presentation {
    alphabet: Alphabet,
    relators: Vec<Word>,
}

impl Presentation {
    /// Canonicalizes every relator, drops trivial ones and exact duplicates.
    pub fn new(alphabet: &Alphabet, relators: Vec<Word>) -> Result<Self> {
        let mut out: Vec<Word> = Vec::with_capacity(relators.len());
        for r in relators {
            alphabet.ensure_same(r.alphabet())?;
            let c = canonical_relator(&r);
            if !c.is_empty() && !out.contains(&c) {
                out.push(c);
            }
        }
        Ok(Presentation {
            alphabet: alphabet.clone(),
            relators: out,
        })
    }

    pub fn from_names(names: &[&str], relators: &[&str]) -> Result<Self> {
        let alphabet = Alphabet::new(names)?;
        let rels = relators
            .iter()
            .map(|r| Word::parse(&alphabet, r))
            .collect::<Result<Vec<_>>>()?;
        Presentation::new(&alphabet, rels)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn rank(&self) -> usize {
        self.alphabet.len()
    }

    pub fn max_relator_len(&self) -> usize {
        self.relators.iter().map(|r| r.len()).max().unwrap_or(0)
    }

    /// Parses `< gens | r1, r2, ... >`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cur = Cursor::new(text, 1, 1);
        cur.skip_ws();
        expect_char(&mut cur, '<')?;
        let mut names = Vec::new();
        loop {
            cur.skip_ws();
            let (line, column) = cur.pos();
            match cur.peek() {
                Some('|') => {
                    cur.bump();
                    break;
                }
                Some(',') => {
                    cur.bump();
                }
                Some(c) if c.is_ascii_alphabetic() => {
                    names.push(cur.take_while(|c| c.is_ascii_alphanumeric() || c == '_'));
                }
                other => {
                    return Err(Error::Syntax {
                        line,
                        column,
                        message: match other {
                            Some(c) => format!("unexpected `{c}` in generator list"),
                            None => "unexpected end of input in generator list".into(),
                        },
                    })
                }
            }
        }
        let alphabet = Alphabet::new(&names)?;
        let mut relators = Vec::new();
        let mut segment = String::new();
        let mut seg_pos = cur.pos();
        let mut closed = false;
        while let Some(c) = cur.peek() {
            match c {
                ',' | '>' => {
                    let trimmed = segment.trim();
                    if trimmed.is_empty() {
                        if c == ',' || !relators.is_empty() {
                            let (line, column) = cur.pos();
                            return Err(Error::Syntax {
                                line,
                                column,
                                message: "empty relator".into(),
                            });
                        }
                    } else {
                        let raw = parse_letters(&alphabet, &segment, seg_pos.0, seg_pos.1)?;
                        relators.push(Word::from_letters(&alphabet, &raw));
                    }
                    cur.bump();
                    segment.clear();
                    seg_pos = cur.pos();
                    if c == '>' {
                        closed = true;
                        break;
                    }
                }
                _ => {
                    segment.push(c);
                    cur.bump();
                }
            }
        }
        let (line, column) = cur.pos();
        if !closed {
            return Err(Error::Syntax {
                line,
                column,
                message: "missing `>`".into(),
            });
        }
        cur.skip_ws();
        if cur.peek().is_some() {
            return Err(Error::Syntax {
                line,
                column,
                message: "trailing input after `>`".into(),
            });
        }
        Presentation::new(&alphabet, relators)
    }

    pub fn render_text(&self) -> String {
        let gens = self.alphabet.names().join(" ");
        let rels: Vec<String> = self.relators.iter().map(|r| r.render()).collect();
        if rels.is_empty() {
            format!("< {gens} | >")
        } else {
            format!("< {gens} | {} >", rels.join(", "))
        }
    }

    pub fn export(&self) -> PresentationExport {
        PresentationExport {
            generators: self.alphabet.names().to_vec(),
            relators: self.relators.iter().map(|r| r.render()).collect(),
            peripheral: None,
            slope: None,
        }
    }

    pub fn render_cas(&self, dialect: &CasDialect) -> String {
        dialect.render(&self.alphabet, &self.relators)
    }

    /// Reads either the text grammar or the structured JSON export.
    pub fn parse_any(text: &str) -> Result<(Self, Option<PeripheralSystem>, Option<Slope>)> {
        if text.trim_start().starts_with('{') {
            let ex: PresentationExport =
                serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
            ex.into_parts()
        } else {
            Ok((Presentation::parse(text)?, None, None))
        }
    }
}

fn expect_char(cur: &mut Cursor<'_>, want: char) -> Result<()> {
    let (line, column) = cur.pos();
    match cur.bump() {
        Some(c) if c == want => Ok(()),
        other => Err(Error::Syntax {
            line,
            column,
            message: format!(
                "expected `{want}`, found {}",
                other.map_or("end of input".into(), |c| format!("`{c}`"))
            ),
        }),
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_text())
    }
}

impl fmt::Debug for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Presentation{}", self.render_text())
    }
}

/// Meridian `M` and longitude `L = M^-s w M^-t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeripheralSystem {
    pub meridian: Word,
    pub longitude: Word,
    pub s: i64,
    pub w: Word,
    pub t: i64,
}

impl PeripheralSystem {
    pub fn from_decomposition(meridian: Word, s: i64, w: Word, t: i64) -> Result<Self> {
        let longitude = Word::product(
            meridian.alphabet(),
            [&meridian.pow(-s), &w, &meridian.pow(-t)],
        )?;
        PeripheralSystem::new(meridian, longitude, s, w, t)
    }

    pub fn new(meridian: Word, longitude: Word, s: i64, w: Word, t: i64) -> Result<Self> {
        if meridian.len() != 1 {
            return Err(Error::InvalidPeripheral(format!(
                "meridian `{meridian}` is not a single generator"
            )));
        }
        let assembled = Word::product(
            meridian.alphabet(),
            [&meridian.pow(-s), &w, &meridian.pow(-t)],
        )?;
        if assembled != longitude {
            return Err(Error::InvalidPeripheral(format!(
                "M^-s w M^-t = `{assembled}` differs from longitude `{longitude}`"
            )));
        }
        Ok(PeripheralSystem {
            meridian,
            longitude,
            s,
            w,
            t,
        })
    }

    pub fn export(&self) -> PeripheralExport {
        PeripheralExport {
            meridian: self.meridian.render(),
            longitude: self.longitude.render(),
            s: self.s,
            t: self.t,
            w: self.w.render(),
        }
    }
}

/// A surgery slope `p/q`, normalized so that `gcd(|p|,|q|) = 1` and `q >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Slope {
    pub p: i64,
    pub q: i64,
}

impl Slope {
    pub fn new(p: i64, q: i64) -> Result<Self> {
        if p == 0 && q == 0 {
            return Err(Error::InvalidSlope { p, q });
        }
        let d = p.gcd(&q);
        let (mut p, mut q) = (p / d, q / d);
        if q < 0 || (q == 0 && p < 0) {
            p = -p;
            q = -q;
        }
        Ok(Slope { p, q })
    }

    /// Accepts `p/q` or a bare integer `p`.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = || Error::Malformed(format!("slope `{text}` is not of the form p/q"));
        let (p, q) = match text.split_once('/') {
            Some((p, q)) => (
                p.trim().parse::<i64>().map_err(|_| bad())?,
                q.trim().parse::<i64>().map_err(|_| bad())?,
            ),
            None => (text.trim().parse::<i64>().map_err(|_| bad())?, 1),
        };
        Slope::new(p, q)
    }

    /// Exact `p/q >= n`; false when `q = 0`.
    pub fn at_least(&self, n: i64) -> bool {
        self.q != 0 && (self.p as i128) >= (n as i128) * (self.q as i128)
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilledPresentation {
    pub base: Presentation,
    pub peripheral: PeripheralSystem,
    pub slope: Slope,
    /// Base relators followed by the canonical forms of `[M, L]` and `M^p L^q`.
    /// A filling relator may be trivial (empty), in which case it is kept
    /// here and dropped by [`FilledPresentation::presentation`].
    pub relators: Vec<Word>,
}

impl FilledPresentation {
    /// True when `q != 0`, the range where the threshold theorem speaks.
    pub fn within_hypothesis(&self) -> bool {
        self.slope.q != 0
    }

    pub fn filling_relators(&self) -> &[Word] {
        &self.relators[self.relators.len() - 2..]
    }

    pub fn presentation(&self) -> Presentation {
        Presentation::new(self.base.alphabet(), self.relators.clone()).expect("same alphabet")
    }

    pub fn export(&self) -> PresentationExport {
        PresentationExport {
            generators: self.base.alphabet().names().to_vec(),
            relators: self.relators.iter().map(|r| r.render()).collect(),
            peripheral: Some(self.peripheral.export()),
            slope: Some(self.slope),
        }
    }
}

pub fn dehn_fill(
    pres: &Presentation,
    peripheral: &PeripheralSystem,
    slope: Slope,
) -> Result<FilledPresentation> {
    let al = pres.alphabet();
    al.ensure_same(peripheral.meridian.alphabet())?;
    al.ensure_same(peripheral.longitude.alphabet())?;
    let m = &peripheral.meridian;
    let l = &peripheral.longitude;
    let commutator = Word::product(al, [m, l, &m.inverse(), &l.inverse()])?;
    let filling = m.pow(slope.p).concat(&l.pow(slope.q))?;
    let mut relators = pres.relators().to_vec();
    relators.push(canonical_relator(&commutator));
    relators.push(canonical_relator(&filling));
    Ok(FilledPresentation {
        base: pres.clone(),
        peripheral: peripheral.clone(),
        slope,
        relators,
    })
}

/// A change of generators between two alphabets.
///
/// `old_in_new` expresses each old generator in the new alphabet and is what
/// relators are rewritten through; `new_in_old` is its claimed inverse. Both
/// round trips are checked by reduction. Without `new_in_old` the change is a
/// one-sided substitution, which is refused unless `allow_one_sided` is set.
#[derive(Debug, Clone)]
pub struct GeneratorChange {
    pub old_in_new: Substitution,
    pub new_in_old: Option<Substitution>,
    pub allow_one_sided: bool,
}

impl GeneratorChange {
    pub fn verified(old_in_new: Substitution, new_in_old: Substitution) -> Self {
        GeneratorChange {
            old_in_new,
            new_in_old: Some(new_in_old),
            allow_one_sided: false,
        }
    }

    pub fn one_sided(old_in_new: Substitution) -> Self {
        GeneratorChange {
            old_in_new,
            new_in_old: None,
            allow_one_sided: true,
        }
    }

    pub fn check_invertible(&self) -> Result<()> {
        let fwd = &self.old_in_new;
        if !fwd.is_total() {
            return Err(Error::NotInvertible("old_in_new is not total".into()));
        }
        let Some(back) = &self.new_in_old else {
            return if self.allow_one_sided {
                Ok(())
            } else {
                Err(Error::NotInvertible("no inverse map given".into()))
            };
        };
        if !back.is_total() || back.source != fwd.target || back.target != fwd.source {
            return Err(Error::NotInvertible("maps do not pair up".into()));
        }
        for (map, other) in [(fwd, back), (back, fwd)] {
            for g in map.source.generators() {
                let img = map.image(g).unwrap().substitute(other)?;
                if img != Word::generator(&map.source, g) {
                    return Err(Error::NotInvertible(format!(
                        "{} maps back to `{img}`",
                        map.source.name(g)
                    )));
                }
            }
        }
        Ok(())
    }

    /// Rewrites every relator. The trace holds, per relator, the literal
    /// substitution followed by its free reduction.
    pub fn apply(&self, pres: &Presentation) -> Result<(Presentation, Vec<DerivationTrace>)> {
        self.check_invertible()?;
        let fwd = &self.old_in_new;
        pres.alphabet().ensure_same(&fwd.source)?;
        let mut rels = Vec::new();
        let mut traces = Vec::new();
        for r in pres.relators() {
            let mut t = DerivationTrace::new();
            t.steps.push(crate::trace::TraceStep {
                alphabet: pres.alphabet().clone(),
                letters: r.letters().to_vec(),
                display: r.render(),
                justification: None,
            });
            let raw = fwd.apply_raw(pres.alphabet(), r.letters())?;
            let reduced = crate::words::reduce_letters(&raw);
            t.push_letters(&fwd.target, raw, Justification::Substitution(fwd.clone()));
            t.push_letters(&fwd.target, reduced.clone(), Justification::FreeReduction);
            rels.push(Word::from_letters(&fwd.target, &reduced));
            traces.push(t);
        }
        Ok((Presentation::new(&fwd.target, rels)?, traces))
    }

    pub fn reversed(&self) -> Option<GeneratorChange> {
        self.new_in_old.as_ref().map(|b| GeneratorChange {
            old_in_new: b.clone(),
            new_in_old: Some(self.old_in_new.clone()),
            allow_one_sided: false,
        })
    }
}

pub fn change_generators(
    pres: &Presentation,
    old_in_new: &Substitution,
    new_in_old: &Substitution,
) -> Result<(Presentation, Vec<DerivationTrace>)> {
    GeneratorChange::verified(old_in_new.clone(), new_in_old.clone()).apply(pres)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeripheralExport {
    pub meridian: String,
    pub longitude: String,
    pub s: i64,
    pub t: i64,
    pub w: String,
}

/// Structured export shared by every file the tool reads or writes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresentationExport {
    pub generators: Vec<String>,
    pub relators: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub peripheral: Option<PeripheralExport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slope: Option<Slope>,
}

impl PresentationExport {
    pub fn into_parts(self) -> Result<(Presentation, Option<PeripheralSystem>, Option<Slope>)> {
        let al = Alphabet::new(&self.generators)?;
        let rels = self
            .relators
            .iter()
            .map(|r| Word::parse(&al, r))
            .collect::<Result<Vec<_>>>()?;
        let pres = Presentation::new(&al, rels)?;
        let peripheral = match self.peripheral {
            Some(p) => Some(PeripheralSystem::new(
                Word::parse(&al, &p.meridian)?,
                Word::parse(&al, &p.longitude)?,
                p.s,
                Word::parse(&al, &p.w)?,
                p.t,
            )?),
            None => None,
        };
        let slope = self.slope.map(|s| Slope::new(s.p, s.q)).transpose()?;
        Ok((pres, peripheral, slope))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("export serializes");
        s.push('\n');
        s
    }
}

/// Computer-algebra output dialect.
///
/// `gap` is built in. Any other string is used as a template with the
/// placeholders `{gens}` (quoted, comma separated names), `{assign}` (one
/// `name := F.i;` per generator) and `{rels}` (comma separated relators in
/// `x*y^-1` syntax).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CasDialect {
    pub template: String,
}

pub const GAP_TEMPLATE: &str =
    "F := FreeGroup({gens});\n{assign}\nrels := [ {rels} ];\nG := F / rels;\n";

impl CasDialect {
    pub fn gap() -> Self {
        CasDialect {
            template: GAP_TEMPLATE.to_string(),
        }
    }

    pub fn from_config(config: &str) -> Self {
        match config {
            "gap" | "GAP" => CasDialect::gap(),
            other => CasDialect {
                template: other.replace("\\n", "\n"),
            },
        }
    }

    pub fn render(&self, alphabet: &Alphabet, relators: &[Word]) -> String {
        let gens = alphabet
            .names()
            .iter()
            .map(|n| format!("\"{n}\""))
            .collect::<Vec<_>>()
            .join(", ");
        let assign = alphabet
            .names()
            .iter()
            .enumerate()
            .map(|(i, n)| format!("{n} := F.{};", i + 1))
            .collect::<Vec<_>>()
            .join(" ");
        let rels = relators.iter().map(cas_word).collect::<Vec<_>>().join(", ");
        self.template
            .replace("{gens}", &gens)
            .replace("{assign}", &assign)
            .replace("{rels}", &rels)
    }
}

fn cas_word(w: &Word) -> String {
    if w.is_empty() {
        "One(F)".into()
    } else {
        w.render().replace(' ', "*")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_examples() {
        let p = Presentation::parse("< a b | b a b^-2 a >").unwrap();
        assert_eq!(p.rank(), 2);
        assert_eq!(p.relators().len(), 1);
        let p = Presentation::parse("< a | >").unwrap();
        assert!(p.relators().is_empty());
        assert!(matches!(
            Presentation::parse("< | a >"),
            Err(Error::UnknownGenerator { .. })
        ));
        assert!(matches!(
            Presentation::parse("< a | a, >"),
            Err(Error::Syntax { .. })
        ));
        assert!(matches!(
            Presentation::parse("< a | a"),
            Err(Error::Syntax { .. })
        ));
    }

    #[test]
    fn syntax_error_position() {
        let err = Presentation::parse("< a b |\n  a b^x >").unwrap_err();
        assert_eq!(
            err,
            Error::Syntax {
                line: 2,
                column: 7,
                message: "expected integer exponent".into()
            }
        );
    }

    #[test]
    fn canonical_rotation_and_inversion() {
        let p = Presentation::from_names(&["a", "b"], &["b a b^-2 a"]).unwrap();
        let q = Presentation::from_names(&["a", "b"], &["a^-1 b^2 a^-1 b^-1"]).unwrap();
        let r = Presentation::from_names(&["a", "b"], &["a b a b^-2"]).unwrap();
        assert_eq!(p.render_text(), q.render_text());
        assert_eq!(p.render_text(), r.render_text());
        assert_eq!(p.relators()[0].render(), "a b a b^-2");
    }

    #[test]
    fn text_roundtrip_of_gbs_relator() {
        // (w1 a w1^-1) b^-r (w2^-1 a w2) b^(r-k), w1 = b a, r = 1, k = 1, w2 = 1
        let p = Presentation::from_names(&["a", "b"], &["b a a a^-1 b^-1 b^-1 a"]).unwrap();
        let again = Presentation::parse(&p.render_text()).unwrap();
        assert_eq!(p, again);
    }

    #[test]
    fn slope_normalization() {
        assert_eq!(Slope::new(10, -4).unwrap(), Slope { p: -5, q: 2 });
        assert_eq!(Slope::new(-3, 0).unwrap(), Slope { p: 1, q: 0 });
        assert_eq!(Slope::new(0, -7).unwrap(), Slope { p: 0, q: 1 });
        assert!(Slope::new(0, 0).is_err());
        assert_eq!(Slope::parse("11/2").unwrap(), Slope { p: 11, q: 2 });
        assert!(!Slope::parse("11/2").unwrap().at_least(6));
        assert!(Slope::parse("12/2").unwrap().at_least(6));
        assert!(!Slope::parse("1/0").unwrap().at_least(-100));
    }

    #[test]
    fn change_generators_cube() {
        let a = Alphabet::new(&["a"]).unwrap();
        let c = Alphabet::new(&["c"]).unwrap();
        let pres = Presentation::from_names(&["a"], &["a^3"]).unwrap();
        let fwd = Substitution::from_pairs(&a, &c, &[("a", "c^-1")]).unwrap();
        let back = Substitution::from_pairs(&c, &a, &[("c", "a^-1")]).unwrap();
        let (out, traces) = change_generators(&pres, &fwd, &back).unwrap();
        assert_eq!(out.render_text(), "< c | c^3 >");
        assert!(traces.iter().all(|t| t.verify().is_ok()));
    }

    #[test]
    fn change_generators_rejects_non_inverse() {
        let a = Alphabet::new(&["a", "b"]).unwrap();
        let pres = Presentation::from_names(&["a", "b"], &["a b"]).unwrap();
        let fwd = Substitution::from_pairs(&a, &a, &[("a", "a b"), ("b", "b")]).unwrap();
        let back = Substitution::from_pairs(&a, &a, &[("a", "a b"), ("b", "b")]).unwrap();
        assert!(matches!(
            change_generators(&pres, &fwd, &back),
            Err(Error::NotInvertible(_))
        ));
        let one = GeneratorChange {
            old_in_new: fwd.clone(),
            new_in_old: None,
            allow_one_sided: false,
        };
        assert!(one.apply(&pres).is_err());
        assert!(GeneratorChange::one_sided(fwd).apply(&pres).is_ok());
    }

    #[test]
    fn identity_change_is_noop() {
        let pres = Presentation::from_names(&["x", "y"], &["x^3 y^-2"]).unwrap();
        let id = Substitution::identity(pres.alphabet());
        let (out, _) = change_generators(&pres, &id, &id).unwrap();
        assert_eq!(out, pres);
    }

    fn trefoil_peripheral(al: &Alphabet) -> PeripheralSystem {
        let a = Word::parse(al, "a").unwrap();
        PeripheralSystem::from_decomposition(a, 7, Word::parse(al, "b^3").unwrap(), -1).unwrap()
    }

    #[test]
    fn dehn_fill_appends_two_relators() {
        let pres = Presentation::from_names(&["a", "b"], &["b a b^-2 a"]).unwrap();
        let per = trefoil_peripheral(pres.alphabet());
        assert_eq!(per.longitude.render(), "a^-7 b^3 a");
        let f = dehn_fill(&pres, &per, Slope::new(5, 1).unwrap()).unwrap();
        assert_eq!(f.relators.len(), 3);
        let al = pres.alphabet();
        let m = &per.meridian;
        let l = &per.longitude;
        let comm = Word::product(al, [m, l, &m.inverse(), &l.inverse()]).unwrap();
        assert_eq!(f.relators[1], canonical_relator(&comm));
        let ml = m.pow(5).concat(l).unwrap();
        assert_eq!(f.relators[2], canonical_relator(&ml));
        assert!(f.within_hypothesis());

        let inf = dehn_fill(&pres, &per, Slope::new(1, 0).unwrap()).unwrap();
        assert_eq!(inf.relators.len(), 3);
        assert_eq!(inf.relators[2].render(), "a");
        assert!(!inf.within_hypothesis());

        let zero = dehn_fill(&pres, &per, Slope::new(0, 1).unwrap()).unwrap();
        assert_eq!(zero.relators[2], canonical_relator(l));
    }

    #[test]
    fn peripheral_rejects_inconsistent_decomposition() {
        let al = Alphabet::new(&["a", "b"]).unwrap();
        let a = Word::parse(&al, "a").unwrap();
        let bad = PeripheralSystem::new(
            a.clone(),
            Word::parse(&al, "a^-6 b^3").unwrap(),
            7,
            Word::parse(&al, "b^3").unwrap(),
            -1,
        );
        assert!(bad.is_err());
        let bad_m = PeripheralSystem::from_decomposition(Word::parse(&al, "a b").unwrap(), 0, a, 0);
        assert!(bad_m.is_err());
    }

    #[test]
    fn json_roundtrip() {
        let pres = Presentation::from_names(&["a", "b"], &["b a b^-2 a"]).unwrap();
        let per = trefoil_peripheral(pres.alphabet());
        let f = dehn_fill(&pres, &per, Slope::new(6, 1).unwrap()).unwrap();
        let json = f.export().to_json();
        let (p2, per2, s2) = Presentation::parse_any(&json).unwrap();
        assert_eq!(p2, f.presentation());
        assert_eq!(per2.unwrap(), per);
        assert_eq!(s2.unwrap(), Slope { p: 6, q: 1 });
    }

    #[test]
    fn gap_export() {
        let pres = Presentation::from_names(&["a", "b"], &["b a b^-2 a"]).unwrap();
        let out = pres.render_cas(&CasDialect::gap());
        assert_eq!(
            out,
            "F := FreeGroup(\"a\", \"b\");\na := F.1; b := F.2;\nrels := [ a*b*a*b^-2 ];\nG := F / rels;\n"
        );
        let custom = CasDialect::from_config("gens={gens};rels={rels}");
        assert_eq!(
            pres.render_cas(&custom),
            "gens=\"a\", \"b\";rels=a*b*a*b^-2"
        );
    }
}
