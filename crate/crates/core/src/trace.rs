//! Replayable derivation traces.
//!
//! Each step stores the raw (possibly unreduced) letter sequence of one
//! displayed line together with a factored rendering, and names the move
//! that produced it from the previous line. [`DerivationTrace::verify`]
//! re-checks every move.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::words::{
    invert_letters, reduce_letters, render_letters, Alphabet, GeneratorId, Letter, Substitution,
};

/// A factored word expression, used to build and render displayed lines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Gen { name: String, exp: i64 },
    Seq(Vec<Expr>),
    Pow(Box<Expr>, i64),
}

pub fn g(name: &str, exp: i64) -> Expr {
    Expr::Gen {
        name: name.to_string(),
        exp,
    }
}

pub fn seq<I: IntoIterator<Item = Expr>>(items: I) -> Expr {
    Expr::Seq(items.into_iter().collect())
}

pub fn pow(e: Expr, n: i64) -> Expr {
    Expr::Pow(Box::new(e), n)
}

/// `n` literal copies of `e`, written out.
pub fn repeat(e: Expr, n: i64) -> Expr {
    Expr::Seq((0..n.max(0)).map(|_| e.clone()).collect())
}

impl Expr {
    pub fn expand(&self, alphabet: &Alphabet) -> Result<Vec<Letter>> {
        let mut out = Vec::new();
        self.expand_into(alphabet, &mut out)?;
        Ok(out)
    }

    fn expand_into(&self, alphabet: &Alphabet, out: &mut Vec<Letter>) -> Result<()> {
        match self {
            Expr::Gen { name, exp } => {
                let gen = alphabet
                    .lookup(name)
                    .ok_or_else(|| Error::MissingImage(name.clone()))?;
                let l = Letter {
                    gen,
                    inverse: *exp < 0,
                };
                out.extend(std::iter::repeat_n(l, exp.unsigned_abs() as usize));
            }
            Expr::Seq(items) => {
                for it in items {
                    it.expand_into(alphabet, out)?;
                }
            }
            Expr::Pow(inner, n) => {
                let body = inner.expand(alphabet)?;
                let body = if *n < 0 { invert_letters(&body) } else { body };
                for _ in 0..n.unsigned_abs() {
                    out.extend_from_slice(&body);
                }
            }
        }
        Ok(())
    }

    pub fn render(&self) -> String {
        match self {
            Expr::Gen { name, exp } => match exp {
                0 => String::new(),
                1 => name.clone(),
                e => format!("{name}^{e}"),
            },
            Expr::Seq(items) => items
                .iter()
                .map(|e| e.render())
                .filter(|s| !s.is_empty())
                .collect::<Vec<_>>()
                .join(" "),
            Expr::Pow(inner, n) => {
                let body = inner.render();
                match n {
                    1 => format!("({body})"),
                    n => format!("({body})^{n}"),
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
pub enum Justification {
    /// Letter-wise application of a homomorphism, no reduction.
    Substitution(Substitution),
    /// Cancellation of adjacent inverse pairs.
    FreeReduction,
    /// Same letter sequence, regrouped or with powers written out.
    PowerExpansion,
    /// Left rotation by `offset` letters.
    CyclicPermutation {
        offset: usize,
    },
    Inversion,
    /// Left multiplication by a power of the meridian generator. Not a
    /// free-group identity: used only for the longitude framing constant.
    MeridianShift {
        generator: GeneratorId,
        exponent: i64,
    },
}

impl Justification {
    pub fn label(&self) -> &'static str {
        match self {
            Justification::Substitution(_) => "substitution",
            Justification::FreeReduction => "free-reduction",
            Justification::PowerExpansion => "power-expansion",
            Justification::CyclicPermutation { .. } => "cyclic-permutation",
            Justification::Inversion => "inversion",
            Justification::MeridianShift { .. } => "meridian-shift",
        }
    }
}

#[derive(Debug, Clone)]
pub struct TraceStep {
    pub alphabet: Alphabet,
    pub letters: Vec<Letter>,
    pub display: String,
    pub justification: Option<Justification>,
}

impl TraceStep {
    pub fn reduced(&self) -> Vec<Letter> {
        reduce_letters(&self.letters)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceFailure {
    pub step: usize,
    pub justification: &'static str,
    pub expected: String,
    pub found: String,
}

impl fmt::Display for TraceFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "step {} ({}) does not follow: expected `{}`, found `{}`",
            self.step, self.justification, self.expected, self.found
        )
    }
}

#[derive(Debug, Clone, Default)]
pub struct DerivationTrace {
    pub steps: Vec<TraceStep>,
}

impl DerivationTrace {
    pub fn new() -> Self {
        DerivationTrace::default()
    }

    pub fn start(alphabet: &Alphabet, expr: &Expr) -> Result<Self> {
        let mut t = DerivationTrace::new();
        t.steps.push(TraceStep {
            alphabet: alphabet.clone(),
            letters: expr.expand(alphabet)?,
            display: expr.render(),
            justification: None,
        });
        Ok(t)
    }

    pub fn push(&mut self, alphabet: &Alphabet, expr: &Expr, why: Justification) -> Result<()> {
        self.steps.push(TraceStep {
            alphabet: alphabet.clone(),
            letters: expr.expand(alphabet)?,
            display: expr.render(),
            justification: Some(why),
        });
        Ok(())
    }

    pub fn push_letters(&mut self, alphabet: &Alphabet, letters: Vec<Letter>, why: Justification) {
        self.steps.push(TraceStep {
            alphabet: alphabet.clone(),
            display: render_letters(alphabet, &letters),
            letters,
            justification: Some(why),
        });
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn last(&self) -> Option<&TraceStep> {
        self.steps.last()
    }

    /// Re-checks every step against its justification.
    pub fn verify(&self) -> std::result::Result<(), TraceFailure> {
        for i in 1..self.steps.len() {
            verify_step(&self.steps[i - 1], &self.steps[i], i)?;
        }
        Ok(())
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, s) in self.steps.iter().enumerate() {
            let why = s
                .justification
                .as_ref()
                .map(|j| j.label())
                .unwrap_or("start");
            out.push_str(&format!("{i:>3}  [{why}]  {}\n", s.display));
        }
        out
    }

    pub fn export(&self) -> Vec<TraceStepExport> {
        self.steps
            .iter()
            .map(|s| TraceStepExport {
                justification: s
                    .justification
                    .as_ref()
                    .map(|j| j.label())
                    .unwrap_or("start")
                    .to_string(),
                display: s.display.clone(),
                reduced: render_letters(&s.alphabet, &s.reduced()),
            })
            .collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceStepExport {
    pub justification: String,
    pub display: String,
    pub reduced: String,
}

fn verify_step(
    prev: &TraceStep,
    next: &TraceStep,
    index: usize,
) -> std::result::Result<(), TraceFailure> {
    let why = next
        .justification
        .as_ref()
        .expect("non-initial step has a justification");
    let fail = |expected: &[Letter], alphabet: &Alphabet| TraceFailure {
        step: index,
        justification: why.label(),
        expected: render_letters(alphabet, expected),
        found: render_letters(&next.alphabet, &next.letters),
    };
    let same_alphabet = prev.alphabet == next.alphabet;
    match why {
        Justification::Substitution(map) => {
            let expected =
                map.apply_raw(&prev.alphabet, &prev.letters)
                    .map_err(|e| TraceFailure {
                        step: index,
                        justification: why.label(),
                        expected: e.to_string(),
                        found: next.display.clone(),
                    })?;
            if map.target != next.alphabet || expected != next.letters {
                return Err(fail(&expected, &map.target));
            }
        }
        Justification::FreeReduction => {
            let expected = prev.reduced();
            if !same_alphabet
                || expected != next.reduced()
                || next.letters.len() > prev.letters.len()
            {
                return Err(fail(&expected, &prev.alphabet));
            }
        }
        Justification::PowerExpansion => {
            if !same_alphabet || prev.letters != next.letters {
                return Err(fail(&prev.letters, &prev.alphabet));
            }
        }
        Justification::CyclicPermutation { offset } => {
            let n = prev.letters.len();
            let mut expected = Vec::with_capacity(n);
            if n > 0 {
                let k = offset % n;
                expected.extend_from_slice(&prev.letters[k..]);
                expected.extend_from_slice(&prev.letters[..k]);
            }
            if !same_alphabet || expected != next.letters {
                return Err(fail(&expected, &prev.alphabet));
            }
        }
        Justification::Inversion => {
            let expected = invert_letters(&prev.letters);
            if !same_alphabet || expected != next.letters {
                return Err(fail(&expected, &prev.alphabet));
            }
        }
        Justification::MeridianShift {
            generator,
            exponent,
        } => {
            let l = Letter {
                gen: *generator,
                inverse: *exponent < 0,
            };
            let mut raw: Vec<Letter> =
                std::iter::repeat_n(l, exponent.unsigned_abs() as usize).collect();
            raw.extend_from_slice(&prev.letters);
            let expected = reduce_letters(&raw);
            if !same_alphabet || expected != next.reduced() {
                return Err(fail(&expected, &prev.alphabet));
            }
        }
    }
    Ok(())
}
