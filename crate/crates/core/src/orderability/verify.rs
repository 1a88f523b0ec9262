//! Independent certificate checker. Uses only word parsing and free
//! reduction; relator insertion, homomorphism evaluation and the tree walk
//! are re-implemented here.

use std::collections::HashMap;
use std::fmt;

use super::certificate::{
    Certificate, CertificateKind, ConstraintEntry, NodeEntry, StepEntry, FORMAT,
};
use super::witness::Homomorphism;
use crate::presentations::Presentation;
use crate::words::{invert_letters, reduce_letters, Letter, Word};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyError {
    pub node: Option<usize>,
    pub message: String,
}

impl fmt::Display for VerifyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node {
            Some(n) => write!(f, "node {n}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for VerifyError {}

type VResult<T> = std::result::Result<T, VerifyError>;

fn err<T>(node: Option<usize>, message: impl Into<String>) -> VResult<T> {
    Err(VerifyError {
        node,
        message: message.into(),
    })
}

pub fn verify_certificate(cert: &Certificate, pres: &Presentation) -> bool {
    check_certificate(cert, pres).is_ok()
}

struct Checker<'a> {
    pres: &'a Presentation,
    relators: Vec<Vec<Letter>>,
    class_of: HashMap<Vec<Letter>, u32>,
    identity: Option<u32>,
    witnessed: HashMap<u32, bool>,
}

pub fn check_certificate(cert: &Certificate, pres: &Presentation) -> VResult<()> {
    if cert.format != FORMAT {
        return err(None, format!("unknown format `{}`", cert.format));
    }
    let mut ck = Checker {
        pres,
        relators: pres
            .relators()
            .iter()
            .map(|r| r.letters().to_vec())
            .collect(),
        class_of: HashMap::new(),
        identity: None,
        witnessed: HashMap::new(),
    };
    for h in &cert.witnesses {
        if !well_formed(h, pres.rank()) {
            return err(None, "a witness homomorphism is malformed");
        }
        if !ck
            .relators
            .iter()
            .all(|r| maps_trivially(h, r, pres.rank()))
        {
            return err(None, "a witness homomorphism does not kill the relators");
        }
    }
    for class in &cert.classes {
        if ck.witnessed.insert(class.id, false).is_some() {
            return err(None, format!("class {} listed twice", class.id));
        }
        let Some(first) = class.members.first() else {
            return err(None, format!("class {} has no members", class.id));
        };
        if !first.proof.is_empty() {
            return err(
                None,
                format!("class {}: representative carries a proof", class.id),
            );
        }
        let rep = ck.parse(&first.word)?;
        if rep.is_empty() {
            if ck.identity.is_some() {
                return err(None, "two identity classes");
            }
            ck.identity = Some(class.id);
        }
        for m in &class.members {
            let w = ck.parse(&m.word)?;
            let end = ck.replay(&m.proof, &w)?;
            if end != rep {
                return err(
                    None,
                    format!(
                        "class {}: proof for `{}` does not reach the representative",
                        class.id, m.word
                    ),
                );
            }
            if ck.class_of.insert(w, class.id).is_some() {
                return err(None, format!("word `{}` listed twice", m.word));
            }
        }
        if let Some(h) = class.witness {
            let Some(hom) = cert.witnesses.get(h) else {
                return err(None, format!("class {}: witness {h} missing", class.id));
            };
            if maps_trivially(hom, &rep, pres.rank()) {
                return err(
                    None,
                    format!(
                        "class {}: witness maps the representative trivially",
                        class.id
                    ),
                );
            }
            ck.witnessed.insert(class.id, true);
        }
    }
    match cert.kind {
        CertificateKind::TrivialGroup => {
            let Some(id) = ck.identity else {
                return err(None, "no identity class");
            };
            for g in pres.alphabet().generators() {
                let w = vec![Letter {
                    gen: g,
                    inverse: false,
                }];
                if ck.class_of.get(&w) != Some(&id) {
                    return err(
                        None,
                        format!("generator {} is not shown trivial", pres.alphabet().name(g)),
                    );
                }
            }
            if !cert.nodes.is_empty() {
                return err(None, "trivial-group certificate carries a tree");
            }
            Ok(())
        }
        CertificateKind::NonLeftOrderable => ck.walk(&cert.nodes),
    }
}

impl Checker<'_> {
    fn parse(&self, text: &str) -> VResult<Vec<Letter>> {
        match Word::parse(self.pres.alphabet(), text) {
            Ok(w) => Ok(w.letters().to_vec()),
            Err(e) => err(None, format!("bad word `{text}`: {e}")),
        }
    }

    fn replay(&self, proof: &[StepEntry], start: &[Letter]) -> VResult<Vec<Letter>> {
        let mut w = start.to_vec();
        for s in proof {
            let Some(r) = self.relators.get(s.relator as usize) else {
                return err(None, format!("relator {} does not exist", s.relator));
            };
            if s.rotation as usize >= r.len() {
                return err(None, format!("rotation {} out of range", s.rotation));
            }
            let mut piece = r[s.rotation as usize..].to_vec();
            piece.extend_from_slice(&r[..s.rotation as usize]);
            if s.inverse {
                piece = invert_letters(&piece);
            }
            let g = self.parse(&s.conjugator)?;
            let mut raw = g.clone();
            raw.extend(piece);
            raw.extend(invert_letters(&g));
            raw.extend(w);
            w = reduce_letters(&raw);
        }
        Ok(w)
    }

    fn class(&self, node: usize, text: &str) -> VResult<u32> {
        let w = self.parse(text).map_err(|e| VerifyError {
            node: Some(node),
            ..e
        })?;
        match self.class_of.get(&w) {
            Some(&c) => Ok(c),
            None => err(
                Some(node),
                format!("word `{text}` is not listed in any class"),
            ),
        }
    }

    /// Forbidden literal set and the violation it represents.
    fn forbidden(
        &self,
        node: usize,
        c: &ConstraintEntry,
    ) -> VResult<(Vec<(u32, bool)>, &'static str)> {
        let id = self.identity;
        match c {
            ConstraintEntry::InversePair { word, positive } => {
                let w = self.parse(word)?;
                let winv = invert_letters(&w);
                let cw = self.class(node, word)?;
                let ci = match self.class_of.get(&winv) {
                    Some(&c) => c,
                    None => return err(Some(node), format!("inverse of `{word}` is not listed")),
                };
                if Some(cw) == id {
                    return err(Some(node), "inverse-pair constraint on the identity");
                }
                Ok((
                    vec![(cw, *positive), (ci, *positive)],
                    "inverse-pair-same-sign",
                ))
            }
            ConstraintEntry::Product { left, right } => {
                let (l, r) = (self.parse(left)?, self.parse(right)?);
                let cl = self.class(node, left)?;
                let cr = self.class(node, right)?;
                let mut raw = l;
                raw.extend(r);
                let p = reduce_letters(&raw);
                let Some(&cp) = self.class_of.get(&p) else {
                    return err(
                        Some(node),
                        format!("product of `{left}` and `{right}` is not listed"),
                    );
                };
                if Some(cl) == id || Some(cr) == id {
                    return err(Some(node), "product constraint with an identity factor");
                }
                if Some(cp) == id {
                    Ok((vec![(cl, true), (cr, true)], "identity-in-cone"))
                } else {
                    Ok((vec![(cl, true), (cr, true), (cp, false)], "product-closure"))
                }
            }
        }
    }

    fn walk(&self, nodes: &[NodeEntry]) -> VResult<()> {
        if nodes.is_empty() {
            return err(None, "empty refutation tree");
        }
        let mut visited = vec![false; nodes.len()];
        let mut stack: Vec<(usize, HashMap<u32, bool>)> = vec![(0, HashMap::new())];
        while let Some((i, path)) = stack.pop() {
            if i >= nodes.len() {
                return err(Some(i), "dangling node reference");
            }
            if std::mem::replace(&mut visited[i], true) {
                return err(Some(i), "node reached twice");
            }
            let is_open = |class: u32| -> VResult<()> {
                if Some(class) == self.identity {
                    return err(Some(i), "sign assigned to the identity class");
                }
                if !self.witnessed.contains_key(&class) {
                    return err(Some(i), format!("class {class} is not listed"));
                }
                if path.contains_key(&class) {
                    return err(
                        Some(i),
                        format!("class {class} already signed on this path"),
                    );
                }
                Ok(())
            };
            match &nodes[i] {
                NodeEntry::Branch {
                    class,
                    positive,
                    negative,
                } => {
                    is_open(*class)?;
                    if !self.witnessed[class] {
                        return err(
                            Some(i),
                            format!("branch on class {class} without a nontriviality witness"),
                        );
                    }
                    let mut p = path.clone();
                    p.insert(*class, true);
                    let mut n = path;
                    n.insert(*class, false);
                    stack.push((*negative, n));
                    stack.push((*positive, p));
                }
                NodeEntry::Implied {
                    class,
                    positive,
                    constraint,
                    next,
                } => {
                    is_open(*class)?;
                    let (mut lits, _) = self.forbidden(i, constraint)?;
                    lits.sort();
                    lits.dedup();
                    let target = (*class, !*positive);
                    let Some(k) = lits.iter().position(|&l| l == target) else {
                        return err(Some(i), "implied sign is not forced by the constraint");
                    };
                    lits.remove(k);
                    if lits.iter().any(|(c, s)| path.get(c) != Some(s)) {
                        return err(Some(i), "constraint is not unit on this path");
                    }
                    if lits.is_empty() && !self.witnessed[class] {
                        return err(
                            Some(i),
                            format!("class {class} forced without a nontriviality witness"),
                        );
                    }
                    let mut p = path;
                    p.insert(*class, *positive);
                    stack.push((*next, p));
                }
                NodeEntry::Conflict {
                    violation,
                    constraint,
                } => {
                    let (lits, kind) = self.forbidden(i, constraint)?;
                    if violation != kind {
                        return err(
                            Some(i),
                            format!("violation labelled `{violation}` but is `{kind}`"),
                        );
                    }
                    if lits.iter().any(|(c, s)| path.get(c) != Some(s)) {
                        return err(Some(i), "constraint is not violated on this path");
                    }
                }
            }
        }
        if let Some(k) = visited.iter().position(|v| !v) {
            return err(Some(k), "unreachable node");
        }
        Ok(())
    }
}

fn well_formed(h: &Homomorphism, rank: usize) -> bool {
    match h {
        Homomorphism::Cyclic { images, .. } => images.len() == rank,
        Homomorphism::Permutation { degree, images } => {
            *degree <= 64
                && images.len() == rank
                && images.iter().all(|p| {
                    let mut seen = vec![false; *degree];
                    p.len() == *degree
                        && p.iter().all(|&x| {
                            (x as usize) < *degree
                                && !std::mem::replace(&mut seen[x as usize], true)
                        })
                })
        }
    }
}

fn maps_trivially(h: &Homomorphism, w: &[Letter], rank: usize) -> bool {
    if !well_formed(h, rank) {
        // a malformed map cannot witness anything
        return true;
    }
    match h {
        Homomorphism::Cyclic { modulus, images } => {
            let mut s: i128 = 0;
            for l in w {
                let e = images[l.gen.index()] as i128;
                s += if l.inverse { -e } else { e };
            }
            if *modulus == 0 {
                s == 0
            } else {
                s % *modulus as i128 == 0
            }
        }
        Homomorphism::Permutation { degree, images } => (0..*degree).all(|start| {
            let mut x = start;
            for l in w {
                let p = &images[l.gen.index()];
                x = if l.inverse {
                    p.iter().position(|&y| y as usize == x).unwrap()
                } else {
                    p[x] as usize
                };
            }
            x == start
        }),
    }
}
