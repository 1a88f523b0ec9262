use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::ball::Ball;
use super::equality::{EqualityProof, EqualityStore};
use super::search::{Classes, Constraint, Source, Tree};
use super::witness::Homomorphism;
use crate::presentations::PresentationExport;
use crate::words::{render_letters, Alphabet};

pub const FORMAT: &str = "gbsknot-nonlo-certificate";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateKind {
    NonLeftOrderable,
    TrivialGroup,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateParams {
    pub radius: usize,
    pub budget: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepEntry {
    pub conjugator: String,
    pub relator: u32,
    pub rotation: u32,
    pub inverse: bool,
}

/// A member word and its proof of equality with the first member.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemberEntry {
    pub word: String,
    pub proof: Vec<StepEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassEntry {
    pub id: u32,
    pub witness: Option<usize>,
    pub members: Vec<MemberEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ConstraintEntry {
    InversePair { word: String, positive: bool },
    Product { left: String, right: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum NodeEntry {
    Branch {
        class: u32,
        positive: usize,
        negative: usize,
    },
    Implied {
        class: u32,
        positive: bool,
        constraint: ConstraintEntry,
        next: usize,
    },
    Conflict {
        violation: String,
        constraint: ConstraintEntry,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub format: String,
    pub version: u32,
    pub engine: String,
    pub kind: CertificateKind,
    pub params: CertificateParams,
    pub presentation: PresentationExport,
    pub witnesses: Vec<Homomorphism>,
    pub classes: Vec<ClassEntry>,
    /// Refutation tree in preorder, positive branch first; node 0 is the root.
    pub nodes: Vec<NodeEntry>,
}

impl Certificate {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> crate::Result<Self> {
        serde_json::from_str(text).map_err(|e| crate::Error::Malformed(format!("certificate: {e}")))
    }
}

pub fn engine_id() -> String {
    format!("gbsknot {}", env!("CARGO_PKG_VERSION"))
}

pub fn violation_label(kind_identity: bool, source: &Source) -> &'static str {
    match source {
        Source::InversePair { .. } => "inverse-pair-same-sign",
        Source::Product { .. } if kind_identity => "identity-in-cone",
        Source::Product { .. } => "product-closure",
    }
}

pub(crate) fn export_proof(alphabet: &Alphabet, p: &EqualityProof) -> Vec<StepEntry> {
    p.steps
        .iter()
        .map(|s| StepEntry {
            conjugator: render_letters(alphabet, &s.conjugator),
            relator: s.relator,
            rotation: s.rotation,
            inverse: s.inverse,
        })
        .collect()
}

pub(crate) struct Assembly<'a> {
    pub ball: &'a Ball,
    pub store: &'a EqualityStore,
    pub classes: &'a Classes,
    pub constraints: &'a [Constraint],
    pub homs: &'a [Homomorphism],
    pub witness_of: &'a [Option<usize>],
}

impl Assembly<'_> {
    fn word(&self, i: u32) -> String {
        render_letters(&self.ball.alphabet, self.ball.word(i))
    }

    fn constraint(&self, ci: u32, used: &mut BTreeSet<u32>) -> ConstraintEntry {
        match self.constraints[ci as usize].source {
            Source::InversePair { word, positive } => {
                used.insert(word);
                used.insert(self.ball.inverse(word));
                ConstraintEntry::InversePair {
                    word: self.word(word),
                    positive,
                }
            }
            Source::Product { left, right } => {
                used.insert(left);
                used.insert(right);
                used.insert(self.ball.product(left, right).expect("product in ball"));
                ConstraintEntry::Product {
                    left: self.word(left),
                    right: self.word(right),
                }
            }
        }
    }

    pub fn nodes(
        &self,
        tree: &Tree,
        used_words: &mut BTreeSet<u32>,
        used_classes: &mut BTreeSet<u32>,
    ) -> Vec<NodeEntry> {
        let mut out: Vec<Option<NodeEntry>> = Vec::new();
        let mut stack: Vec<(&Tree, usize)> = vec![(tree, 0)];
        out.push(None);
        while let Some((t, slot)) = stack.pop() {
            let entry = match t {
                Tree::Branch {
                    class,
                    positive,
                    negative,
                } => {
                    used_classes.insert(*class);
                    let p = out.len();
                    out.push(None);
                    let n = out.len();
                    out.push(None);
                    stack.push((negative, n));
                    stack.push((positive, p));
                    NodeEntry::Branch {
                        class: *class,
                        positive: p,
                        negative: n,
                    }
                }
                Tree::Implied {
                    lit,
                    constraint,
                    next,
                } => {
                    used_classes.insert(lit.class);
                    let c = self.constraint(*constraint, used_words);
                    let k = out.len();
                    out.push(None);
                    stack.push((next, k));
                    NodeEntry::Implied {
                        class: lit.class,
                        positive: lit.positive,
                        constraint: c,
                        next: k,
                    }
                }
                Tree::Conflict { constraint } => {
                    let src = self.constraints[*constraint as usize].source;
                    let identity = match src {
                        Source::Product { left, right } => {
                            self.classes.of[self.ball.product(left, right).unwrap() as usize] == 0
                        }
                        _ => false,
                    };
                    NodeEntry::Conflict {
                        violation: violation_label(identity, &src).to_string(),
                        constraint: self.constraint(*constraint, used_words),
                    }
                }
            };
            out[slot] = Some(entry);
        }
        renumber_preorder(out.into_iter().map(|e| e.expect("filled")).collect())
    }

    /// Class entries for the referenced words and classes, plus the
    /// homomorphisms they cite, reindexed.
    pub fn classes(
        &self,
        used_words: &BTreeSet<u32>,
        used_classes: &BTreeSet<u32>,
    ) -> (Vec<Homomorphism>, Vec<ClassEntry>) {
        let mut members: BTreeMap<u32, BTreeSet<u32>> = BTreeMap::new();
        for &c in used_classes {
            members
                .entry(c)
                .or_default()
                .insert(self.classes.reps[c as usize]);
        }
        for &w in used_words {
            let c = self.classes.of[w as usize];
            members
                .entry(c)
                .or_default()
                .insert(self.classes.reps[c as usize]);
            members.entry(c).or_default().insert(w);
        }
        let mut homs = Vec::new();
        let mut remap: BTreeMap<usize, usize> = BTreeMap::new();
        let mut entries = Vec::new();
        for (c, words) in members {
            let rep = self.classes.reps[c as usize];
            let witness = self.witness_of[c as usize].map(|h| {
                *remap.entry(h).or_insert_with(|| {
                    homs.push(self.homs[h].clone());
                    homs.len() - 1
                })
            });
            let mut list = vec![MemberEntry {
                word: self.word(rep),
                proof: Vec::new(),
            }];
            for w in words.into_iter().filter(|&w| w != rep) {
                let p = self.store.proof(w, rep).expect("member of class");
                list.push(MemberEntry {
                    word: self.word(w),
                    proof: export_proof(&self.ball.alphabet, &p),
                });
            }
            entries.push(ClassEntry {
                id: c,
                witness,
                members: list,
            });
        }
        (homs, entries)
    }
}

/// Renumbers nodes in preorder, positive child first.
fn renumber_preorder(nodes: Vec<NodeEntry>) -> Vec<NodeEntry> {
    let mut order = Vec::with_capacity(nodes.len());
    let mut stack = vec![0usize];
    while let Some(i) = stack.pop() {
        order.push(i);
        match &nodes[i] {
            NodeEntry::Branch {
                positive, negative, ..
            } => {
                stack.push(*negative);
                stack.push(*positive);
            }
            NodeEntry::Implied { next, .. } => stack.push(*next),
            NodeEntry::Conflict { .. } => {}
        }
    }
    let mut new_index = vec![0usize; nodes.len()];
    for (k, &i) in order.iter().enumerate() {
        new_index[i] = k;
    }
    order
        .into_iter()
        .map(|i| match nodes[i].clone() {
            NodeEntry::Branch {
                class,
                positive,
                negative,
            } => NodeEntry::Branch {
                class,
                positive: new_index[positive],
                negative: new_index[negative],
            },
            NodeEntry::Implied {
                class,
                positive,
                constraint,
                next,
            } => NodeEntry::Implied {
                class,
                positive,
                constraint,
                next: new_index[next],
            },
            c => c,
        })
        .collect()
}
