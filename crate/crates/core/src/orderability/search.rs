//! Sign search over ball classes.
//!
//! A constraint is a set of literals that cannot all hold in a positive
//! cone: `{u+, v+, (uv)-}`, `{u+, v+}` when `uv = 1`, and `{c+, (c^-1)+}`,
//! `{c-, (c^-1)-}`. Literal `c+` reads "the class representative lies in
//! the cone", `c-` "its inverse does". A constraint forces the opposite of
//! its last open literal. Branching on a class needs a proof that the
//! class is not the identity. Without one, the real order could leave the
//! class unsigned.

use std::collections::{HashMap, VecDeque};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};

use super::ball::Ball;
use super::equality::EqualityStore;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit {
    pub class: u32,
    pub positive: bool,
}

impl Lit {
    fn neg(self) -> Lit {
        Lit {
            positive: !self.positive,
            ..self
        }
    }

    fn code(self) -> usize {
        self.class as usize * 2 + usize::from(!self.positive)
    }
}

/// Where a constraint comes from, in ball indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    InversePair { word: u32, positive: bool },
    Product { left: u32, right: u32 },
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub source: Source,
    pub lits: Vec<Lit>,
}

/// Ball indices grouped into classes, numbered by least member. Class 0
/// holds the identity.
#[derive(Debug, Clone)]
pub struct Classes {
    pub of: Vec<u32>,
    pub reps: Vec<u32>,
}

impl Classes {
    pub fn from_store(store: &EqualityStore, n: usize) -> Self {
        let mut by_root: HashMap<u32, u32> = HashMap::new();
        let mut of = Vec::with_capacity(n);
        let mut reps = Vec::new();
        for i in 0..n as u32 {
            let root = store.find(i);
            let id = *by_root.entry(root).or_insert_with(|| {
                reps.push(i);
                reps.len() as u32 - 1
            });
            of.push(id);
        }
        Classes { of, reps }
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }
}

pub fn build_constraints(ball: &Ball, classes: &Classes) -> Vec<Constraint> {
    let mut out = Vec::new();
    let mut seen = std::collections::HashSet::new();
    let mut add = |source: Source, mut lits: Vec<Lit>| {
        lits.sort();
        lits.dedup();
        if lits.windows(2).any(|w| w[0].class == w[1].class) {
            return;
        }
        if seen.insert(lits.clone()) {
            out.push(Constraint { source, lits });
        }
    };
    let c = |i: u32| classes.of[i as usize];
    for w in 1..ball.len() as u32 {
        if c(w) == 0 {
            continue;
        }
        let wi = ball.inverse(w);
        for positive in [true, false] {
            add(
                Source::InversePair { word: w, positive },
                vec![
                    Lit {
                        class: c(w),
                        positive,
                    },
                    Lit {
                        class: c(wi),
                        positive,
                    },
                ],
            );
        }
    }
    for l in 1..ball.len() as u32 {
        if c(l) == 0 {
            continue;
        }
        for r in 1..ball.len() as u32 {
            if c(r) == 0 {
                continue;
            }
            let Some(p) = ball.product(l, r) else {
                continue;
            };
            let mut lits = vec![
                Lit {
                    class: c(l),
                    positive: true,
                },
                Lit {
                    class: c(r),
                    positive: true,
                },
            ];
            if c(p) != 0 {
                lits.push(Lit {
                    class: c(p),
                    positive: false,
                });
            }
            add(Source::Product { left: l, right: r }, lits);
        }
    }
    out
}

#[derive(Debug)]
pub enum Tree {
    Branch {
        class: u32,
        positive: Box<Tree>,
        negative: Box<Tree>,
    },
    Implied {
        lit: Lit,
        constraint: u32,
        next: Box<Tree>,
    },
    Conflict {
        constraint: u32,
    },
}

pub enum Outcome {
    Refuted(Tree),
    Satisfiable,
    NodeCap,
}

pub struct Solver<'a> {
    constraints: &'a [Constraint],
    occ: Vec<Vec<u32>>,
    witnessed: Vec<bool>,
    order: Vec<u32>,
    max_nodes: usize,
    split_depth: usize,
    pub nodes: AtomicUsize,
    stop: AtomicBool,
}

impl<'a> Solver<'a> {
    pub fn new(
        constraints: &'a [Constraint],
        witnessed: Vec<bool>,
        max_nodes: usize,
        parallel: bool,
    ) -> Self {
        let classes = witnessed.len();
        let mut occ = vec![Vec::new(); classes * 2];
        let mut weight = vec![0usize; classes];
        for (i, c) in constraints.iter().enumerate() {
            for l in &c.lits {
                occ[l.code()].push(i as u32);
                weight[l.class as usize] += 1;
            }
        }
        let mut order: Vec<u32> = (1..classes as u32)
            .filter(|&c| witnessed[c as usize])
            .collect();
        order.sort_by_key(|&c| (std::cmp::Reverse(weight[c as usize]), c));
        Solver {
            constraints,
            occ,
            witnessed,
            order,
            max_nodes,
            split_depth: if parallel { 4 } else { 0 },
            nodes: AtomicUsize::new(0),
            stop: AtomicBool::new(false),
        }
    }

    pub fn branch_order(&self) -> &[u32] {
        &self.order
    }

    pub fn run(&self) -> Outcome {
        let classes = self.witnessed.len();
        let mut assign = vec![None; classes];
        let mut implied = Vec::new();
        for (i, c) in self.constraints.iter().enumerate() {
            if c.lits.len() == 1 && self.witnessed[c.lits[0].class as usize] {
                let x = c.lits[0].neg();
                match assign[x.class as usize] {
                    None => {
                        assign[x.class as usize] = Some(x.positive);
                        implied.push((x, i as u32));
                    }
                    Some(s) if s == x.positive => {}
                    Some(_) => {
                        let tree = Tree::Conflict {
                            constraint: i as u32,
                        };
                        return Outcome::Refuted(wrap(implied, tree));
                    }
                }
            }
        }
        let queue: Vec<Lit> = implied.iter().map(|(l, _)| *l).collect();
        match self.solve(assign, queue, 0) {
            Outcome::Refuted(t) => Outcome::Refuted(wrap(implied, t)),
            other => other,
        }
    }

    fn value(assign: &[Option<bool>], l: Lit) -> Option<bool> {
        assign[l.class as usize].map(|s| s == l.positive)
    }

    fn solve(&self, mut assign: Vec<Option<bool>>, start: Vec<Lit>, depth: usize) -> Outcome {
        if self.stop.load(Ordering::Relaxed) {
            return Outcome::NodeCap;
        }
        let mut queue: VecDeque<Lit> = start.into();
        let mut implied: Vec<(Lit, u32)> = Vec::new();
        let mut conflict = None;
        'prop: while let Some(l) = queue.pop_front() {
            for &ci in &self.occ[l.code()] {
                let c = &self.constraints[ci as usize];
                let mut open = None;
                let mut n_open = 0;
                let mut blocked = false;
                for &x in &c.lits {
                    match Self::value(&assign, x) {
                        Some(true) => {}
                        Some(false) => {
                            blocked = true;
                            break;
                        }
                        None => {
                            n_open += 1;
                            open = Some(x);
                        }
                    }
                }
                if blocked {
                    continue;
                }
                match (n_open, open) {
                    (0, _) => {
                        conflict = Some(ci);
                        break 'prop;
                    }
                    (1, Some(x)) => {
                        let y = x.neg();
                        assign[y.class as usize] = Some(y.positive);
                        implied.push((y, ci));
                        queue.push_back(y);
                    }
                    _ => {}
                }
            }
        }
        let used = self.nodes.fetch_add(implied.len() + 1, Ordering::Relaxed) + implied.len() + 1;
        if used > self.max_nodes {
            self.stop.store(true, Ordering::Relaxed);
            return Outcome::NodeCap;
        }
        let leaf = match conflict {
            Some(constraint) => Tree::Conflict { constraint },
            None => {
                let Some(&class) = self.order.iter().find(|&&c| assign[c as usize].is_none())
                else {
                    self.stop.store(true, Ordering::Relaxed);
                    return Outcome::Satisfiable;
                };
                let mut pos = assign.clone();
                pos[class as usize] = Some(true);
                let mut neg = assign;
                neg[class as usize] = Some(false);
                let lp = Lit {
                    class,
                    positive: true,
                };
                let ln = Lit {
                    class,
                    positive: false,
                };
                let (a, b) = if depth < self.split_depth {
                    rayon::join(
                        || self.solve(pos, vec![lp], depth + 1),
                        || self.solve(neg, vec![ln], depth + 1),
                    )
                } else {
                    let a = self.solve(pos, vec![lp], depth + 1);
                    if !matches!(a, Outcome::Refuted(_)) {
                        return a;
                    }
                    (a, self.solve(neg, vec![ln], depth + 1))
                };
                match (a, b) {
                    (Outcome::Refuted(p), Outcome::Refuted(n)) => Tree::Branch {
                        class,
                        positive: Box::new(p),
                        negative: Box::new(n),
                    },
                    (Outcome::Satisfiable, _) | (_, Outcome::Satisfiable) => {
                        return Outcome::Satisfiable
                    }
                    _ => return Outcome::NodeCap,
                }
            }
        };
        Outcome::Refuted(wrap(implied, leaf))
    }
}

fn wrap(implied: Vec<(Lit, u32)>, leaf: Tree) -> Tree {
    implied
        .into_iter()
        .rev()
        .fold(leaf, |next, (lit, constraint)| Tree::Implied {
            lit,
            constraint,
            next: Box::new(next),
        })
}
