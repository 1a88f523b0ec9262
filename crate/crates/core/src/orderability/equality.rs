use std::collections::{HashMap, VecDeque};

use super::ball::Ball;
use crate::words::{invert_letters, reduce_letters, Letter};

/// Left multiplication by the conjugate `g R' g^-1`, where `R'` is the
/// relator rotated left by `rotation` and then inverted if `inverse`. When
/// `g` is a prefix of the current word this is insertion of `R'` at
/// position `|g|`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProofStep {
    pub conjugator: Vec<Letter>,
    pub relator: u32,
    pub rotation: u32,
    pub inverse: bool,
}

pub fn relator_piece(
    relators: &[Vec<Letter>],
    relator: u32,
    rotation: u32,
    inverse: bool,
) -> Vec<Letter> {
    let r = &relators[relator as usize];
    let k = rotation as usize % r.len().max(1);
    let mut out = r[k..].to_vec();
    out.extend_from_slice(&r[..k]);
    if inverse {
        invert_letters(&out)
    } else {
        out
    }
}

impl ProofStep {
    pub fn apply(&self, relators: &[Vec<Letter>], w: &[Letter]) -> Vec<Letter> {
        let mut raw = self.conjugator.clone();
        raw.extend(relator_piece(
            relators,
            self.relator,
            self.rotation,
            self.inverse,
        ));
        raw.extend(invert_letters(&self.conjugator));
        raw.extend_from_slice(w);
        reduce_letters(&raw)
    }

    fn inverted(&self) -> ProofStep {
        ProofStep {
            inverse: !self.inverse,
            ..self.clone()
        }
    }
}

/// A derivation `u -> v`: replaying the steps from `u` ends at `v`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EqualityProof {
    pub steps: Vec<ProofStep>,
}

impl EqualityProof {
    pub fn replay(&self, relators: &[Vec<Letter>], u: &[Letter]) -> Vec<Letter> {
        self.steps
            .iter()
            .fold(u.to_vec(), |w, s| s.apply(relators, &w))
    }

    pub fn then(mut self, other: EqualityProof) -> EqualityProof {
        for s in other.steps {
            if self.steps.last().is_some_and(|l| *l == s.inverted()) {
                self.steps.pop();
            } else {
                self.steps.push(s);
            }
        }
        self
    }

    pub fn reversed(&self) -> EqualityProof {
        EqualityProof {
            steps: self.steps.iter().rev().map(ProofStep::inverted).collect(),
        }
    }

    /// Proof of `x u -> x v` from a proof of `u -> v`.
    pub fn left_mul(&self, x: Letter) -> EqualityProof {
        EqualityProof {
            steps: self
                .steps
                .iter()
                .map(|s| {
                    let mut g = vec![x];
                    g.extend_from_slice(&s.conjugator);
                    ProofStep {
                        conjugator: reduce_letters(&g),
                        ..s.clone()
                    }
                })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// Union-find over ball indices. Every successful union records its proof
/// as an edge of a spanning forest, from which proofs between any two
/// members of a class are assembled.
#[derive(Debug, Clone)]
pub struct EqualityStore {
    parent: Vec<u32>,
    size: Vec<u32>,
    edges: Vec<Vec<(u32, usize, bool)>>,
    proofs: Vec<EqualityProof>,
    pub truncated: bool,
    pub explored: usize,
}

impl EqualityStore {
    pub fn new(n: usize) -> Self {
        EqualityStore {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
            edges: vec![Vec::new(); n],
            proofs: Vec::new(),
            truncated: false,
            explored: 0,
        }
    }

    pub fn find(&self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            x = self.parent[x as usize];
        }
        x
    }

    pub fn same(&self, x: u32, y: u32) -> bool {
        self.find(x) == self.find(y)
    }

    pub fn merges(&self) -> usize {
        self.proofs.len()
    }

    /// Records `x ~ y` with a proof `x -> y`. Returns false if already equal.
    pub fn union(&mut self, x: u32, y: u32, proof: EqualityProof) -> bool {
        let (rx, ry) = (self.find(x), self.find(y));
        if rx == ry {
            return false;
        }
        let (big, small) = if self.size[rx as usize] >= self.size[ry as usize] {
            (rx, ry)
        } else {
            (ry, rx)
        };
        self.parent[small as usize] = big;
        self.size[big as usize] += self.size[small as usize];
        let id = self.proofs.len();
        self.proofs.push(proof);
        self.edges[x as usize].push((y, id, false));
        self.edges[y as usize].push((x, id, true));
        true
    }

    /// Proof `x -> y` when both lie in one class.
    pub fn proof(&self, x: u32, y: u32) -> Option<EqualityProof> {
        if !self.same(x, y) {
            return None;
        }
        if x == y {
            return Some(EqualityProof::default());
        }
        let mut prev: HashMap<u32, (u32, usize, bool)> = HashMap::new();
        let mut queue = VecDeque::from([x]);
        prev.insert(x, (x, usize::MAX, false));
        while let Some(n) = queue.pop_front() {
            if n == y {
                break;
            }
            for &(m, id, rev) in &self.edges[n as usize] {
                if let std::collections::hash_map::Entry::Vacant(e) = prev.entry(m) {
                    e.insert((n, id, rev));
                    queue.push_back(m);
                }
            }
        }
        let mut chain = Vec::new();
        let mut n = y;
        while n != x {
            let (p, id, rev) = prev[&n];
            chain.push((id, rev));
            n = p;
        }
        let mut out = EqualityProof::default();
        for (id, rev) in chain.into_iter().rev() {
            let p = if rev {
                self.proofs[id].reversed()
            } else {
                self.proofs[id].clone()
            };
            out = out.then(p);
        }
        Some(out)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SaturationConfig {
    /// Relator insertions per derivation from a ball word.
    pub budget: usize,
    pub length_cap: usize,
    pub max_explored: usize,
}

struct Node {
    origin: u32,
    parent: u32,
    pos: u32,
    piece: u32,
}

/// Bounded relator insertion from every ball word at once, followed by
/// closure under left and right multiplication by letters.
pub fn saturate_equalities(
    ball: &Ball,
    relators: &[Vec<Letter>],
    cfg: SaturationConfig,
) -> EqualityStore {
    let mut store = EqualityStore::new(ball.len());
    let mut pieces: Vec<(Vec<Letter>, u32, u32, bool)> = Vec::new();
    for (i, r) in relators.iter().enumerate() {
        for rot in 0..r.len() as u32 {
            for inv in [false, true] {
                let p = relator_piece(relators, i as u32, rot, inv);
                if !pieces.iter().any(|q| q.0 == p) {
                    pieces.push((p, i as u32, rot, inv));
                }
            }
        }
    }

    let mut words: Vec<Vec<Letter>> = ball.words().to_vec();
    let mut nodes: Vec<Node> = (0..ball.len() as u32)
        .map(|i| Node {
            origin: i,
            parent: u32::MAX,
            pos: 0,
            piece: 0,
        })
        .collect();
    let mut seen: HashMap<Vec<Letter>, u32> = words
        .iter()
        .enumerate()
        .map(|(i, w)| (w.clone(), i as u32))
        .collect();

    let path = |nodes: &[Node], words: &[Vec<Letter>], mut n: u32| -> EqualityProof {
        let mut steps = Vec::new();
        while nodes[n as usize].parent != u32::MAX {
            let node = &nodes[n as usize];
            let (_, rel, rot, inv) = &pieces[node.piece as usize];
            steps.push(ProofStep {
                conjugator: words[node.parent as usize][..node.pos as usize].to_vec(),
                relator: *rel,
                rotation: *rot,
                inverse: *inv,
            });
            n = node.parent;
        }
        steps.reverse();
        EqualityProof { steps }
    };

    let mut frontier: Vec<u32> = (0..ball.len() as u32).collect();
    'layers: for _ in 0..cfg.budget {
        let mut next = Vec::new();
        for &n in &frontier {
            let origin = nodes[n as usize].origin;
            let w = words[n as usize].clone();
            for pos in 0..=w.len() {
                for (pi, (piece, _, _, _)) in pieces.iter().enumerate() {
                    let mut raw = w[..pos].to_vec();
                    raw.extend_from_slice(piece);
                    raw.extend_from_slice(&w[pos..]);
                    let nw = reduce_letters(&raw);
                    if nw.len() > cfg.length_cap {
                        continue;
                    }
                    match seen.get(&nw) {
                        Some(&m) => {
                            let other = nodes[m as usize].origin;
                            if !store.same(origin, other) {
                                let step = ProofStep {
                                    conjugator: w[..pos].to_vec(),
                                    relator: pieces[pi].1,
                                    rotation: pieces[pi].2,
                                    inverse: pieces[pi].3,
                                };
                                let proof = path(&nodes, &words, n)
                                    .then(EqualityProof { steps: vec![step] })
                                    .then(path(&nodes, &words, m).reversed());
                                store.union(origin, other, proof);
                            }
                        }
                        None => {
                            if words.len() >= cfg.max_explored {
                                store.truncated = true;
                                break 'layers;
                            }
                            let id = words.len() as u32;
                            seen.insert(nw.clone(), id);
                            words.push(nw);
                            nodes.push(Node {
                                origin,
                                parent: n,
                                pos: pos as u32,
                                piece: pi as u32,
                            });
                            next.push(id);
                        }
                    }
                }
            }
        }
        frontier = next;
    }
    store.explored = words.len();
    congruence_closure(ball, &mut store);
    store
}

fn congruence_closure(ball: &Ball, store: &mut EqualityStore) {
    let letters: Vec<Letter> = ball
        .alphabet
        .generators()
        .flat_map(|g| {
            [
                Letter {
                    gen: g,
                    inverse: false,
                },
                Letter {
                    gen: g,
                    inverse: true,
                },
            ]
        })
        .collect();
    loop {
        let mut changed = false;
        for &x in &letters {
            for left in [true, false] {
                let mut first: HashMap<u32, (u32, u32)> = HashMap::new();
                for i in 0..ball.len() as u32 {
                    let j = if left {
                        ball.left_mul(x, i)
                    } else {
                        ball.right_mul(i, x)
                    };
                    let Some(j) = j else { continue };
                    let root = store.find(i);
                    match first.get(&root) {
                        None => {
                            first.insert(root, (i, j));
                        }
                        Some(&(i0, j0)) => {
                            if !store.same(j0, j) {
                                let p = store.proof(i0, i).expect("same class");
                                let p = if left { p.left_mul(x) } else { p };
                                store.union(j0, j, p);
                                changed = true;
                            }
                        }
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
}
