//! Homomorphisms to small groups, used to show ball elements are not the
//! identity.

use serde::{Deserialize, Serialize};

use crate::words::Letter;

/// Images of the generators. A cyclic target with `modulus == 0` is `Z`.
/// Permutations act on the right: the image of `w = x1 x2 ...` sends `i`
/// to `i x1 x2 ...`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Homomorphism {
    Cyclic { modulus: u64, images: Vec<i64> },
    Permutation { degree: usize, images: Vec<Vec<u8>> },
}

impl Homomorphism {
    pub fn is_trivial_on(&self, w: &[Letter]) -> bool {
        match self {
            Homomorphism::Cyclic { modulus, images } => {
                let s: i64 = w.iter().map(|l| l.sign() * images[l.gen.index()]).sum();
                if *modulus == 0 {
                    s == 0
                } else {
                    s.rem_euclid(*modulus as i64) == 0
                }
            }
            Homomorphism::Permutation { degree, images } => {
                let inverses: Vec<Vec<u8>> = images.iter().map(|p| invert(p)).collect();
                (0..*degree as u8).all(|i| {
                    let mut x = i;
                    for l in w {
                        let p = if l.inverse {
                            &inverses[l.gen.index()]
                        } else {
                            &images[l.gen.index()]
                        };
                        x = p[x as usize];
                    }
                    x == i
                })
            }
        }
    }

    pub fn kills(&self, relators: &[Vec<Letter>]) -> bool {
        relators.iter().all(|r| self.is_trivial_on(r))
    }
}

fn invert(p: &[u8]) -> Vec<u8> {
    let mut q = vec![0u8; p.len()];
    for (i, &x) in p.iter().enumerate() {
        q[x as usize] = i as u8;
    }
    q
}

fn next_permutation(p: &mut [u8]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).unwrap();
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

fn all_permutations(degree: usize) -> Vec<Vec<u8>> {
    let mut p: Vec<u8> = (0..degree as u8).collect();
    let mut out = vec![p.clone()];
    while next_permutation(&mut p) {
        out.push(p.clone());
    }
    out
}

/// Calls `f` on every tuple of `rank` items drawn from `0..choices`, in
/// lexicographic order, until it returns false.
fn for_each_tuple(rank: usize, choices: usize, mut f: impl FnMut(&[usize]) -> bool) {
    let mut t = vec![0usize; rank];
    loop {
        if !f(&t) {
            return;
        }
        let mut k = rank;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            t[k] += 1;
            if t[k] < choices {
                break;
            }
            t[k] = 0;
        }
    }
}

/// Deterministically enumerates small homomorphisms and assigns to each
/// target word the first one that does not kill it. Returns the
/// homomorphisms used and, per target, the index of its witness.
pub fn find_witnesses(
    rank: usize,
    relators: &[Vec<Letter>],
    targets: &[Vec<Letter>],
    max_candidates: usize,
) -> (Vec<Homomorphism>, Vec<Option<usize>>) {
    let mut used: Vec<Homomorphism> = Vec::new();
    let mut assigned: Vec<Option<usize>> = vec![None; targets.len()];
    let mut remaining = targets.len();
    if remaining == 0 || rank == 0 {
        return (used, assigned);
    }
    let offer = |h: Homomorphism,
                 used: &mut Vec<Homomorphism>,
                 assigned: &mut Vec<Option<usize>>,
                 remaining: &mut usize| {
        if !h.kills(relators) {
            return;
        }
        let mut idx = None;
        for (t, slot) in targets.iter().zip(assigned.iter_mut()) {
            if slot.is_none() && !h.is_trivial_on(t) {
                let i = *idx.get_or_insert_with(|| {
                    used.push(h.clone());
                    used.len() - 1
                });
                *slot = Some(i);
                *remaining -= 1;
            }
        }
    };

    if 3usize.pow(rank as u32) <= max_candidates {
        for_each_tuple(rank, 3, |t| {
            let images = t.iter().map(|&x| x as i64 - 1).collect();
            offer(
                Homomorphism::Cyclic { modulus: 0, images },
                &mut used,
                &mut assigned,
                &mut remaining,
            );
            remaining > 0
        });
    }
    for modulus in 2..=16usize {
        if remaining == 0
            || modulus
                .checked_pow(rank as u32)
                .is_none_or(|c| c > max_candidates)
        {
            break;
        }
        for_each_tuple(rank, modulus, |t| {
            let images = t.iter().map(|&x| x as i64).collect();
            offer(
                Homomorphism::Cyclic {
                    modulus: modulus as u64,
                    images,
                },
                &mut used,
                &mut assigned,
                &mut remaining,
            );
            remaining > 0
        });
    }
    for degree in 3..=6usize {
        let perms = all_permutations(degree);
        if remaining == 0
            || perms
                .len()
                .checked_pow(rank as u32)
                .is_none_or(|c| c > max_candidates)
        {
            break;
        }
        for_each_tuple(rank, perms.len(), |t| {
            let images = t.iter().map(|&x| perms[x].clone()).collect();
            offer(
                Homomorphism::Permutation { degree, images },
                &mut used,
                &mut assigned,
                &mut remaining,
            );
            remaining > 0
        });
    }
    (used, assigned)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutations() {
        assert_eq!(all_permutations(3).len(), 6);
        assert_eq!(all_permutations(5).len(), 120);
        let mut seen = all_permutations(4);
        seen.dedup();
        assert_eq!(seen.len(), 24);
    }

    #[test]
    fn cyclic_powers_are_witnessed() {
        for n in 2..=6usize {
            let rels = vec![vec![Letter::pos(0); n]];
            let targets: Vec<Vec<Letter>> = (1..n).map(|k| vec![Letter::pos(0); k]).collect();
            let (homs, w) = find_witnesses(1, &rels, &targets, 20_000);
            assert!(w.iter().all(|x| x.is_some()), "n = {n}");
            assert!(homs.iter().all(|h| h.kills(&rels)));
            let (_, w) = find_witnesses(1, &rels, &[vec![Letter::pos(0); n]], 20_000);
            assert_eq!(w, vec![None]);
        }
    }

    #[test]
    fn commutator_needs_nonabelian_target() {
        let c = vec![
            Letter::pos(0),
            Letter::pos(1),
            Letter::neg(0),
            Letter::neg(1),
        ];
        let (homs, w) = find_witnesses(2, &[], std::slice::from_ref(&c), 20_000);
        assert!(matches!(
            homs[w[0].unwrap()],
            Homomorphism::Permutation { .. }
        ));
        let (_, w) = find_witnesses(
            2,
            std::slice::from_ref(&c),
            std::slice::from_ref(&c),
            20_000,
        );
        assert_eq!(w, vec![None]);
    }
}
