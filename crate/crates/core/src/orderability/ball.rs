use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::words::{invert_letters, reduce_letters, Alphabet, GeneratorId, Letter};

/// All freely reduced words of length at most `radius`, shortlex ordered,
/// with the empty word at index 0.
#[derive(Debug, Clone)]
pub struct Ball {
    pub radius: usize,
    pub alphabet: Alphabet,
    words: Vec<Vec<Letter>>,
    index: HashMap<Vec<Letter>, u32>,
    inverse: Vec<u32>,
}

/// Number of reduced words of length at most `radius` over `rank` generators.
pub fn ball_size(rank: usize, radius: usize) -> u128 {
    if rank == 0 {
        return 1;
    }
    let mut total: u128 = 1;
    let mut layer: u128 = 2 * rank as u128;
    for _ in 0..radius {
        total = total.saturating_add(layer);
        layer = layer.saturating_mul(2 * rank as u128 - 1);
    }
    total
}

pub fn enumerate_ball(alphabet: &Alphabet, radius: usize, max_elements: usize) -> Result<Ball> {
    if radius == 0 {
        return Err(Error::Malformed("ball radius must be at least 1".into()));
    }
    let expected = ball_size(alphabet.len(), radius);
    if expected > max_elements as u128 {
        return Err(Error::ResourceCap(format!(
            "ball of radius {radius} has {expected} elements, cap is {max_elements}"
        )));
    }
    let letters: Vec<Letter> = alphabet
        .generators()
        .flat_map(|g: GeneratorId| {
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
    let mut words: Vec<Vec<Letter>> = vec![Vec::new()];
    let mut start = 0;
    for _ in 0..radius {
        let end = words.len();
        for i in start..end {
            for &l in &letters {
                if words[i].last().is_some_and(|&p| p.cancels(l)) {
                    continue;
                }
                let mut w = words[i].clone();
                w.push(l);
                words.push(w);
            }
        }
        start = end;
    }
    let index: HashMap<Vec<Letter>, u32> = words
        .iter()
        .enumerate()
        .map(|(i, w)| (w.clone(), i as u32))
        .collect();
    let inverse = words.iter().map(|w| index[&invert_letters(w)]).collect();
    Ok(Ball {
        radius,
        alphabet: alphabet.clone(),
        words,
        index,
        inverse,
    })
}

impl Ball {
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn word(&self, i: u32) -> &[Letter] {
        &self.words[i as usize]
    }

    pub fn words(&self) -> &[Vec<Letter>] {
        &self.words
    }

    pub fn lookup(&self, w: &[Letter]) -> Option<u32> {
        self.index.get(w).copied()
    }

    pub fn inverse(&self, i: u32) -> u32 {
        self.inverse[i as usize]
    }

    /// Index of the reduced product, when it lies in the ball.
    pub fn product(&self, i: u32, j: u32) -> Option<u32> {
        let (u, v) = (self.word(i), self.word(j));
        let mut c = 0;
        while c < u.len().min(v.len()) && u[u.len() - 1 - c].cancels(v[c]) {
            c += 1;
        }
        if u.len() + v.len() - 2 * c > self.radius {
            return None;
        }
        let mut w = u[..u.len() - c].to_vec();
        w.extend_from_slice(&v[c..]);
        self.lookup(&w)
    }

    /// Index of `x w` for a single letter `x`.
    pub fn left_mul(&self, x: Letter, i: u32) -> Option<u32> {
        let mut w = vec![x];
        w.extend_from_slice(self.word(i));
        self.lookup(&reduce_letters(&w))
    }

    pub fn right_mul(&self, i: u32, x: Letter) -> Option<u32> {
        let mut w = self.word(i).to_vec();
        w.push(x);
        self.lookup(&reduce_letters(&w))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        let ab = Alphabet::new(&["a", "b"]).unwrap();
        assert_eq!(enumerate_ball(&ab, 1, 1000).unwrap().len(), 5);
        assert_eq!(enumerate_ball(&ab, 2, 1000).unwrap().len(), 17);
        let a = Alphabet::new(&["a"]).unwrap();
        assert_eq!(enumerate_ball(&a, 3, 1000).unwrap().len(), 7);
        for r in 1..6 {
            assert_eq!(
                enumerate_ball(&ab, r, 10_000).unwrap().len() as u128,
                ball_size(2, r)
            );
        }
        assert!(matches!(
            enumerate_ball(&ab, 8, 1000),
            Err(Error::ResourceCap(_))
        ));
        assert!(enumerate_ball(&ab, 0, 1000).is_err());
    }

    #[test]
    fn structure() {
        let ab = Alphabet::new(&["a", "b"]).unwrap();
        let ball = enumerate_ball(&ab, 3, 1000).unwrap();
        assert!(ball.word(0).is_empty());
        for i in 0..ball.len() as u32 {
            assert_eq!(ball.inverse(ball.inverse(i)), i);
            assert_eq!(ball.product(i, ball.inverse(i)), Some(0));
        }
        let a = ball.lookup(&[Letter::pos(0)]).unwrap();
        let b = ball.lookup(&[Letter::pos(1)]).unwrap();
        let ab_ = ball.product(a, b).unwrap();
        assert_eq!(ball.word(ab_), &[Letter::pos(0), Letter::pos(1)]);
        assert_eq!(ball.left_mul(Letter::pos(0), b), Some(ab_));
        assert_eq!(ball.right_mul(a, Letter::pos(1)), Some(ab_));
    }
}
