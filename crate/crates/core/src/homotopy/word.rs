use std::fmt;

use serde::{Deserialize, Serialize};

/// A word in a free group. Letter `+(g+1)` is generator `g`, `-(g+1)` its inverse.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(pub Vec<i32>);

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn gen(g: usize, inverse: bool) -> Word {
        let l = g as i32 + 1;
        Word(vec![if inverse { -l } else { l }])
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn generator(letter: i32) -> usize {
        letter.unsigned_abs() as usize - 1
    }

    pub fn push(&mut self, letter: i32) {
        if self.0.last() == Some(&-letter) {
            self.0.pop();
        } else {
            self.0.push(letter);
        }
    }

    pub fn reduced(&self) -> Word {
        let mut w = Word::empty();
        for &l in &self.0 {
            w.push(l);
        }
        w
    }

    pub fn mul(&self, other: &Word) -> Word {
        let mut w = self.reduced();
        for &l in &other.0 {
            w.push(l);
        }
        w
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| -l).collect())
    }

    /// Free and cyclic reduction.
    pub fn cyclically_reduced(&self) -> Word {
        let mut w = self.reduced().0;
        while w.len() >= 2 && w[0] == -w[w.len() - 1] {
            w.remove(0);
            w.pop();
        }
        Word(w)
    }

    /// Canonical representative of the relation `self = 1`: least rotation of
    /// the cyclic reduction of `self` or of its inverse.
    pub fn normalized_relator(&self) -> Word {
        let w = self.cyclically_reduced();
        let mut best = w.clone();
        for cand in [w.clone(), w.inverse()] {
            for k in 0..cand.len() {
                let mut r = cand.0[k..].to_vec();
                r.extend_from_slice(&cand.0[..k]);
                let r = Word(r);
                if r < best {
                    best = r;
                }
            }
        }
        best
    }

    /// Replaces every letter of generator `g` by `image` (inverted for inverse
    /// letters) and reduces.
    pub fn substitute(&self, g: usize, image: &Word) -> Word {
        let inv = image.inverse();
        let mut out = Word::empty();
        for &l in &self.0 {
            if Word::generator(l) == g {
                for &m in if l > 0 { &image.0 } else { &inv.0 } {
                    out.push(m);
                }
            } else {
                out.push(l);
            }
        }
        out
    }

    /// Exponent sum per generator.
    pub fn exponents(&self, ngens: usize) -> Vec<i64> {
        let mut v = vec![0; ngens];
        for &l in &self.0 {
            v[Word::generator(l)] += l.signum() as i64;
        }
        v
    }

    pub fn occurrences(&self, g: usize) -> usize {
        self.0.iter().filter(|&&l| Word::generator(l) == g).count()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|&l| {
                let g = Word::generator(l);
                if l > 0 {
                    format!("g{g}")
                } else {
                    format!("g{g}^-1")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_reduction() {
        assert!(Word(vec![1, 2, -2, -1]).reduced().is_empty());
        assert_eq!(Word(vec![1, 2]).mul(&Word(vec![-2, 3])), Word(vec![1, 3]));
        assert_eq!(Word(vec![-1, 2, 1]).cyclically_reduced(), Word(vec![2]));
    }

    #[test]
    fn substitution() {
        // g0 := g1 g2 in g0^-1 g1
        let w = Word(vec![-1, 2]).substitute(0, &Word(vec![2, 3]));
        assert_eq!(w, Word(vec![-3]));
    }

    #[test]
    fn relator_normalization_ignores_rotation_and_inversion() {
        let a = Word(vec![1, 2, -3]).normalized_relator();
        assert_eq!(a, Word(vec![2, -3, 1]).normalized_relator());
        assert_eq!(a, Word(vec![3, -2, -1]).normalized_relator());
    }
}
