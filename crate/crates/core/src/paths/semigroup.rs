use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Mutex;

use serde::Serialize;

use super::{check_confluence, contractions, expansions, reduce, walks_from, ConfluenceReport, PathSeq};
use crate::homotopy::{GroupoidModel, Word};
use crate::poset::{Elem, Poset};

/// An element of the path semigroup: a class of paths, or the adjoined zero.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum PathClass {
    Zero,
    Path(PathSeq),
}

impl PathClass {
    pub fn repr(&self) -> Option<&PathSeq> {
        match self {
            PathClass::Zero => None,
            PathClass::Path(p) => Some(p),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, PathClass::Zero)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Equivalence {
    Yes,
    No,
    Unknown,
}

type Key = (Elem, Elem, Word);

/// The path semigroup of a poset together with its decision procedures.
///
/// Canonical representatives are rewriting normal forms when the rewriting
/// system is certified confluent. Otherwise, if the groupoid model decides
/// equivalence, the representative is the shortest path in the class (least
/// vertex sequence among those). Failing both, classes are syntactic normal
/// forms and semantic questions go through [`PathSemigroup::equivalent`].
pub struct PathSemigroup {
    poset: Poset,
    confluence: ConfluenceReport,
    model: GroupoidModel,
    geodesics: Mutex<HashMap<Key, PathSeq>>,
}

impl fmt::Debug for PathSemigroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PathSemigroup")
            .field("elements", &self.poset.labels())
            .field("certified", &self.confluence.certified)
            .field("model_complete", &self.model.is_complete())
            .finish()
    }
}

impl Clone for PathSemigroup {
    fn clone(&self) -> Self {
        PathSemigroup {
            poset: self.poset.clone(),
            confluence: self.confluence.clone(),
            model: self.model.clone(),
            geodesics: Mutex::new(self.geodesics.lock().unwrap().clone()),
        }
    }
}

impl PathSemigroup {
    pub fn new(poset: Poset) -> PathSemigroup {
        let confluence = check_confluence(&poset, 3);
        let model = GroupoidModel::new(&poset, None);
        PathSemigroup {
            poset,
            confluence,
            model,
            geodesics: Mutex::new(HashMap::new()),
        }
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn confluence(&self) -> &ConfluenceReport {
        &self.confluence
    }

    pub fn model(&self) -> &GroupoidModel {
        &self.model
    }

    pub fn is_certified(&self) -> bool {
        self.confluence.certified
    }

    /// Whether equal classes are exactly equal representatives.
    pub fn decides_classes(&self) -> bool {
        self.confluence.certified || self.model.is_complete()
    }

    pub fn canonical(&self, p: &PathSeq) -> PathSeq {
        let r = reduce(&self.poset, p);
        if self.confluence.certified || !self.model.is_complete() {
            return r;
        }
        let key = self.model.key(p);
        if let Some(g) = self.geodesics.lock().unwrap().get(&key) {
            return g.clone();
        }
        let found = (0..=r.len())
            .find_map(|len| {
                walks_from(&self.poset, p.start(), len)
                    .into_iter()
                    .find(|w| w.end() == p.end() && self.model.key(w) == key)
            })
            .unwrap_or(r);
        self.geodesics.lock().unwrap().insert(key, found.clone());
        found
    }

    pub fn class_of(&self, p: &PathSeq) -> PathClass {
        PathClass::Path(self.canonical(p))
    }

    pub fn identity(&self, a: Elem) -> PathClass {
        PathClass::Path(PathSeq::trivial(a))
    }

    /// The product `p * q`: walk `q`, then `p`. Zero unless `q` ends where
    /// `p` starts.
    pub fn concat(&self, p: &PathClass, q: &PathClass) -> PathClass {
        match (p, q) {
            (PathClass::Path(p), PathClass::Path(q)) => match q.then(p) {
                Some(s) => self.class_of(&s),
                None => PathClass::Zero,
            },
            _ => PathClass::Zero,
        }
    }

    pub fn inverse(&self, p: &PathClass) -> PathClass {
        match p {
            PathClass::Zero => PathClass::Zero,
            PathClass::Path(p) => self.class_of(&p.reverse()),
        }
    }

    /// Decides `p ~ q` where possible; `budget` caps the number of sequences
    /// expanded by the fallback search.
    pub fn equivalent(&self, p: &PathSeq, q: &PathSeq, budget: usize) -> Equivalence {
        if p.start() != q.start() || p.end() != q.end() {
            return Equivalence::No;
        }
        let rp = reduce(&self.poset, p);
        let rq = reduce(&self.poset, q);
        if rp == rq {
            return Equivalence::Yes;
        }
        if self.confluence.certified {
            return Equivalence::No;
        }
        let (kp, kq) = (self.model.key(p), self.model.key(q));
        if kp == kq {
            return Equivalence::Yes;
        }
        if self.model.is_complete() {
            return Equivalence::No;
        }
        let around = p.then(&q.reverse()).expect("same endpoints");
        if self.model.abelian_class(&around).iter().any(|&x| x != 0) {
            return Equivalence::No;
        }
        if self.search(&rp, &rq, budget) {
            Equivalence::Yes
        } else {
            Equivalence::Unknown
        }
    }

    /// Bidirectional breadth-first search over one-step rewrites in both
    /// directions, on trivial-free sequences at most two steps longer than
    /// the longer input.
    fn search(&self, p: &PathSeq, q: &PathSeq, budget: usize) -> bool {
        let max_len = p.len().max(q.len()) + 2;
        let mut seen = [HashSet::new(), HashSet::new()];
        let mut frontier = [vec![p.strip_trivial()], vec![q.strip_trivial()]];
        seen[0].insert(frontier[0][0].clone());
        seen[1].insert(frontier[1][0].clone());
        if seen[0].contains(&frontier[1][0]) {
            return true;
        }
        let mut spent = 0;
        while spent < budget && !(frontier[0].is_empty() && frontier[1].is_empty()) {
            let side = if frontier[0].len() <= frontier[1].len() && !frontier[0].is_empty() {
                0
            } else {
                1
            };
            let mut next = Vec::new();
            for s in std::mem::take(&mut frontier[side]) {
                spent += 1;
                if spent > budget {
                    break;
                }
                let nbrs = contractions(&self.poset, &s)
                    .into_iter()
                    .map(|c| c.strip_trivial())
                    .chain(expansions(&self.poset, &s).into_iter().filter(|e| e.len() <= max_len));
                for n in nbrs {
                    if seen[1 - side].contains(&n) {
                        return true;
                    }
                    if seen[side].insert(n.clone()) {
                        next.push(n);
                    }
                }
            }
            frontier[side] = next;
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain() -> Poset {
        Poset::new(&["a", "b", "c"], &[("a", "b"), ("b", "c")]).unwrap()
    }

    fn crown2() -> Poset {
        Poset::new(
            &["a1", "a2", "b1", "b2"],
            &[("a1", "b1"), ("a1", "b2"), ("a2", "b1"), ("a2", "b2")],
        )
        .unwrap()
    }

    #[test]
    fn concat_examples() {
        let sg = PathSemigroup::new(chain());
        let p = sg.poset().clone();
        let ab = sg.class_of(&PathSeq::parse(&p, "d(a,b)").unwrap());
        let bc = sg.class_of(&PathSeq::parse(&p, "d(b,c)").unwrap());
        let ac = sg.class_of(&PathSeq::parse(&p, "d(a,c)").unwrap());
        assert_eq!(sg.concat(&ab, &bc), ac);
        assert_eq!(sg.concat(&ab, &PathClass::Zero), PathClass::Zero);
        assert_eq!(sg.concat(&PathClass::Zero, &ab), PathClass::Zero);
        assert_eq!(sg.concat(&bc, &ab), PathClass::Zero);
    }

    #[test]
    fn equivalence_examples() {
        let sg = PathSemigroup::new(crown2());
        let p = sg.poset().clone();
        let s = PathSeq::parse(&p, "u(b2,a2)*d(a2,b1)*u(b1,a1)").unwrap();
        assert_eq!(sg.equivalent(&s, &s, 0), Equivalence::Yes);
        let b2 = p.elem("b2").unwrap();
        assert_eq!(
            sg.equivalent(&s.reverse().then(&s).unwrap(), &PathSeq::trivial(b2), 0),
            Equivalence::Yes
        );
        let turn = PathSeq::parse(&p, "d(a1,b2)*u(b2,a2)*d(a2,b1)*u(b1,a1)").unwrap();
        let a1 = p.elem("a1").unwrap();
        assert_eq!(sg.equivalent(&turn, &PathSeq::trivial(a1), 100), Equivalence::No);
    }

    #[test]
    fn uncertified_poset_uses_geodesics() {
        let cone = Poset::new(
            &["a1", "a2", "b1", "b2", "t"],
            &[("a1", "b1"), ("a1", "b2"), ("a2", "b1"), ("a2", "b2"), ("b1", "t"), ("b2", "t")],
        )
        .unwrap();
        let sg = PathSemigroup::new(cone.clone());
        assert!(!sg.is_certified());
        assert!(sg.decides_classes());
        let turn = PathSeq::parse(&cone, "d(a1,b2)*u(b2,a2)*d(a2,b1)*u(b1,a1)").unwrap();
        let a1 = cone.elem("a1").unwrap();
        assert_eq!(sg.canonical(&turn), PathSeq::trivial(a1));
        assert_eq!(sg.equivalent(&turn, &PathSeq::trivial(a1), 0), Equivalence::Yes);
        let via_t = PathSeq::from_labels(&cone, &["a1", "t", "a2"]).unwrap();
        let via_b = PathSeq::from_labels(&cone, &["a1", "b1", "a2"]).unwrap();
        assert_eq!(sg.canonical(&via_t), sg.canonical(&via_b));
    }
}
