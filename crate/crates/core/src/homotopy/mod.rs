//! Loop groups: presentations, abelian invariants and change of basepoint.

mod model;
pub mod smith;
mod word;

pub use model::{AbelianModel, GroupoidModel};
pub use word::Word;

use serde::Serialize;

use crate::error::HomotopyError;
use crate::paths::{PathClass, PathSemigroup, PathSeq, Step};
use crate::poset::{Elem, Poset};

/// Generators are the non-tree comparability edges, relators come from the
/// chains `x < y < z`, all written through a spanning tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupPresentation {
    pub basepoint: Elem,
    pub spanning_tree: Vec<(Elem, Elem)>,
    pub generators: Vec<(Elem, Elem)>,
    pub relators: Vec<Word>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AbelianInvariants {
    pub rank: usize,
    pub torsion: Vec<i64>,
}

impl AbelianInvariants {
    pub fn is_trivial(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }
}

/// Labelled form of a presentation, for reports.
#[derive(Debug, Clone, Serialize)]
pub struct PresentationView {
    pub basepoint: String,
    pub spanning_tree: Vec<(String, String)>,
    pub generators: Vec<(String, String)>,
    pub relators: Vec<String>,
}

impl GroupPresentation {
    pub fn view(&self, poset: &Poset) -> PresentationView {
        let pair = |&(x, y): &(Elem, Elem)| (poset.label(x).to_string(), poset.label(y).to_string());
        PresentationView {
            basepoint: poset.label(self.basepoint).to_string(),
            spanning_tree: self.spanning_tree.iter().map(pair).collect(),
            generators: self.generators.iter().map(pair).collect(),
            relators: self.relators.iter().map(Word::to_string).collect(),
        }
    }
}

pub fn loop_group_presentation(poset: &Poset, a: Elem) -> Result<GroupPresentation, HomotopyError> {
    if !poset.is_path_connected() {
        return Err(HomotopyError::NotPathConnected);
    }
    let model = GroupoidModel::new(poset, Some(a));
    Ok(GroupPresentation {
        basepoint: a,
        spanning_tree: model.tree,
        generators: model.generators,
        relators: model.relators,
    })
}

pub fn abelianization(g: &GroupPresentation) -> AbelianInvariants {
    let m = AbelianModel::new(g.generators.len(), &g.relators);
    AbelianInvariants {
        rank: m.rank(),
        torsion: m.torsion(),
    }
}

/// Conjugation `p -> [up(a,b) after p after down(b,a)]`, carrying loops at
/// `a` to loops at `b`.
pub fn sigma_ba(
    sg: &PathSemigroup,
    a: Elem,
    b: Elem,
    p: &PathClass,
) -> Result<PathClass, HomotopyError> {
    let poset = sg.poset();
    if !poset.leq(a, b) {
        return Err(HomotopyError::NotComparable(
            poset.label(a).to_string(),
            poset.label(b).to_string(),
        ));
    }
    let not_loop = || HomotopyError::NotALoop(poset.label(a).to_string());
    let rep = p.repr().ok_or_else(not_loop)?;
    if rep.start() != a || rep.end() != a {
        return Err(not_loop());
    }
    let conj = PathSeq::single(Step::down(a, b))
        .then(rep)
        .and_then(|x| x.then(&PathSeq::single(Step::up(a, b))))
        .expect("endpoints match");
    Ok(sg.class_of(&conj))
}

/// Inverse of [`sigma_ba`]: conjugation back from `b` to `a`.
pub fn sigma_ba_inverse(
    sg: &PathSemigroup,
    a: Elem,
    b: Elem,
    p: &PathClass,
) -> Result<PathClass, HomotopyError> {
    let poset = sg.poset();
    if !poset.leq(a, b) {
        return Err(HomotopyError::NotComparable(
            poset.label(a).to_string(),
            poset.label(b).to_string(),
        ));
    }
    let not_loop = || HomotopyError::NotALoop(poset.label(b).to_string());
    let rep = p.repr().ok_or_else(not_loop)?;
    if rep.start() != b || rep.end() != b {
        return Err(not_loop());
    }
    let conj = PathSeq::single(Step::up(a, b))
        .then(rep)
        .and_then(|x| x.then(&PathSeq::single(Step::down(a, b))))
        .expect("endpoints match");
    Ok(sg.class_of(&conj))
}

#[derive(Debug, Clone, Serialize)]
pub struct DirectedLoopReport {
    pub samples: usize,
    /// Sampled loops not shown equivalent to the trivial loop.
    pub nontrivial: Vec<PathSeq>,
    pub invariants: AbelianInvariants,
    pub all_trivial: bool,
}

/// On an upward-directed poset every loop is trivial; checks the sampled
/// loops and the abelian invariants.
pub fn loops_trivial_if_directed(
    sg: &PathSemigroup,
    samples: &[PathSeq],
    budget: usize,
) -> Result<DirectedLoopReport, HomotopyError> {
    let poset = sg.poset();
    if !poset.is_directed() {
        return Err(HomotopyError::NotDirected);
    }
    let nontrivial: Vec<PathSeq> = samples
        .iter()
        .filter(|s| {
            !s.is_loop()
                || sg.equivalent(s, &PathSeq::trivial(s.start()), budget)
                    != crate::paths::Equivalence::Yes
        })
        .cloned()
        .collect();
    let invariants = match poset.elements().next() {
        Some(a) => abelianization(&loop_group_presentation(poset, a)?),
        None => AbelianInvariants {
            rank: 0,
            torsion: vec![],
        },
    };
    let all_trivial = nontrivial.is_empty() && invariants.is_trivial();
    Ok(DirectedLoopReport {
        samples: samples.len(),
        nontrivial,
        invariants,
        all_trivial,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paths::loops_at;

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
    fn presentations() {
        let c = chain();
        let g = loop_group_presentation(&c, Elem(0)).unwrap();
        assert_eq!((g.generators.len(), g.relators.len()), (1, 1));
        assert!(abelianization(&g).is_trivial());

        let k = crown2();
        let g = loop_group_presentation(&k, Elem(0)).unwrap();
        assert_eq!((g.generators.len(), g.relators.len()), (1, 0));
        assert_eq!(
            abelianization(&g),
            AbelianInvariants {
                rank: 1,
                torsion: vec![]
            }
        );

        let pt = Poset::new(&["a"], &[]).unwrap();
        assert!(loop_group_presentation(&pt, Elem(0)).unwrap().generators.is_empty());
        let anti = Poset::new(&["x", "y"], &[]).unwrap();
        assert_eq!(
            loop_group_presentation(&anti, Elem(0)),
            Err(HomotopyError::NotPathConnected)
        );
    }

    #[test]
    fn synthetic_torsion() {
        let g = GroupPresentation {
            basepoint: Elem(0),
            spanning_tree: vec![],
            generators: vec![(Elem(0), Elem(1))],
            relators: vec![Word(vec![1, 1])],
        };
        assert_eq!(abelianization(&g).torsion, vec![2]);
    }

    #[test]
    fn conjugation_round_trip() {
        let k = crown2();
        let sg = PathSemigroup::new(k.clone());
        let a = k.elem("a1").unwrap();
        let b = k.elem("b1").unwrap();
        let triv = sg.class_of(&PathSeq::trivial(a));
        assert_eq!(sigma_ba(&sg, a, b, &triv).unwrap(), sg.class_of(&PathSeq::trivial(b)));
        for l in loops_at(&k, a, 4) {
            let p = sg.class_of(&l);
            let there = sigma_ba(&sg, a, b, &p).unwrap();
            assert_eq!(sigma_ba_inverse(&sg, a, b, &there).unwrap(), p);
        }
        assert!(matches!(
            sigma_ba(&sg, b, a, &triv),
            Err(HomotopyError::NotComparable(..))
        ));
        assert!(matches!(sigma_ba(&sg, a, b, &sg.class_of(&PathSeq::trivial(b))), Err(HomotopyError::NotALoop(_))));
    }

    #[test]
    fn directed_posets_have_trivial_loops() {
        let c = chain();
        let sg = PathSemigroup::new(c.clone());
        let samples: Vec<PathSeq> = c.elements().flat_map(|a| loops_at(&c, a, 6)).collect();
        let r = loops_trivial_if_directed(&sg, &samples, 1000).unwrap();
        assert!(r.all_trivial, "{:?}", r.nontrivial);
        let k = PathSemigroup::new(crown2());
        assert_eq!(
            loops_trivial_if_directed(&k, &[], 10).unwrap_err(),
            HomotopyError::NotDirected
        );
    }
}
