//! Length-reducing rewriting on step sequences.
//!
//! Every rule rewrites two adjacent steps into one. Besides the four defining
//! relations and trivial-step absorption, the system contains the shortcut
//! rule: walking `x -> y -> z` where `x`, `y`, `z` are pairwise comparable
//! collapses to the single step `x -> z`. It is derivable from the defining
//! relations, and without it normal forms are not unique even on a 3-chain.

use std::collections::BTreeSet;

use serde::Serialize;

use super::{PathSeq, Step, StepKind};
use crate::poset::Poset;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Rule {
    /// `(a,b)*(b,c) -> (a,c)`: two downward steps merge.
    MergeDown,
    /// Two upward steps merge.
    MergeUp,
    /// Up then straight back down: `(a,b)*u(b,a) -> i_a`.
    CancelUpDown,
    /// Down then straight back up: `u(b,a)*(a,b) -> i_b`.
    CancelDownUp,
    /// A trivial step next to a nontrivial one disappears.
    AbsorbTrivial,
    /// `i_a*i_a -> i_a`.
    MergeTrivial,
    /// Peak or valley whose feet are comparable.
    Shortcut,
}

/// Rewrites the adjacent pair `first` then `second`, if some rule applies.
pub fn rewrite_pair(poset: &Poset, first: Step, second: Step) -> Option<(Rule, Step)> {
    debug_assert_eq!(first.end(), second.start());
    match (first.is_trivial(), second.is_trivial()) {
        (true, true) => return Some((Rule::MergeTrivial, first)),
        (true, false) => return Some((Rule::AbsorbTrivial, second)),
        (false, true) => return Some((Rule::AbsorbTrivial, first)),
        (false, false) => {}
    }
    let (x, z) = (first.start(), second.end());
    if x == z {
        let rule = match first.kind {
            StepKind::Up => Rule::CancelUpDown,
            _ => Rule::CancelDownUp,
        };
        return Some((rule, Step::trivial(x)));
    }
    let step = Step::between(poset, x, z)?;
    let rule = match (first.kind, second.kind) {
        (StepKind::Down, StepKind::Down) => Rule::MergeDown,
        (StepKind::Up, StepKind::Up) => Rule::MergeUp,
        _ => Rule::Shortcut,
    };
    Some((rule, step))
}

/// Leftmost-first normal form. The scan keeps an irreducible prefix on a
/// stack, so every rewrite happens at the leftmost redex.
pub fn reduce(poset: &Poset, path: &PathSeq) -> PathSeq {
    let mut stack: Vec<Step> = Vec::with_capacity(path.steps().len());
    for &step in path.steps() {
        let mut cur = step;
        while let Some(&top) = stack.last() {
            match rewrite_pair(poset, top, cur) {
                Some((_, merged)) => {
                    stack.pop();
                    cur = merged;
                }
                None => break,
            }
        }
        stack.push(cur);
    }
    PathSeq::from_steps_unchecked(stack)
}

/// Every sequence reachable by one rewrite.
pub fn contractions(poset: &Poset, path: &PathSeq) -> Vec<PathSeq> {
    let steps = path.steps();
    let mut out = Vec::new();
    for i in 0..steps.len().saturating_sub(1) {
        if let Some((_, merged)) = rewrite_pair(poset, steps[i], steps[i + 1]) {
            let mut next = Vec::with_capacity(steps.len() - 1);
            next.extend_from_slice(&steps[..i]);
            next.push(merged);
            next.extend_from_slice(&steps[i + 2..]);
            out.push(PathSeq::from_steps_unchecked(next));
        }
    }
    out
}

/// Inverse rewrites on trivial-free sequences: split a step `x -> z` through
/// a `y` comparable to both, or insert a detour `x -> y -> x` at a vertex.
/// Results are trivial-free.
pub fn expansions(poset: &Poset, path: &PathSeq) -> Vec<PathSeq> {
    let verts = path.vertices();
    let mut out = Vec::new();
    for i in 0..verts.len().saturating_sub(1) {
        let (x, z) = (verts[i], verts[i + 1]);
        for y in poset.elements() {
            if y != x && y != z && poset.comparable(x, y) && poset.comparable(y, z) {
                let mut v = verts[..=i].to_vec();
                v.push(y);
                v.extend_from_slice(&verts[i + 1..]);
                out.push(PathSeq::from_vertices(poset, &v).expect("comparable"));
            }
        }
    }
    for i in 0..verts.len() {
        for &y in poset.neighbors(verts[i]) {
            let mut v = verts[..=i].to_vec();
            v.push(y);
            v.extend_from_slice(&verts[i..]);
            out.push(PathSeq::from_vertices(poset, &v).expect("comparable"));
        }
    }
    out
}

/// All irreducible sequences reachable from `path` by any rewrite order.
pub fn all_normal_forms(poset: &Poset, path: &PathSeq) -> BTreeSet<PathSeq> {
    let mut seen = BTreeSet::new();
    let mut forms = BTreeSet::new();
    let mut todo = vec![path.clone()];
    while let Some(p) = todo.pop() {
        if !seen.insert(p.clone()) {
            continue;
        }
        let next = contractions(poset, &p);
        if next.is_empty() {
            forms.insert(p);
        } else {
            todo.extend(next);
        }
    }
    forms
}

#[derive(Debug, Clone, Serialize)]
pub struct CriticalPair {
    pub peak: PathSeq,
    pub left: PathSeq,
    pub right: PathSeq,
    pub joinable: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConfluenceReport {
    pub terminating: bool,
    pub critical_pairs: Vec<CriticalPair>,
    pub certified: bool,
}

impl ConfluenceReport {
    pub fn witness(&self) -> Option<&CriticalPair> {
        self.critical_pairs.iter().find(|c| !c.joinable)
    }
}

fn all_steps(poset: &Poset) -> Vec<Step> {
    let mut steps: Vec<Step> = poset.elements().map(Step::trivial).collect();
    for (lo, hi) in poset.comparability_edges() {
        steps.push(Step::down(lo, hi));
        steps.push(Step::up(lo, hi));
    }
    steps
}

/// Critical-pair analysis of the rule instances on `poset`.
///
/// All left-hand sides have two steps, so overlaps are three-step peaks; a
/// `max_len` below 3 examines nothing and cannot certify.
pub fn check_confluence(poset: &Poset, max_len: usize) -> ConfluenceReport {
    let steps = all_steps(poset);
    let mut terminating = true;
    for &s in &steps {
        for &t in steps.iter().filter(|t| t.start() == s.end()) {
            if let Some((_, r)) = rewrite_pair(poset, s, t) {
                // two steps become one; also never more nontrivial steps
                let before = [s, t].iter().filter(|x| !x.is_trivial()).count();
                terminating &= usize::from(!r.is_trivial()) <= before;
            }
        }
    }
    let mut critical_pairs = Vec::new();
    if max_len >= 3 {
        for &s1 in &steps {
            for &s2 in steps.iter().filter(|t| t.start() == s1.end()) {
                let Some((_, r12)) = rewrite_pair(poset, s1, s2) else {
                    continue;
                };
                for &s3 in steps.iter().filter(|t| t.start() == s2.end()) {
                    let Some((_, r23)) = rewrite_pair(poset, s2, s3) else {
                        continue;
                    };
                    let peak = PathSeq::from_steps_unchecked(vec![s1, s2, s3]);
                    let left = PathSeq::from_steps_unchecked(vec![r12, s3]);
                    let right = PathSeq::from_steps_unchecked(vec![s1, r23]);
                    let lf = all_normal_forms(poset, &left);
                    let rf = all_normal_forms(poset, &right);
                    let joinable = lf.intersection(&rf).next().is_some();
                    critical_pairs.push(CriticalPair {
                        peak,
                        left: reduce(poset, &left),
                        right: reduce(poset, &right),
                        joinable,
                    });
                }
            }
        }
    }
    let certified = terminating && max_len >= 3 && critical_pairs.iter().all(|c| c.joinable);
    ConfluenceReport {
        terminating,
        critical_pairs,
        certified,
    }
}
