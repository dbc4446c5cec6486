//! Elementary paths, step sequences and the path semigroup.
//!
//! A [`PathSeq`] stores its steps in traversal order: `steps[0]` is walked
//! first. The textual syntax (`d(a,b)*u(b,a)`) uses the right-to-left product
//! order instead, so the rightmost factor is the first step walked.

mod rewrite;
mod semigroup;

pub use rewrite::{
    all_normal_forms, check_confluence, contractions, expansions, reduce, rewrite_pair,
    ConfluenceReport, CriticalPair, Rule,
};
pub use semigroup::{Equivalence, PathClass, PathSemigroup};

use std::fmt;

use serde::Serialize;

use crate::error::PathError;
use crate::poset::{Elem, Poset};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum StepKind {
    /// From `hi` down to `lo`.
    Down,
    /// From `lo` up to `hi`.
    Up,
    /// Stays at `lo == hi`.
    Trivial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Step {
    pub kind: StepKind,
    pub lo: Elem,
    pub hi: Elem,
}

impl Step {
    pub fn trivial(a: Elem) -> Step {
        Step {
            kind: StepKind::Trivial,
            lo: a,
            hi: a,
        }
    }

    /// The step walking from `hi` down to `lo`. Degenerates to a trivial step.
    pub fn down(lo: Elem, hi: Elem) -> Step {
        if lo == hi {
            return Step::trivial(lo);
        }
        Step {
            kind: StepKind::Down,
            lo,
            hi,
        }
    }

    /// The step walking from `lo` up to `hi`. Degenerates to a trivial step.
    pub fn up(lo: Elem, hi: Elem) -> Step {
        if lo == hi {
            return Step::trivial(lo);
        }
        Step {
            kind: StepKind::Up,
            lo,
            hi,
        }
    }

    /// The unique step from `from` to `to`, if they are comparable.
    pub fn between(poset: &Poset, from: Elem, to: Elem) -> Option<Step> {
        if from == to {
            Some(Step::trivial(from))
        } else if poset.leq(from, to) {
            Some(Step::up(from, to))
        } else if poset.leq(to, from) {
            Some(Step::down(to, from))
        } else {
            None
        }
    }

    pub fn start(&self) -> Elem {
        match self.kind {
            StepKind::Down => self.hi,
            StepKind::Up | StepKind::Trivial => self.lo,
        }
    }

    pub fn end(&self) -> Elem {
        match self.kind {
            StepKind::Down | StepKind::Trivial => self.lo,
            StepKind::Up => self.hi,
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.kind == StepKind::Trivial
    }

    pub fn reverse(&self) -> Step {
        let kind = match self.kind {
            StepKind::Down => StepKind::Up,
            StepKind::Up => StepKind::Down,
            StepKind::Trivial => StepKind::Trivial,
        };
        Step { kind, ..*self }
    }

    fn check(&self, poset: &Poset) -> Result<(), PathError> {
        if poset.leq(self.lo, self.hi) {
            Ok(())
        } else {
            Err(PathError::NotComparable(
                poset.label(self.lo).to_string(),
                poset.label(self.hi).to_string(),
            ))
        }
    }

    pub fn display(&self, poset: &Poset) -> String {
        let (lo, hi) = (poset.label(self.lo), poset.label(self.hi));
        match self.kind {
            StepKind::Down => format!("d({lo},{hi})"),
            StepKind::Up => format!("u({hi},{lo})"),
            StepKind::Trivial => format!("i({lo})"),
        }
    }
}

/// A nonempty composable sequence of steps.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct PathSeq {
    steps: Vec<Step>,
}

impl PathSeq {
    pub fn new(poset: &Poset, steps: Vec<Step>) -> Result<PathSeq, PathError> {
        if steps.is_empty() {
            return Err(PathError::Empty);
        }
        for s in &steps {
            s.check(poset)?;
        }
        for (i, w) in steps.windows(2).enumerate() {
            if w[0].end() != w[1].start() {
                return Err(PathError::NotComposable {
                    index: i + 1,
                    expected: poset.label(w[0].end()).to_string(),
                    found: poset.label(w[1].start()).to_string(),
                });
            }
        }
        Ok(PathSeq { steps })
    }

    /// Caller guarantees the steps are valid and composable.
    pub(crate) fn from_steps_unchecked(steps: Vec<Step>) -> PathSeq {
        debug_assert!(!steps.is_empty());
        debug_assert!(steps.windows(2).all(|w| w[0].end() == w[1].start()));
        PathSeq { steps }
    }

    pub fn trivial(a: Elem) -> PathSeq {
        PathSeq {
            steps: vec![Step::trivial(a)],
        }
    }

    pub fn single(step: Step) -> PathSeq {
        PathSeq { steps: vec![step] }
    }

    /// The path visiting `vertices` in order; a single vertex gives the
    /// trivial path.
    pub fn from_vertices(poset: &Poset, vertices: &[Elem]) -> Result<PathSeq, PathError> {
        match vertices {
            [] => Err(PathError::Empty),
            [a] => Ok(PathSeq::trivial(*a)),
            _ => {
                let steps = vertices
                    .windows(2)
                    .map(|w| {
                        Step::between(poset, w[0], w[1]).ok_or_else(|| {
                            PathError::NotComparable(
                                poset.label(w[0]).to_string(),
                                poset.label(w[1]).to_string(),
                            )
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                PathSeq::new(poset, steps)
            }
        }
    }

    pub fn from_labels<S: AsRef<str>>(poset: &Poset, labels: &[S]) -> Result<PathSeq, PathError> {
        let v = labels
            .iter()
            .map(|l| poset.elem(l.as_ref()))
            .collect::<Result<Vec<_>, _>>()?;
        PathSeq::from_vertices(poset, &v)
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn start(&self) -> Elem {
        self.steps[0].start()
    }

    pub fn end(&self) -> Elem {
        self.steps[self.steps.len() - 1].end()
    }

    pub fn is_loop(&self) -> bool {
        self.start() == self.end()
    }

    /// Number of nontrivial steps.
    pub fn len(&self) -> usize {
        self.steps.iter().filter(|s| !s.is_trivial()).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Vertices visited, trivial steps skipped.
    pub fn vertices(&self) -> Vec<Elem> {
        let mut v = vec![self.start()];
        v.extend(self.steps.iter().filter(|s| !s.is_trivial()).map(|s| s.end()));
        v
    }

    /// The same walk with trivial steps dropped (kept if nothing else remains).
    pub fn strip_trivial(&self) -> PathSeq {
        let steps: Vec<Step> = self.steps.iter().filter(|s| !s.is_trivial()).copied().collect();
        if steps.is_empty() {
            PathSeq::trivial(self.start())
        } else {
            PathSeq { steps }
        }
    }

    pub fn reverse(&self) -> PathSeq {
        PathSeq {
            steps: self.steps.iter().rev().map(Step::reverse).collect(),
        }
    }

    /// Walk `self`, then `next`. `None` if the endpoints do not meet.
    pub fn then(&self, next: &PathSeq) -> Option<PathSeq> {
        if self.end() != next.start() {
            return None;
        }
        let mut steps = self.steps.clone();
        steps.extend_from_slice(&next.steps);
        Some(PathSeq { steps })
    }

    /// The right-to-left product `self * first`: walk `first`, then `self`.
    pub fn star(&self, first: &PathSeq) -> Option<PathSeq> {
        first.then(self)
    }

    /// Relabels every step through an order-preserving map.
    pub fn map_elements(
        &self,
        target: &Poset,
        f: impl Fn(Elem) -> Elem,
    ) -> Result<PathSeq, PathError> {
        let steps = self
            .steps
            .iter()
            .map(|s| match s.kind {
                StepKind::Trivial => Step::trivial(f(s.lo)),
                StepKind::Down => Step::down(f(s.lo), f(s.hi)),
                StepKind::Up => Step::up(f(s.lo), f(s.hi)),
            })
            .collect();
        PathSeq::new(target, steps)
    }

    /// Parses `d(a,b)*u(b,a)*i(a)` (rightmost factor walked first).
    pub fn parse(poset: &Poset, text: &str) -> Result<PathSeq, PathError> {
        let mut steps = Vec::new();
        for factor in text.split('*').rev() {
            let f = factor.trim();
            let bad = || PathError::Syntax(f.to_string());
            let (head, rest) = f.split_once('(').ok_or_else(bad)?;
            let inner = rest.strip_suffix(')').ok_or_else(bad)?;
            let args: Vec<&str> = inner.split(',').map(str::trim).collect();
            let step = match (head.trim(), args.as_slice()) {
                ("i", [a]) => Step::trivial(poset.elem(a)?),
                ("d", [lo, hi]) => Step::down(poset.elem(lo)?, poset.elem(hi)?),
                ("u", [hi, lo]) => Step::up(poset.elem(lo)?, poset.elem(hi)?),
                _ => return Err(bad()),
            };
            steps.push(step);
        }
        PathSeq::new(poset, steps)
    }

    pub fn display(&self, poset: &Poset) -> String {
        self.steps
            .iter()
            .rev()
            .map(|s| s.display(poset))
            .collect::<Vec<_>>()
            .join("*")
    }
}

impl fmt::Display for PathSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self.vertices().iter().map(|e| e.0.to_string()).collect();
        write!(f, "[{}]", v.join(" "))
    }
}

/// All trivial-free walks from `start` with exactly `len` steps, in
/// lexicographic order of their vertex sequences.
pub fn walks_from(poset: &Poset, start: Elem, len: usize) -> Vec<PathSeq> {
    let mut out = Vec::new();
    let mut stack = vec![start];
    fn go(poset: &Poset, stack: &mut Vec<Elem>, left: usize, out: &mut Vec<PathSeq>) {
        if left == 0 {
            out.push(PathSeq::from_vertices(poset, stack).expect("walk uses comparable pairs"));
            return;
        }
        let last = *stack.last().unwrap();
        for &n in poset.neighbors(last) {
            stack.push(n);
            go(poset, stack, left - 1, out);
            stack.pop();
        }
    }
    go(poset, &mut stack, len, &mut out);
    out
}

/// All trivial-free walks of at most `max_len` steps (length 0 is the trivial
/// path at each element).
pub fn all_walks(poset: &Poset, max_len: usize) -> Vec<PathSeq> {
    let mut out = Vec::new();
    for len in 0..=max_len {
        for a in poset.elements() {
            out.extend(walks_from(poset, a, len));
        }
    }
    out
}

/// Trivial-free loops at `base` with at most `max_len` steps.
pub fn loops_at(poset: &Poset, base: Elem, max_len: usize) -> Vec<PathSeq> {
    (0..=max_len)
        .flat_map(|len| walks_from(poset, base, len))
        .filter(|p| p.end() == base)
        .collect()
}
