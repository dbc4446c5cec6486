//! Finite partially ordered sets.
//!
//! Elements are stored in label order, so `Elem(i)` is the `i`-th label in
//! lexicographic order. Everything downstream (spanning trees, enumerations,
//! reports) inherits its deterministic ordering from this.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::PosetError;

/// Default cap on the ground-set size for the exhaustive directed-subset search.
pub const DEFAULT_SEARCH_BOUND: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Elem(pub usize);

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poset {
    labels: Vec<String>,
    index: HashMap<String, Elem>,
    leq: Vec<Vec<bool>>,
    neighbors: Vec<Vec<Elem>>,
}

/// The JSON shape `{"elements": [...], "leq": [[lo, hi], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosetSpec {
    pub elements: Vec<String>,
    #[serde(default)]
    pub leq: Vec<(String, String)>,
}

impl Poset {
    /// Builds the reflexive-transitive closure of `pairs` over `elements`.
    pub fn new<S: AsRef<str>>(elements: &[S], pairs: &[(S, S)]) -> Result<Self, PosetError> {
        let mut labels: Vec<String> = elements.iter().map(|s| s.as_ref().to_string()).collect();
        let mut seen = BTreeSet::new();
        for l in &labels {
            if !seen.insert(l.clone()) {
                return Err(PosetError::DuplicateLabel(l.clone()));
            }
        }
        labels.sort();
        let index: HashMap<String, Elem> = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), Elem(i)))
            .collect();
        let n = labels.len();
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for (lo, hi) in pairs {
            let lo = *index
                .get(lo.as_ref())
                .ok_or_else(|| PosetError::UnknownElement(lo.as_ref().to_string()))?;
            let hi = *index
                .get(hi.as_ref())
                .ok_or_else(|| PosetError::UnknownElement(hi.as_ref().to_string()))?;
            leq[lo.0][hi.0] = true;
        }
        // Warshall
        for k in 0..n {
            for i in 0..n {
                if leq[i][k] {
                    for j in 0..n {
                        if leq[k][j] {
                            leq[i][j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if leq[i][j] && leq[j][i] {
                    return Err(PosetError::AntisymmetryViolation(
                        labels[i].clone(),
                        labels[j].clone(),
                    ));
                }
            }
        }
        let neighbors = (0..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| j != i && (leq[i][j] || leq[j][i]))
                    .map(Elem)
                    .collect()
            })
            .collect();
        Ok(Poset {
            labels,
            index,
            leq,
            neighbors,
        })
    }

    pub fn from_spec(spec: &PosetSpec) -> Result<Self, PosetError> {
        Poset::new(&spec.elements, &spec.leq)
    }

    /// Cover-free spec listing every strict relation of the closure.
    pub fn to_spec(&self) -> PosetSpec {
        let mut leq = Vec::new();
        for a in self.elements() {
            for b in self.elements() {
                if a != b && self.leq(a, b) {
                    leq.push((self.label(a).to_string(), self.label(b).to_string()));
                }
            }
        }
        PosetSpec {
            elements: self.labels.clone(),
            leq,
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + '_ {
        (0..self.labels.len()).map(Elem)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, e: Elem) -> &str {
        &self.labels[e.0]
    }

    pub fn elem(&self, label: &str) -> Result<Elem, PosetError> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| PosetError::UnknownElement(label.to_string()))
    }

    pub fn leq(&self, a: Elem, b: Elem) -> bool {
        self.leq[a.0][b.0]
    }

    pub fn lt(&self, a: Elem, b: Elem) -> bool {
        a != b && self.leq[a.0][b.0]
    }

    pub fn comparable(&self, a: Elem, b: Elem) -> bool {
        self.leq[a.0][b.0] || self.leq[b.0][a.0]
    }

    /// Elements comparable to `e` and distinct from it, in element order.
    pub fn neighbors(&self, e: Elem) -> &[Elem] {
        &self.neighbors[e.0]
    }

    /// Every pair in `sub` has an upper bound inside `sub`.
    pub fn is_upward_directed(&self, sub: &[Elem]) -> bool {
        sub.iter().all(|&x| {
            sub.iter()
                .all(|&y| sub.iter().any(|&c| self.leq(x, c) && self.leq(y, c)))
        })
    }

    pub fn is_upward_directed_labels<S: AsRef<str>>(&self, sub: &[S]) -> Result<bool, PosetError> {
        let sub = sub
            .iter()
            .map(|s| self.elem(s.as_ref()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(self.is_upward_directed(&sub))
    }

    pub fn is_directed(&self) -> bool {
        let all: Vec<Elem> = self.elements().collect();
        self.is_upward_directed(&all)
    }

    /// Connected components of the comparability graph, each sorted.
    pub fn components(&self) -> Vec<Vec<Elem>> {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![Elem(start)];
            let mut queue = VecDeque::from([Elem(start)]);
            while let Some(x) = queue.pop_front() {
                for &y in self.neighbors(x) {
                    if !seen[y.0] {
                        seen[y.0] = true;
                        comp.push(y);
                        queue.push_back(y);
                    }
                }
            }
            comp.sort();
            out.push(comp);
        }
        out
    }

    pub fn is_path_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// All comparable pairs `(lo, hi)` with `lo < hi`, sorted.
    pub fn comparability_edges(&self) -> Vec<(Elem, Elem)> {
        let mut out = Vec::new();
        for a in self.elements() {
            for b in self.elements() {
                if self.lt(a, b) {
                    out.push((a, b));
                }
            }
        }
        out.sort();
        out
    }

    /// Chains `x < y < z` of three distinct elements.
    pub fn triangles(&self) -> Vec<(Elem, Elem, Elem)> {
        let mut out = Vec::new();
        for x in self.elements() {
            for y in self.elements() {
                if !self.lt(x, y) {
                    continue;
                }
                for z in self.elements() {
                    if self.lt(y, z) {
                        out.push((x, y, z));
                    }
                }
            }
        }
        out
    }

    pub fn maximal_elements(&self) -> Vec<Elem> {
        self.elements()
            .filter(|&m| self.elements().all(|x| !self.lt(m, x)))
            .collect()
    }

    pub fn down_set(&self, m: Elem) -> Vec<Elem> {
        self.elements().filter(|&x| self.leq(x, m)).collect()
    }

    /// Maximal upward-directed subsets.
    ///
    /// A finite directed set contains an upper bound of all its members, so
    /// the maximal ones are exactly the principal down-sets of the maximal
    /// elements.
    pub fn maximal_directed_subsets(&self) -> DirectedDecomposition {
        DirectedDecomposition::normalized(
            self.maximal_elements()
                .into_iter()
                .map(|m| self.down_set(m))
                .collect(),
        )
    }

    /// Same result as [`Poset::maximal_directed_subsets`], found by brute
    /// force over all subsets. Refuses posets larger than `bound`.
    pub fn maximal_directed_subsets_exhaustive(
        &self,
        bound: usize,
    ) -> Result<DirectedDecomposition, PosetError> {
        let n = self.len();
        if n > bound || n >= 64 {
            return Err(PosetError::SizeBound { size: n, bound });
        }
        // upper[x][y]: bitmask of common upper bounds of x and y
        let mut upper = vec![vec![0u64; n]; n];
        for x in 0..n {
            for y in 0..n {
                for c in 0..n {
                    if self.leq[x][c] && self.leq[y][c] {
                        upper[x][y] |= 1 << c;
                    }
                }
            }
        }
        let members = |mask: u64| (0..n).filter(move |i| mask >> i & 1 == 1);
        let mut directed = Vec::new();
        for mask in 1u64..(1u64 << n) {
            let ok = members(mask).all(|x| members(mask).all(|y| upper[x][y] & mask != 0));
            if ok {
                directed.push(mask);
            }
        }
        directed.sort_by_key(|m| std::cmp::Reverse(m.count_ones()));
        let mut maximal: Vec<u64> = Vec::new();
        for m in directed {
            if maximal.iter().all(|&big| m & big != m) {
                maximal.push(m);
            }
        }
        Ok(DirectedDecomposition::normalized(
            maximal
                .into_iter()
                .map(|m| members(m).map(Elem).collect())
                .collect(),
        ))
    }
}

/// The covering of a poset by its maximal upward-directed subsets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DirectedDecomposition {
    pub blocks: Vec<Vec<Elem>>,
}

impl DirectedDecomposition {
    fn normalized(mut blocks: Vec<Vec<Elem>>) -> Self {
        for b in &mut blocks {
            b.sort();
            b.dedup();
        }
        blocks.sort();
        blocks.dedup();
        DirectedDecomposition { blocks }
    }

    /// Indices of blocks containing `e`.
    pub fn blocks_containing(&self, e: Elem) -> Vec<usize> {
        self.blocks
            .iter()
            .enumerate()
            .filter(|(_, b)| b.contains(&e))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn labelled(&self, poset: &Poset) -> Vec<Vec<String>> {
        self.blocks
            .iter()
            .map(|b| b.iter().map(|&e| poset.label(e).to_string()).collect())
            .collect()
    }
}
