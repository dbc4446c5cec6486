//! Exact operators on the truncated basis.

use std::collections::{BTreeMap, BTreeSet};

use num::{BigRational, One, Signed, Zero};
use serde::Serialize;

use crate::paths::PathSeq;

/// A partial injection on basis vectors, tagged with the path it implements
/// (`None` once composition has broken the path).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct BasisPartialMap {
    pub map: BTreeMap<usize, usize>,
    pub tag: Option<PathSeq>,
}

impl BasisPartialMap {
    pub fn zero() -> BasisPartialMap {
        BasisPartialMap {
            map: BTreeMap::new(),
            tag: None,
        }
    }

    pub fn identity_on(vectors: impl IntoIterator<Item = usize>, tag: Option<PathSeq>) -> Self {
        BasisPartialMap {
            map: vectors.into_iter().map(|v| (v, v)).collect(),
            tag,
        }
    }

    pub fn apply(&self, v: usize) -> Option<usize> {
        self.map.get(&v).copied()
    }

    /// `self` after `first`.
    pub fn compose(&self, first: &BasisPartialMap) -> BasisPartialMap {
        let map = first
            .map
            .iter()
            .filter_map(|(&x, y)| self.map.get(y).map(|&z| (x, z)))
            .collect();
        let tag = match (&first.tag, &self.tag) {
            (Some(f), Some(s)) => f.then(s),
            _ => None,
        };
        BasisPartialMap { map, tag }
    }

    pub fn adjoint(&self) -> BasisPartialMap {
        BasisPartialMap {
            map: self.map.iter().map(|(&x, &y)| (y, x)).collect(),
            tag: self.tag.as_ref().map(PathSeq::reverse),
        }
    }

    pub fn domain(&self) -> BTreeSet<usize> {
        self.map.keys().copied().collect()
    }

    pub fn range(&self) -> BTreeSet<usize> {
        self.map.values().copied().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.map.is_empty()
    }

    pub fn is_injective(&self) -> bool {
        self.range().len() == self.map.len()
    }

    /// Identity on its domain.
    pub fn is_projection(&self) -> bool {
        self.map.iter().all(|(x, y)| x == y)
    }

    pub fn restrict(&self, keep: &BTreeSet<usize>) -> BasisPartialMap {
        BasisPartialMap {
            map: self
                .map
                .iter()
                .filter(|(x, _)| keep.contains(x))
                .map(|(&x, &y)| (x, y))
                .collect(),
            tag: self.tag.clone(),
        }
    }

    /// First vector of `on` where the two maps differ (including definedness).
    pub fn disagreement(&self, other: &BasisPartialMap, on: &[usize]) -> Option<usize> {
        on.iter().copied().find(|&v| self.apply(v) != other.apply(v))
    }

    /// First vector of `on` where both are defined and differ.
    pub fn conflict(&self, other: &BasisPartialMap, on: &[usize]) -> Option<usize> {
        on.iter().copied().find(|&v| match (self.apply(v), other.apply(v)) {
            (Some(x), Some(y)) => x != y,
            _ => false,
        })
    }

    /// Whether `self <= other` as projections on `on`: wherever `self` is
    /// defined, `other` is defined too and agrees.
    pub fn below_on(&self, other: &BasisPartialMap, on: &[usize]) -> Option<usize> {
        on.iter().copied().find(|&v| match self.apply(v) {
            Some(x) => other.apply(v) != Some(x),
            None => false,
        })
    }
}

/// Exact sparse matrix on basis vector ids; `(row, col)` maps column vector
/// `col` to row vector `row`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SparseOp {
    #[serde(serialize_with = "serialize_entries")]
    pub entries: BTreeMap<(usize, usize), BigRational>,
}

fn serialize_entries<S: serde::Serializer>(
    entries: &BTreeMap<(usize, usize), BigRational>,
    s: S,
) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(entries.len()))?;
    for ((r, c), v) in entries {
        seq.serialize_element(&(r, c, v.to_string()))?;
    }
    seq.end()
}

impl SparseOp {
    pub fn zero() -> SparseOp {
        SparseOp::default()
    }

    pub fn from_partial(m: &BasisPartialMap, coeff: &BigRational) -> SparseOp {
        let mut out = SparseOp::zero();
        if !coeff.is_zero() {
            for (&c, &r) in &m.map {
                out.entries.insert((r, c), coeff.clone());
            }
        }
        out
    }

    pub fn get(&self, r: usize, c: usize) -> BigRational {
        self.entries.get(&(r, c)).cloned().unwrap_or_else(BigRational::zero)
    }

    fn insert_add(&mut self, key: (usize, usize), v: BigRational) {
        let e = self.entries.entry(key).or_insert_with(BigRational::zero);
        *e += v;
        if e.is_zero() {
            self.entries.remove(&key);
        }
    }

    pub fn add(&self, other: &SparseOp) -> SparseOp {
        let mut out = self.clone();
        for (&k, v) in &other.entries {
            out.insert_add(k, v.clone());
        }
        out
    }

    pub fn sub(&self, other: &SparseOp) -> SparseOp {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn scale(&self, s: &BigRational) -> SparseOp {
        if s.is_zero() {
            return SparseOp::zero();
        }
        SparseOp {
            entries: self.entries.iter().map(|(&k, v)| (k, v * s)).collect(),
        }
    }

    /// `self * other` (apply `other` first).
    pub fn mul(&self, other: &SparseOp) -> SparseOp {
        let mut by_row: BTreeMap<usize, Vec<(usize, &BigRational)>> = BTreeMap::new();
        for ((r, c), v) in &self.entries {
            by_row.entry(*c).or_default().push((*r, v));
        }
        let mut out = SparseOp::zero();
        for ((k, c), w) in &other.entries {
            if let Some(rows) = by_row.get(k) {
                for (r, v) in rows {
                    out.insert_add((*r, *c), *v * w);
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> SparseOp {
        SparseOp {
            entries: self.entries.iter().map(|(&(r, c), v)| ((c, r), v.clone())).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Keeps only the columns in `cols`.
    pub fn restrict_cols(&self, cols: &BTreeSet<usize>) -> SparseOp {
        SparseOp {
            entries: self
                .entries
                .iter()
                .filter(|((_, c), _)| cols.contains(c))
                .map(|(&k, v)| (k, v.clone()))
                .collect(),
        }
    }

    pub fn diagonal(vectors: impl IntoIterator<Item = usize>) -> SparseOp {
        SparseOp {
            entries: vectors.into_iter().map(|v| ((v, v), BigRational::one())).collect(),
        }
    }

    pub fn max_abs(&self) -> BigRational {
        self.entries
            .values()
            .map(|v| v.abs())
            .max()
            .unwrap_or_else(BigRational::zero)
    }
}

/// A finite linear combination of basis partial maps.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OperatorSum {
    pub terms: BTreeMap<BasisPartialMap, BigRational>,
}

impl OperatorSum {
    pub fn zero() -> OperatorSum {
        OperatorSum::default()
    }

    pub fn single(m: BasisPartialMap) -> OperatorSum {
        OperatorSum::term(m, BigRational::one())
    }

    pub fn term(m: BasisPartialMap, c: BigRational) -> OperatorSum {
        let mut s = OperatorSum::zero();
        s.push(m, c);
        s
    }

    pub fn push(&mut self, m: BasisPartialMap, c: BigRational) {
        if m.is_zero() || c.is_zero() {
            return;
        }
        let e = self.terms.entry(m.clone()).or_insert_with(BigRational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn add(&self, other: &OperatorSum) -> OperatorSum {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.push(m.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, s: &BigRational) -> OperatorSum {
        let mut out = OperatorSum::zero();
        for (m, c) in &self.terms {
            out.push(m.clone(), c * s);
        }
        out
    }

    /// `self * other` (apply `other` first).
    pub fn mul(&self, other: &OperatorSum) -> OperatorSum {
        let mut out = OperatorSum::zero();
        for (m, c) in &self.terms {
            for (n, d) in &other.terms {
                out.push(m.compose(n), c * d);
            }
        }
        out
    }

    pub fn adjoint(&self) -> OperatorSum {
        let mut out = OperatorSum::zero();
        for (m, c) in &self.terms {
            out.push(m.adjoint(), c.clone());
        }
        out
    }

    pub fn to_sparse(&self) -> SparseOp {
        self.terms
            .iter()
            .fold(SparseOp::zero(), |acc, (m, c)| acc.add(&SparseOp::from_partial(m, c)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pm(pairs: &[(usize, usize)]) -> BasisPartialMap {
        BasisPartialMap {
            map: pairs.iter().copied().collect(),
            tag: None,
        }
    }

    #[test]
    fn partial_map_algebra() {
        let a = pm(&[(0, 1), (1, 2)]);
        let b = pm(&[(1, 5), (2, 6)]);
        assert_eq!(b.compose(&a), pm(&[(0, 5), (1, 6)]));
        assert_eq!(a.adjoint().compose(&a), pm(&[(0, 0), (1, 1)]));
        assert!(a.adjoint().compose(&a).is_projection());
        assert_eq!(a.compose(&a.adjoint()).compose(&a), a);
    }

    #[test]
    fn sparse_matches_partial_composition() {
        let a = pm(&[(0, 1), (1, 2)]);
        let b = pm(&[(1, 5), (2, 6)]);
        let one = BigRational::one();
        let sa = SparseOp::from_partial(&a, &one);
        let sb = SparseOp::from_partial(&b, &one);
        assert_eq!(sb.mul(&sa), SparseOp::from_partial(&b.compose(&a), &one));
        assert_eq!(sa.adjoint(), SparseOp::from_partial(&a.adjoint(), &one));
        assert!(sa.sub(&sa).is_zero());
    }

    #[test]
    fn operator_sums_cancel() {
        let a = pm(&[(0, 1)]);
        let mut s = OperatorSum::single(a.clone());
        s.push(a, -BigRational::one());
        assert!(s.terms.is_empty());
    }
}
