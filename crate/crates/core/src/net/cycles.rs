//! Cycles (path operators of loops), their order, joins and class joins.

use std::collections::{BTreeMap, BTreeSet};

use num::{BigRational, One};
use serde::Serialize;

use super::{BasisPartialMap, OperatorSum, SparseOp, TruncatedNet};
use crate::error::NetError;
use crate::paths::{loops_at, Equivalence, PathClass, PathSeq};
use crate::poset::Elem;

/// A cycle in factored form: a partial injection `u` on the basis of
/// `H_base` tensored with the shift by `degree`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CycleOp {
    pub base: Elem,
    pub u: BTreeMap<usize, usize>,
    /// Canonical representative of the loop class.
    pub degree: PathSeq,
}

impl CycleOp {
    pub fn of(net: &TruncatedNet, p: &PathSeq) -> Result<CycleOp, NetError> {
        if !p.is_loop() {
            return Err(NetError::NotALoop);
        }
        Ok(CycleOp {
            base: p.start(),
            u: net.local_map(p),
            degree: net.semigroup().canonical(p),
        })
    }

    pub fn domain(&self) -> BTreeSet<usize> {
        self.u.keys().copied().collect()
    }

    pub fn is_injective(&self) -> bool {
        self.u.values().collect::<BTreeSet<_>>().len() == self.u.len()
    }

    /// The operator on the truncated basis.
    pub fn to_partial(&self, net: &TruncatedNet) -> BasisPartialMap {
        let mut map = BTreeMap::new();
        for &v in net.slice(self.base) {
            let bv = net.vector(v);
            let Some(&n) = self.u.get(&bv.index) else {
                continue;
            };
            let Some(c) = net.classes()[bv.class]
                .then(&self.degree)
                .and_then(|q| net.class_id(&q))
            else {
                continue;
            };
            let target = super::BasisVec {
                site: self.base,
                index: n,
                class: c,
            };
            map.insert(v, net.vector_id(target).expect("target in truncation"));
        }
        BasisPartialMap {
            map,
            tag: Some(self.degree.clone()),
        }
    }

    /// Composite `self` after `first`.
    pub fn compose(&self, net: &TruncatedNet, first: &CycleOp) -> CycleOp {
        let u = first
            .u
            .iter()
            .filter_map(|(&x, y)| self.u.get(y).map(|&z| (x, z)))
            .collect();
        let degree = first.degree.then(&self.degree).expect("same base");
        CycleOp {
            base: self.base,
            u,
            degree: net.semigroup().canonical(&degree),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CycleClass {
    pub equivalence_to_trivial: Equivalence,
    pub trivial: bool,
    pub degree: PathSeq,
    pub domain: BTreeSet<usize>,
    pub domain_dim: usize,
    /// For trivial cycles: whether the operator equals `Q ⊗ I` on interior
    /// vectors.
    pub projection_verified: Option<bool>,
    /// Least `m` with vanishing `m`-th power, if any.
    pub nilpotent_at: Option<usize>,
}

pub fn cycle_classify(net: &TruncatedNet, p: &PathSeq, budget: usize) -> Result<CycleClass, NetError> {
    let c = CycleOp::of(net, p)?;
    let a = c.base;
    let eq = net.semigroup().equivalent(p, &PathSeq::trivial(a), budget);
    let trivial = eq == Equivalence::Yes;
    let domain = c.domain();
    let projection_verified = trivial.then(|| {
        let chi = net.chi_seq(p);
        let q = net.projection(a, &domain);
        chi.disagreement(&q, &net.interior_of_slice(a, p.len())).is_none()
    });
    // a nilpotent partial injection on d points vanishes by its d-th power
    let mut power = c.u.clone();
    let mut nilpotent_at = None;
    for m in 1..=net.dim(a) {
        if power.is_empty() {
            nilpotent_at = Some(m);
            break;
        }
        power = power
            .iter()
            .filter_map(|(&x, y)| c.u.get(y).map(|&z| (x, z)))
            .collect();
    }
    Ok(CycleClass {
        equivalence_to_trivial: eq,
        trivial,
        degree: c.degree.clone(),
        domain_dim: domain.len(),
        domain,
        projection_verified,
        nilpotent_at,
    })
}

fn same_class(net: &TruncatedNet, x: &CycleOp, y: &CycleOp) -> Result<(), NetError> {
    if x.base == y.base
        && (x.degree == y.degree
            || net.semigroup().equivalent(&x.degree, &y.degree, 10_000) == Equivalence::Yes)
    {
        Ok(())
    } else {
        Err(NetError::NotComparableCycles)
    }
}

/// `x <= y` for cycles over equivalent loops: domain containment.
pub fn cycle_order_leq(net: &TruncatedNet, x: &CycleOp, y: &CycleOp) -> Result<bool, NetError> {
    same_class(net, x, y)?;
    Ok(x.domain().is_subset(&y.domain()))
}

#[derive(Debug, Clone)]
pub struct JoinResult {
    pub join: CycleOp,
    pub disjoint: bool,
    /// The defining sum: `x + y` or `x + y ((Q_y - Q) ⊗ I)`.
    pub sum: OperatorSum,
    pub sum_matches: bool,
    pub partial_isometry: bool,
    /// `J* J = Q̂ ⊗ I` with `Q̂ = Q_x + (Q_y - Q)` on interior vectors.
    pub support_identity: bool,
}

pub fn cycle_join(net: &TruncatedNet, x: &CycleOp, y: &CycleOp) -> Result<JoinResult, NetError> {
    same_class(net, x, y)?;
    let a = x.base;
    let qx = x.domain();
    let qy = y.domain();
    let q: BTreeSet<usize> = qx.intersection(&qy).copied().collect();
    let mut u = x.u.clone();
    for (&k, &v) in &y.u {
        u.entry(k).or_insert(v);
    }
    let join = CycleOp {
        base: a,
        u,
        degree: x.degree.clone(),
    };
    let px = x.to_partial(net);
    let py = y.to_partial(net);
    let one = BigRational::one();
    let mut sum = OperatorSum::single(px);
    if q.is_empty() {
        sum.push(py, one);
    } else {
        sum.push(py.compose(&net.projection(a, &qy)), one.clone());
        sum.push(py.compose(&net.projection(a, &q)), -one);
    }
    let pj = join.to_partial(net);
    let sj = SparseOp::from_partial(&pj, &BigRational::one());
    let sum_matches = sum.to_sparse() == sj;
    let partial_isometry = join.is_injective() && sj.mul(&sj.adjoint()).mul(&sj) == sj;
    let q_hat: BTreeSet<usize> = qx.union(&qy).copied().collect();
    let interior: BTreeSet<usize> = net
        .interior_of_slice(a, join.degree.len())
        .into_iter()
        .collect();
    let support = sj.adjoint().mul(&sj).restrict_cols(&interior);
    let expected = SparseOp::from_partial(&net.projection(a, &q_hat), &BigRational::one())
        .restrict_cols(&interior);
    Ok(JoinResult {
        disjoint: q.is_empty(),
        join,
        sum,
        sum_matches,
        partial_isometry,
        support_identity: support == expected,
    })
}

/// Join of the cycles of every loop in class `p` with at most `len_budget`
/// steps (the canonical representative is always included).
#[derive(Debug, Clone, Serialize)]
pub struct PCycle {
    pub op: CycleOp,
    pub members: Vec<PathSeq>,
    /// Least length bound at which the domain reached its final value.
    pub stabilized_at: usize,
}

pub fn p_cycle(net: &TruncatedNet, p: &PathClass, len_budget: usize) -> Result<PCycle, NetError> {
    let sg = net.semigroup();
    if !sg.decides_classes() {
        return Err(NetError::NotCertified);
    }
    let rep = p.repr().ok_or(NetError::NotALoop)?;
    if !rep.is_loop() {
        return Err(NetError::NotALoop);
    }
    let mut members = vec![rep.clone()];
    for l in loops_at(net.poset(), rep.start(), len_budget) {
        if l != *rep && sg.canonical(&l) == *rep {
            members.push(l);
        }
    }
    let mut op = CycleOp::of(net, rep)?;
    let mut stabilized_at = rep.len();
    for m in &members[1..] {
        let before = op.u.len();
        let c = CycleOp::of(net, m)?;
        for (&k, &v) in &c.u {
            op.u.entry(k).or_insert(v);
        }
        if op.u.len() > before {
            stabilized_at = stabilized_at.max(m.len());
        }
    }
    Ok(PCycle {
        op,
        members,
        stabilized_at,
    })
}

/// `χ_p χ_q <= χ_{p*q}` for class joins: returns the first basis index of
/// `H_a` where the product is defined but the class join disagrees.
pub fn p_cycle_product_below(
    net: &TruncatedNet,
    p: &PathClass,
    q: &PathClass,
    len_budget: usize,
) -> Result<Option<usize>, NetError> {
    let cp = p_cycle(net, p, len_budget)?;
    let cq = p_cycle(net, q, len_budget)?;
    let pq = net.semigroup().concat(p, q);
    let cpq = p_cycle(net, &pq, 2 * len_budget)?;
    let prod = cp.op.compose(net, &cq.op);
    Ok(prod
        .u
        .iter()
        .find(|(k, v)| cpq.op.u.get(k) != Some(v))
        .map(|(&k, _)| k))
}
