//! Truncated nets of Hilbert spaces and the partial isometries implementing
//! paths.
//!
//! Site `a` carries `H_a` with basis `0..dims(a)` and the path space spanned
//! by classes of paths ending at `a`. Only classes whose canonical
//! representative has at most `budget` steps are kept. An identity involving
//! `w` steps is therefore only meaningful on vectors whose path has at most
//! `budget - w` steps; those are the *interior* vectors for `w`.

mod cycles;
mod laws;
mod operators;

pub use cycles::{
    cycle_classify, cycle_join, cycle_order_leq, p_cycle, p_cycle_product_below, CycleClass,
    CycleOp, JoinResult, PCycle,
};
pub use laws::{
    verify_chi_laws, verify_cycle_laws, verify_domains, verify_representation,
    verify_sequence_laws,
};
pub use operators::{BasisPartialMap, OperatorSum, SparseOp};

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Mutex;

use serde::Serialize;

use crate::error::NetError;
use crate::paths::{all_walks, PathSemigroup, PathSeq, Step, StepKind};
use crate::poset::{Elem, Poset};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct BasisVec {
    pub site: Elem,
    pub index: usize,
    /// Index into [`TruncatedNet::classes`].
    pub class: usize,
}

/// Basis indices of `H_site` on which a path acts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DomainSubspace {
    pub site: Elem,
    pub indices: BTreeSet<usize>,
}

pub struct TruncatedNet {
    sg: PathSemigroup,
    dims: Vec<usize>,
    gamma: BTreeMap<(Elem, Elem), Vec<usize>>,
    budget: usize,
    classes: Vec<PathSeq>,
    class_ids: HashMap<PathSeq, usize>,
    vectors: Vec<BasisVec>,
    vector_ids: HashMap<BasisVec, usize>,
    slices: Vec<Vec<usize>>,
    step_cache: Mutex<HashMap<(usize, Step), Option<usize>>>,
}

impl std::fmt::Debug for TruncatedNet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TruncatedNet")
            .field("elements", &self.sg.poset().labels())
            .field("dims", &self.dims)
            .field("budget", &self.budget)
            .field("classes", &self.classes.len())
            .field("vectors", &self.vectors.len())
            .finish()
    }
}

impl Clone for TruncatedNet {
    fn clone(&self) -> Self {
        TruncatedNet::build(self.sg.clone(), self.dims.clone(), self.gamma.clone(), self.budget)
    }
}

impl TruncatedNet {
    /// `gamma` maps comparable pairs `(a, b)`, `a <= b`, to the image of each
    /// basis index of `H_a`. Pairs left out are composed from shorter ones;
    /// a missing pair with nothing in between is an error.
    pub fn new(
        poset: Poset,
        dims: Vec<usize>,
        mut gamma: BTreeMap<(Elem, Elem), Vec<usize>>,
        budget: usize,
    ) -> Result<TruncatedNet, NetError> {
        let lab = |e: Elem| poset.label(e).to_string();
        if dims.len() != poset.len() {
            let missing = poset.elements().nth(dims.len()).map(lab).unwrap_or_default();
            return Err(NetError::MissingDim(missing));
        }
        for a in poset.elements() {
            if dims[a.0] == 0 {
                return Err(NetError::ZeroDim(lab(a)));
            }
        }
        for (&(a, b), img) in &gamma {
            if !poset.leq(a, b) {
                return Err(NetError::NotComparable(lab(a), lab(b)));
            }
            if img.len() != dims[a.0] {
                return Err(NetError::BadGamma(
                    lab(a),
                    lab(b),
                    format!("expected {} entries, found {}", dims[a.0], img.len()),
                ));
            }
            if let Some(&bad) = img.iter().find(|&&i| i >= dims[b.0]) {
                return Err(NetError::BadGamma(
                    lab(a),
                    lab(b),
                    format!("index {bad} out of range for dimension {}", dims[b.0]),
                ));
            }
            if img.iter().collect::<BTreeSet<_>>().len() != img.len() {
                return Err(NetError::BadGamma(lab(a), lab(b), "not injective".into()));
            }
            if a == b && img.iter().enumerate().any(|(i, &j)| i != j) {
                return Err(NetError::BadGamma(lab(a), lab(b), "not the identity".into()));
            }
        }
        for a in poset.elements() {
            gamma.insert((a, a), (0..dims[a.0]).collect());
        }
        // fill in composites, shortest gaps first
        let mut pairs: Vec<(Elem, Elem)> = poset.comparability_edges();
        pairs.sort_by_key(|&(a, b)| {
            poset
                .elements()
                .filter(|&x| poset.leq(a, x) && poset.leq(x, b))
                .count()
        });
        for (a, c) in pairs {
            if gamma.contains_key(&(a, c)) {
                continue;
            }
            let mid = poset
                .elements()
                .find(|&b| poset.lt(a, b) && poset.lt(b, c) && gamma.contains_key(&(a, b)) && gamma.contains_key(&(b, c)));
            match mid {
                Some(b) => {
                    let ab = &gamma[&(a, b)];
                    let bc = &gamma[&(b, c)];
                    let img = ab.iter().map(|&i| bc[i]).collect();
                    gamma.insert((a, c), img);
                }
                None => return Err(NetError::MissingGamma(lab(a), lab(c))),
            }
        }
        for (a, b, c) in poset.triangles() {
            let ab = &gamma[&(a, b)];
            let bc = &gamma[&(b, c)];
            let ac = &gamma[&(a, c)];
            if ab.iter().map(|&i| bc[i]).ne(ac.iter().copied()) {
                return Err(NetError::GammaComposition(lab(a), lab(b), lab(c)));
            }
        }
        Ok(TruncatedNet::build(PathSemigroup::new(poset), dims, gamma, budget))
    }

    /// Every site gets dimension `dim` and every embedding is the identity.
    pub fn identity(poset: Poset, dim: usize, budget: usize) -> Result<TruncatedNet, NetError> {
        let dims = vec![dim; poset.len()];
        let gamma = poset
            .comparability_edges()
            .into_iter()
            .map(|e| (e, (0..dim).collect()))
            .collect();
        TruncatedNet::new(poset, dims, gamma, budget)
    }

    /// Convenience constructor from labels.
    pub fn from_labels(
        poset: Poset,
        dims: &[(&str, usize)],
        gamma: &[(&str, &str, Vec<usize>)],
        budget: usize,
    ) -> Result<TruncatedNet, NetError> {
        let mut d = vec![0; poset.len()];
        for &(l, n) in dims {
            d[poset.elem(l)?.0] = n;
        }
        if let Some(a) = poset.elements().find(|a| d[a.0] == 0) {
            return Err(NetError::MissingDim(poset.label(a).to_string()));
        }
        let mut g = BTreeMap::new();
        for (a, b, img) in gamma {
            g.insert((poset.elem(a)?, poset.elem(b)?), img.clone());
        }
        TruncatedNet::new(poset, d, g, budget)
    }

    /// The same net truncated at another budget.
    pub fn with_budget(&self, budget: usize) -> TruncatedNet {
        TruncatedNet::build(self.sg.clone(), self.dims.clone(), self.gamma.clone(), budget)
    }

    fn build(
        sg: PathSemigroup,
        dims: Vec<usize>,
        gamma: BTreeMap<(Elem, Elem), Vec<usize>>,
        budget: usize,
    ) -> TruncatedNet {
        let poset = sg.poset();
        let mut classes: BTreeSet<(Elem, usize, PathSeq)> = BTreeSet::new();
        for w in all_walks(poset, budget) {
            let c = sg.canonical(&w);
            classes.insert((c.end(), c.len(), c));
        }
        let classes: Vec<PathSeq> = classes.into_iter().map(|(_, _, c)| c).collect();
        let class_ids = classes.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
        let mut vectors = Vec::new();
        let mut slices = vec![Vec::new(); poset.len()];
        for (ci, c) in classes.iter().enumerate() {
            let site = c.end();
            for index in 0..dims[site.0] {
                slices[site.0].push(vectors.len());
                vectors.push(BasisVec {
                    site,
                    index,
                    class: ci,
                });
            }
        }
        let vector_ids = vectors.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        TruncatedNet {
            sg,
            dims,
            gamma,
            budget,
            classes,
            class_ids,
            vectors,
            vector_ids,
            slices,
            step_cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn poset(&self) -> &Poset {
        self.sg.poset()
    }

    pub fn semigroup(&self) -> &PathSemigroup {
        &self.sg
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn dim(&self, a: Elem) -> usize {
        self.dims[a.0]
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn gamma(&self, a: Elem, b: Elem) -> Option<&[usize]> {
        self.gamma.get(&(a, b)).map(Vec::as_slice)
    }

    pub fn gammas(&self) -> &BTreeMap<(Elem, Elem), Vec<usize>> {
        &self.gamma
    }

    pub fn all_gammas_bijective(&self) -> bool {
        self.gamma.iter().all(|(&(_, b), img)| img.len() == self.dims[b.0])
    }

    pub fn classes(&self) -> &[PathSeq] {
        &self.classes
    }

    /// Id of the class of `p`, if it lies inside the truncation.
    pub fn class_id(&self, p: &PathSeq) -> Option<usize> {
        self.class_ids.get(&self.sg.canonical(p)).copied()
    }

    pub fn vectors(&self) -> &[BasisVec] {
        &self.vectors
    }

    pub fn vector(&self, id: usize) -> BasisVec {
        self.vectors[id]
    }

    pub fn vector_id(&self, v: BasisVec) -> Option<usize> {
        self.vector_ids.get(&v).copied()
    }

    /// Basis vectors of `H_a ⊗ l²(S_a)`.
    pub fn slice(&self, a: Elem) -> &[usize] {
        &self.slices[a.0]
    }

    pub fn path_len(&self, id: usize) -> usize {
        self.classes[self.vectors[id].class].len()
    }

    /// Vectors whose path leaves room for `w` more steps.
    pub fn interior(&self, w: usize) -> Vec<usize> {
        if w > self.budget {
            return Vec::new();
        }
        (0..self.vectors.len())
            .filter(|&v| self.path_len(v) + w <= self.budget)
            .collect()
    }

    pub fn interior_of_slice(&self, a: Elem, w: usize) -> Vec<usize> {
        if w > self.budget {
            return Vec::new();
        }
        self.slices[a.0]
            .iter()
            .copied()
            .filter(|&v| self.path_len(v) + w <= self.budget)
            .collect()
    }

    pub fn describe(&self, id: usize) -> String {
        let v = self.vectors[id];
        format!(
            "{}[{}] ⊗ {}",
            self.poset().label(v.site),
            v.index,
            self.classes[v.class].display(self.poset())
        )
    }

    /// Class reached by walking `step` after class `class`.
    fn extend_class(&self, class: usize, step: Step) -> Option<usize> {
        if let Some(&r) = self.step_cache.lock().unwrap().get(&(class, step)) {
            return r;
        }
        let r = self.classes[class]
            .then(&PathSeq::single(step))
            .and_then(|p| self.class_id(&p));
        self.step_cache.lock().unwrap().insert((class, step), r);
        r
    }

    fn check_leq(&self, a: Elem, b: Elem) -> Result<(), NetError> {
        if self.poset().leq(a, b) {
            Ok(())
        } else {
            Err(NetError::NotComparable(
                self.poset().label(a).to_string(),
                self.poset().label(b).to_string(),
            ))
        }
    }

    /// The isometry lifting `H_a`-vectors to `H_b` and appending the upward
    /// step to their path; `starred` gives its adjoint.
    pub fn chi_step(&self, a: Elem, b: Elem, starred: bool) -> Result<BasisPartialMap, NetError> {
        self.check_leq(a, b)?;
        let g = &self.gamma[&(a, b)];
        let mut map = BTreeMap::new();
        if !starred {
            let step = Step::up(a, b);
            for &v in self.slice(a) {
                let bv = self.vectors[v];
                if let Some(c) = self.extend_class(bv.class, step) {
                    let target = BasisVec {
                        site: b,
                        index: g[bv.index],
                        class: c,
                    };
                    map.insert(v, self.vector_ids[&target]);
                }
            }
        } else {
            let step = Step::down(a, b);
            let inv: HashMap<usize, usize> = g.iter().enumerate().map(|(i, &j)| (j, i)).collect();
            for &v in self.slice(b) {
                let bv = self.vectors[v];
                let Some(&n) = inv.get(&bv.index) else {
                    continue;
                };
                if let Some(c) = self.extend_class(bv.class, step) {
                    let target = BasisVec {
                        site: a,
                        index: n,
                        class: c,
                    };
                    map.insert(v, self.vector_ids[&target]);
                }
            }
        }
        let tag = PathSeq::single(if starred { Step::down(a, b) } else { Step::up(a, b) });
        Ok(BasisPartialMap {
            map,
            tag: Some(tag),
        })
    }

    fn step_map(&self, s: Step) -> BasisPartialMap {
        match s.kind {
            StepKind::Trivial => {
                BasisPartialMap::identity_on(self.slice(s.lo).iter().copied(), Some(PathSeq::single(s)))
            }
            StepKind::Up => self.chi_step(s.lo, s.hi, false).expect("valid step"),
            StepKind::Down => self.chi_step(s.lo, s.hi, true).expect("valid step"),
        }
    }

    /// The partial isometry of a path, composed step by step.
    pub fn chi_seq(&self, p: &PathSeq) -> BasisPartialMap {
        let mut steps = p.steps().iter();
        let first = steps.next().expect("paths are nonempty");
        let mut m = self.step_map(*first);
        for &s in steps {
            m = self.step_map(s).compose(&m);
        }
        m.tag = Some(p.clone());
        m
    }

    /// The `H`-part of a path: embeddings along upward steps, their partial
    /// inverses along downward ones.
    pub fn local_map(&self, p: &PathSeq) -> BTreeMap<usize, usize> {
        let mut m: BTreeMap<usize, usize> = (0..self.dims[p.start().0]).map(|i| (i, i)).collect();
        for s in p.steps() {
            match s.kind {
                StepKind::Trivial => {}
                StepKind::Up => {
                    let g = &self.gamma[&(s.lo, s.hi)];
                    for v in m.values_mut() {
                        *v = g[*v];
                    }
                }
                StepKind::Down => {
                    let g = &self.gamma[&(s.lo, s.hi)];
                    let inv: HashMap<usize, usize> =
                        g.iter().enumerate().map(|(i, &j)| (j, i)).collect();
                    m = m
                        .into_iter()
                        .filter_map(|(k, v)| inv.get(&v).map(|&n| (k, n)))
                        .collect();
                }
            }
        }
        m
    }

    /// The path operator through its tensor decomposition: the local map on
    /// the `H` factor, the path shift on the other.
    pub fn chi_factored(&self, p: &PathSeq) -> BasisPartialMap {
        let u = self.local_map(p);
        let mut map = BTreeMap::new();
        for &v in self.slice(p.start()) {
            let bv = self.vectors[v];
            let Some(&n) = u.get(&bv.index) else {
                continue;
            };
            let Some(c) = self.classes[bv.class].then(p).and_then(|q| self.class_id(&q)) else {
                continue;
            };
            let target = BasisVec {
                site: p.end(),
                index: n,
                class: c,
            };
            map.insert(v, self.vector_ids[&target]);
        }
        BasisPartialMap {
            map,
            tag: Some(p.clone()),
        }
    }

    pub fn domain_of(&self, p: &PathSeq) -> DomainSubspace {
        DomainSubspace {
            site: p.start(),
            indices: self.local_map(p).into_keys().collect(),
        }
    }

    /// `Q ⊗ I` on the slice at `a`.
    pub fn projection(&self, a: Elem, q: &BTreeSet<usize>) -> BasisPartialMap {
        BasisPartialMap::identity_on(
            self.slice(a)
                .iter()
                .copied()
                .filter(|&v| q.contains(&self.vectors[v].index)),
            Some(PathSeq::trivial(a)),
        )
    }
}
