//! The net of local algebras: connecting maps, the corona over maximal
//! directed blocks, and morphisms of nets with their induced maps.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{AlgebraError, CoronaError};
use crate::graded::{generated_samples, GradedElement, QMat};
use crate::homotopy::{AbelianInvariants, GroupoidModel};
use crate::net::{BasisPartialMap, BasisVec, SparseOp, TruncatedNet};
use crate::paths::{Equivalence, PathSeq, Step};
use crate::poset::{DirectedDecomposition, Elem, Poset};
use crate::report::Report;

/// The loop `down(a,b)`, then `p`, then `up(a,b)`, based at `b`.
pub fn conjugate_up(a: Elem, b: Elem, p: &PathSeq) -> PathSeq {
    PathSeq::single(Step::down(a, b))
        .then(p)
        .and_then(|x| x.then(&PathSeq::single(Step::up(a, b))))
        .expect("loop at a")
        .strip_trivial()
}

fn embedding(net: &TruncatedNet, a: Elem, b: Elem) -> QMat {
    if a == b {
        return QMat::identity(net.dim(a));
    }
    QMat::from_injection(net.dim(b), net.gamma(a, b).expect("comparable sites"))
}

/// `α_ba(x) = χ x χ*` for the upward step `a -> b`.
pub fn alpha_apply(net: &TruncatedNet, a: Elem, b: Elem, x: &GradedElement) -> Result<GradedElement, AlgebraError> {
    let poset = net.poset();
    if !poset.leq(a, b) {
        return Err(AlgebraError::NotComparable(
            poset.label(a).to_string(),
            poset.label(b).to_string(),
        ));
    }
    if x.base != a {
        return Err(AlgebraError::BasepointMismatch);
    }
    if a == b {
        return Ok(x.clone());
    }
    let g = embedding(net, a, b);
    let mut out = GradedElement::zero(net, b);
    for (p, m) in &x.parts {
        let part = GradedElement::monomial(net, b, &conjugate_up(a, b, p), g.mul(m).mul(&g.transpose()))?;
        out = out.add(&part)?;
    }
    Ok(out)
}

/// Generators of the loop group at `a` from the semigroup's model, rebased.
pub fn loop_generators(net: &TruncatedNet, a: Elem) -> Vec<PathSeq> {
    let model = GroupoidModel::new(net.poset(), Some(a));
    let sg = net.semigroup();
    let mut out: Vec<PathSeq> = Vec::new();
    for g in 0..model.ngens() {
        let l = sg.canonical(&model.generator_loop(net.poset(), g));
        if !l.is_empty() && !out.contains(&l) {
            out.push(l);
        }
    }
    out
}

/// Samples at `a`: generator cycles, adjoints, products of up to `max_word`
/// letters, and degree-zero projections.
pub fn site_samples(net: &TruncatedNet, a: Elem, max_word: usize) -> Result<Vec<GradedElement>, AlgebraError> {
    generated_samples(net, a, &loop_generators(net, a), max_word)
}

fn pairs(net: &TruncatedNet) -> Vec<(Elem, Elem)> {
    let p = net.poset();
    p.elements()
        .flat_map(|a| p.elements().map(move |b| (a, b)))
        .filter(|&(a, b)| a != b && p.leq(a, b))
        .collect()
}

/// Multiplicativity, adjoints, injectivity, composition and degree transport
/// of the connecting maps on generated samples.
pub fn verify_isotony(net: &TruncatedNet, max_word: usize) -> Result<Report, AlgebraError> {
    let poset = net.poset();
    let sg = net.semigroup();
    let mut samples: BTreeMap<Elem, Vec<GradedElement>> = BTreeMap::new();
    for a in poset.elements() {
        samples.insert(a, site_samples(net, a, max_word)?);
    }
    let name = |a: Elem, b: Elem| format!("{}<={}", poset.label(a), poset.label(b));
    let mut mult = Vec::new();
    let mut adj = Vec::new();
    let mut inj = Vec::new();
    let mut transport = Vec::new();
    let mut operator = Vec::new();
    let mut bijective = Vec::new();
    for (a, b) in pairs(net) {
        let xs = &samples[&a];
        let mut images = Vec::new();
        for x in xs {
            let ax = alpha_apply(net, a, b, x)?;
            if ax.is_zero() {
                inj.push(format!("{}: {}", name(a, b), x.display(net)));
            }
            if alpha_apply(net, a, b, &x.adjoint(net))? != ax.adjoint(net) {
                adj.push(format!("{}: {}", name(a, b), x.display(net)));
            }
            for p in x.parts.keys() {
                let q = sg.canonical(&conjugate_up(a, b, p));
                if !ax.parts.contains_key(&q) {
                    transport.push(format!("{}: {} -> {}", name(a, b), p.display(poset), q.display(poset)));
                }
            }
            for y in xs {
                let lhs = alpha_apply(net, a, b, &x.mul(net, y)?)?;
                let rhs = ax.mul(net, &alpha_apply(net, a, b, y)?)?;
                if lhs != rhs {
                    mult.push(format!("{}: {} · {}", name(a, b), x.display(net), y.display(net)));
                }
            }
            images.push(ax);
        }
        for (i, x) in images.iter().enumerate() {
            for (j, y) in images.iter().enumerate().skip(i + 1) {
                if x == y && xs[i] != xs[j] {
                    inj.push(format!("{}: {} and {} collide", name(a, b), xs[i].display(net), xs[j].display(net)));
                }
            }
        }
        // α of a generator cycle against the conjugated path operator
        for g in loop_generators(net, a) {
            let chi = GradedElement::cycle(net, &g)?;
            let conj = conjugate_up(a, b, &g);
            let cols: BTreeSet<usize> = net.interior_of_slice(b, conj.len()).into_iter().collect();
            let lhs = alpha_apply(net, a, b, &chi)?.materialize(net).restrict_cols(&cols);
            let rhs = SparseOp::from_partial(&net.chi_seq(&conj), &num::BigRational::from_integer(1.into()))
                .restrict_cols(&cols);
            if lhs != rhs {
                operator.push(format!("{}: {}", name(a, b), g.display(poset)));
            }
        }
        if net.all_gammas_bijective() {
            // α is then an isomorphism onto the target samples' span: the
            // inverse conjugation recovers every sample
            let back = embedding(net, a, b).transpose();
            for (x, ax) in xs.iter().zip(&images) {
                let mut rec = GradedElement::zero(net, a);
                for (q, m) in &ax.parts {
                    let p = sg.canonical(&conjugate_down(a, b, q));
                    rec = rec.add(&GradedElement::monomial(net, a, &p, back.mul(m).mul(&back.transpose()))?)?;
                }
                if rec != *x {
                    bijective.push(format!("{}: {}", name(a, b), x.display(net)));
                }
            }
        }
    }
    let mut compose = Vec::new();
    for (a, b) in pairs(net) {
        for c in poset.elements() {
            if c == b || !poset.leq(b, c) {
                continue;
            }
            for x in &samples[&a] {
                let direct = alpha_apply(net, a, c, x)?;
                let stepwise = alpha_apply(net, b, c, &alpha_apply(net, a, b, x)?)?;
                if direct != stepwise {
                    compose.push(format!(
                        "{}<={}<={}: {}",
                        poset.label(a),
                        poset.label(b),
                        poset.label(c),
                        x.display(net)
                    ));
                }
            }
        }
    }
    let mut identity = Vec::new();
    for a in poset.elements() {
        for x in &samples[&a] {
            if alpha_apply(net, a, a, x)? != *x {
                identity.push(x.display(net));
            }
        }
    }
    let mut r = Report::new();
    r.record("α_aa is the identity", identity);
    r.record("α is multiplicative", mult);
    r.record("α preserves adjoints", adj);
    r.record("α is injective on samples", inj);
    r.record("α transports degrees by conjugation", transport);
    r.record("α of a cycle is the conjugated path operator on interior vectors", operator);
    r.record("α_ca = α_cb α_ba", compose);
    if net.all_gammas_bijective() {
        r.record("α is invertible when all embeddings are bijective", bijective);
    } else {
        r.skip("α is invertible when all embeddings are bijective", "some embedding is not onto");
    }
    Ok(r)
}

/// The loop `up(a,b)`, then `q`, then `down(a,b)`, based at `a`.
pub fn conjugate_down(a: Elem, b: Elem, q: &PathSeq) -> PathSeq {
    PathSeq::single(Step::up(a, b))
        .then(q)
        .and_then(|x| x.then(&PathSeq::single(Step::down(a, b))))
        .expect("loop at b")
        .strip_trivial()
}

/// Colimit diagrams over the maximal directed blocks.
#[derive(Debug, Clone, Serialize)]
pub struct Corona {
    pub decomposition: DirectedDecomposition,
}

#[derive(Debug, Clone, Serialize)]
pub struct CoronaView {
    pub blocks: Vec<Vec<String>>,
    /// Connecting maps per block, as `lo<=hi` labels.
    pub diagrams: Vec<Vec<String>>,
}

pub fn build_corona(net: &TruncatedNet) -> Corona {
    Corona {
        decomposition: net.poset().maximal_directed_subsets(),
    }
}

impl Corona {
    pub fn blocks(&self) -> &[Vec<Elem>] {
        &self.decomposition.blocks
    }

    pub fn view(&self, poset: &Poset) -> CoronaView {
        CoronaView {
            blocks: self.decomposition.labelled(poset),
            diagrams: self
                .blocks()
                .iter()
                .map(|b| {
                    let mut edges = Vec::new();
                    for &x in b {
                        for &y in b {
                            if x != y && poset.leq(x, y) {
                                edges.push(format!("{}<={}", poset.label(x), poset.label(y)));
                            }
                        }
                    }
                    edges
                })
                .collect(),
        }
    }

    /// Least site of block `i` above both `a` and `b`.
    pub fn upper_site(&self, poset: &Poset, i: usize, a: Elem, b: Elem) -> Result<Elem, CoronaError> {
        let block = self
            .blocks()
            .get(i)
            .ok_or_else(|| CoronaError::NotInBlock(poset.label(a).to_string(), i))?;
        for x in [a, b] {
            if !block.contains(&x) {
                return Err(CoronaError::NotInBlock(poset.label(x).to_string(), i));
            }
        }
        block
            .iter()
            .copied()
            .find(|&c| poset.leq(a, c) && poset.leq(b, c))
            .ok_or_else(|| CoronaError::NotComparableInCorona(poset.label(a).to_string(), poset.label(b).to_string()))
    }

    /// Equality in the inductive limit of block `i`: push both elements to a
    /// common upper site and compare exactly.
    pub fn colimit_equal(
        &self,
        net: &TruncatedNet,
        i: usize,
        x: &GradedElement,
        y: &GradedElement,
    ) -> Result<bool, CoronaError> {
        let c = self.upper_site(net.poset(), i, x.base, y.base)?;
        Ok(alpha_apply(net, x.base, c, x)? == alpha_apply(net, y.base, c, y)?)
    }

    /// Like [`Corona::colimit_equal`] in the least block holding both sites.
    pub fn colimit_equal_any(&self, net: &TruncatedNet, x: &GradedElement, y: &GradedElement) -> Result<bool, CoronaError> {
        let poset = net.poset();
        let i = self
            .blocks()
            .iter()
            .position(|b| b.contains(&x.base) && b.contains(&y.base))
            .ok_or_else(|| {
                CoronaError::NotComparableInCorona(poset.label(x.base).to_string(), poset.label(y.base).to_string())
            })?;
        self.colimit_equal(net, i, x, y)
    }
}

/// Consistency of the colimit identification on generated samples.
pub fn verify_corona(net: &TruncatedNet, corona: &Corona, max_word: usize) -> Result<Report, CoronaError> {
    let poset = net.poset();
    let mut r = Report::new();
    let mut covered = Vec::new();
    for a in poset.elements() {
        if corona.decomposition.blocks_containing(a).is_empty() {
            covered.push(poset.label(a).to_string());
        }
    }
    r.record("every site lies in a block", covered);
    let mut directed = Vec::new();
    for (i, b) in corona.blocks().iter().enumerate() {
        if !poset.is_upward_directed(b) {
            directed.push(format!("block {i}"));
        }
    }
    r.record("blocks are upward directed", directed);
    let mut ident = Vec::new();
    let mut refl = Vec::new();
    let mut symm = Vec::new();
    for (i, block) in corona.blocks().iter().enumerate() {
        for &a in block {
            let xs = site_samples(net, a, max_word)?;
            for x in &xs {
                if !corona.colimit_equal(net, i, x, x)? {
                    refl.push(format!("block {i}: {}", x.display(net)));
                }
                for &b in block {
                    if a == b || !poset.leq(a, b) {
                        continue;
                    }
                    let ax = alpha_apply(net, a, b, x)?;
                    if !corona.colimit_equal(net, i, x, &ax)? {
                        ident.push(format!("block {i}: {} ~ α({})", x.display(net), poset.label(b)));
                    }
                    if corona.colimit_equal(net, i, x, &ax)? != corona.colimit_equal(net, i, &ax, x)? {
                        symm.push(format!("block {i}: {}", x.display(net)));
                    }
                }
            }
            // distinct samples at one site stay distinct in the limit
            for (j, x) in xs.iter().enumerate() {
                for y in xs.iter().skip(j + 1) {
                    if corona.colimit_equal(net, i, x, y)? {
                        refl.push(format!("block {i}: {} = {}", x.display(net), y.display(net)));
                    }
                }
            }
        }
    }
    r.record("x is identified with α_ba(x)", ident);
    r.record("colimit equality is reflexive and separates distinct samples", refl);
    r.record("colimit equality is symmetric", symm);
    Ok(r)
}

/// A morphism of nets of Hilbert spaces: a site map and, per site, an index
/// embedding `H_a -> H_φ(a)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetMorphism {
    pub phi: Vec<Elem>,
    pub maps: Vec<Vec<usize>>,
}

impl NetMorphism {
    pub fn identity(net: &TruncatedNet) -> NetMorphism {
        NetMorphism {
            phi: net.poset().elements().collect(),
            maps: net.dims().iter().map(|&d| (0..d).collect()).collect(),
        }
    }

    /// `other` after `self`.
    pub fn then(&self, other: &NetMorphism) -> NetMorphism {
        NetMorphism {
            phi: self.phi.iter().map(|a| other.phi[a.0]).collect(),
            maps: self
                .phi
                .iter()
                .zip(&self.maps)
                .map(|(a, m)| m.iter().map(|&i| other.maps[a.0][i]).collect())
                .collect(),
        }
    }

    pub fn map_path(&self, target: &Poset, p: &PathSeq) -> PathSeq {
        p.map_elements(target, |e| self.phi[e.0])
            .expect("monotone maps send steps to steps")
            .strip_trivial()
    }

    fn matrix(&self, dst: &TruncatedNet, a: Elem) -> QMat {
        QMat::from_injection(dst.dim(self.phi[a.0]), &self.maps[a.0])
    }

    pub fn all_bijective(&self, src: &TruncatedNet, dst: &TruncatedNet) -> bool {
        src.poset()
            .elements()
            .all(|a| self.maps[a.0].len() == dst.dim(self.phi[a.0]))
    }
}

/// Monotonicity, per-site injectivity and the intertwining square.
pub fn validate_hilbert_morphism(src: &TruncatedNet, dst: &TruncatedNet, m: &NetMorphism) -> Report {
    let k = src.poset();
    let l = dst.poset();
    let mut r = Report::new();
    if m.phi.len() != k.len() || m.maps.len() != k.len() || m.phi.iter().any(|e| e.0 >= l.len()) {
        r.fail("morphism covers every source site", "site map has the wrong shape");
        return r;
    }
    r.pass("morphism covers every source site");
    let mut mono = Vec::new();
    for a in k.elements() {
        for b in k.elements() {
            if k.leq(a, b) && !l.leq(m.phi[a.0], m.phi[b.0]) {
                mono.push(format!("{}<={}", k.label(a), k.label(b)));
            }
        }
    }
    r.record("site map is monotone", mono);
    let mut inj = Vec::new();
    for a in k.elements() {
        let img = &m.maps[a.0];
        let target = dst.dim(m.phi[a.0]);
        let distinct: BTreeSet<usize> = img.iter().copied().collect();
        if img.len() != src.dim(a) || distinct.len() != img.len() || img.iter().any(|&i| i >= target) {
            inj.push(format!("{}: {:?} into dimension {target}", k.label(a), img));
        }
    }
    let shapes_ok = inj.is_empty();
    r.record("each site map is an isometric embedding", inj);
    let mut square = Vec::new();
    if shapes_ok && r.all_passed() {
        for (a, b) in pairs(src) {
            let (fa, fb) = (m.phi[a.0], m.phi[b.0]);
            let g = src.gamma(a, b).expect("comparable");
            for n in 0..src.dim(a) {
                let left = m.maps[b.0][g[n]];
                let right = if fa == fb {
                    m.maps[a.0][n]
                } else {
                    dst.gamma(fa, fb).expect("comparable")[m.maps[a.0][n]]
                };
                if left != right {
                    square.push(format!("{}<={} at index {n}: {left} vs {right}", k.label(a), k.label(b)));
                }
            }
        }
        r.record("embeddings intertwine", square);
    } else {
        r.skip("embeddings intertwine", "site maps are malformed");
    }
    r
}

#[derive(Debug, Clone, Serialize)]
pub struct GroupMapReport {
    pub basepoint: String,
    pub source: AbelianInvariants,
    pub target: AbelianInvariants,
    /// Source generator loops and their images, as path text.
    pub generators: Vec<(String, String)>,
    /// Target generator exponents of each image.
    pub images: Vec<Vec<i64>>,
    pub trivial_images: Vec<bool>,
    pub injective_on_abelianization: bool,
    /// Source pairs known equivalent whose images were not found equivalent.
    pub broken_equivalences: Vec<String>,
}

/// `φ_*` on loop groups at `a`, read on generator loops.
pub fn induced_group_map(
    src: &TruncatedNet,
    dst: &TruncatedNet,
    m: &NetMorphism,
    a: Elem,
    budget: usize,
) -> GroupMapReport {
    let k = src.poset();
    let l = dst.poset();
    let fa = m.phi[a.0];
    let sm = GroupoidModel::new(k, Some(a));
    let tm = GroupoidModel::new(l, Some(fa));
    let mut generators = Vec::new();
    let mut images = Vec::new();
    let mut trivial = Vec::new();
    for g in 0..sm.ngens() {
        let loop_ = sm.generator_loop(k, g);
        let img = m.map_path(l, &loop_);
        images.push(tm.path_word(&img).exponents(tm.ngens()));
        trivial.push(dst.semigroup().equivalent(&img, &PathSeq::trivial(fa), budget) == Equivalence::Yes);
        generators.push((loop_.display(k), img.display(l)));
    }
    let injective = sm.abelian.map_is_injective(&tm.abelian, &images);
    let mut broken = Vec::new();
    let loops = crate::paths::loops_at(k, a, 4);
    for (i, p) in loops.iter().enumerate() {
        for q in loops.iter().skip(i + 1) {
            if src.semigroup().equivalent(p, q, budget) == Equivalence::Yes {
                let (mp, mq) = (m.map_path(l, p), m.map_path(l, q));
                if dst.semigroup().equivalent(&mp, &mq, budget) != Equivalence::Yes {
                    broken.push(format!("{} ~ {}", p.display(k), q.display(k)));
                }
            }
        }
    }
    GroupMapReport {
        basepoint: k.label(a).to_string(),
        source: AbelianInvariants {
            rank: sm.abelian.rank(),
            torsion: sm.abelian.torsion(),
        },
        target: AbelianInvariants {
            rank: tm.abelian.rank(),
            torsion: tm.abelian.torsion(),
        },
        generators,
        images,
        trivial_images: trivial,
        injective_on_abelianization: injective,
        broken_equivalences: broken,
    }
}

/// `Φ*`: `M ⊗ T_p` at `a` goes to `Φ_a M Φ_a* ⊗ T_φ(p)` at `φ(a)`.
pub fn induced_algebra_map(
    src: &TruncatedNet,
    dst: &TruncatedNet,
    m: &NetMorphism,
    x: &GradedElement,
) -> Result<GradedElement, AlgebraError> {
    let a = x.base;
    if a.0 >= src.poset().len() || x.dim != src.dim(a) {
        return Err(AlgebraError::BasepointMismatch);
    }
    let fa = m.phi[a.0];
    let f = m.matrix(dst, a);
    let mut out = GradedElement::zero(dst, fa);
    for (p, mat) in &x.parts {
        let part = GradedElement::monomial(dst, fa, &m.map_path(dst.poset(), p), f.mul(mat).mul(&f.transpose()))?;
        out = out.add(&part)?;
    }
    Ok(out)
}

/// `Φ ⊗ φ̂` on a basis vector: `e_n ⊗ e_q` goes to `e_Φ(n) ⊗ e_[φ(q)]`.
fn transport_vector(src: &TruncatedNet, dst: &TruncatedNet, m: &NetMorphism, v: usize) -> Option<usize> {
    let bv = src.vector(v);
    let q = m.map_path(dst.poset(), &src.classes()[bv.class]);
    dst.vector_id(BasisVec {
        site: m.phi[bv.site.0],
        index: m.maps[bv.site.0][bv.index],
        class: dst.class_id(&q)?,
    })
}

fn step_operator(net: &TruncatedNet, s: Step) -> BasisPartialMap {
    net.chi_seq(&PathSeq::single(s))
}

#[derive(Debug, Clone, Serialize)]
pub struct AlgebraMorphismReport {
    pub hypotheses_hold: bool,
    pub hypothesis_note: String,
    /// A nonzero source sample (or difference) sent to zero.
    pub kernel_witness: Option<String>,
}

/// The induced algebra morphism at every site: the intertwiner identity on
/// basis vectors, compatibility with α, degree transport, and faithfulness
/// on samples when the hypotheses hold.
pub fn verify_algebra_morphism(
    src: &TruncatedNet,
    dst: &TruncatedNet,
    m: &NetMorphism,
    max_word: usize,
    budget: usize,
) -> Result<(Report, AlgebraMorphismReport), CoronaError> {
    let valid = validate_hilbert_morphism(src, dst, m);
    if !valid.all_passed() {
        let why: Vec<String> = valid
            .failures()
            .map(|c| format!("{}: {}", c.name, c.witness.clone().unwrap_or_default()))
            .collect();
        return Err(CoronaError::MorphismInvalid(why.join("; ")));
    }
    if dst.budget() < src.budget() {
        return Err(CoronaError::MorphismInvalid(
            "target truncation is shorter than the source truncation".into(),
        ));
    }
    let k = src.poset();
    let l = dst.poset();
    let mut r = Report::new();

    // (Φ_b ⊗ φ̂) χ_a^b = χ_φ(a)^φ(b) (Φ_a ⊗ φ̂), and the same for the adjoint steps
    let mut hi = Vec::new();
    let interior = src.interior(1);
    for (a, b) in pairs(src) {
        for s in [Step::up(a, b), Step::down(a, b)] {
            let lhs_op = step_operator(src, s);
            let image_step = match s.kind {
                crate::paths::StepKind::Up => Step::up(m.phi[a.0], m.phi[b.0]),
                _ => Step::down(m.phi[a.0], m.phi[b.0]),
            };
            let rhs_op = step_operator(dst, image_step);
            for &v in &interior {
                let lhs = lhs_op.apply(v).and_then(|w| transport_vector(src, dst, m, w));
                let rhs = transport_vector(src, dst, m, v).and_then(|w| rhs_op.apply(w));
                if lhs != rhs {
                    hi.push(format!("{} on {}", s.display(k), src.describe(v)));
                }
            }
        }
    }
    r.record("(Φ⊗φ̂) intertwines the step operators on interior vectors", hi);

    let mut degree = Vec::new();
    let mut alpha = Vec::new();
    let mut homomorphism = Vec::new();
    let mut generator_rule = Vec::new();
    let bijective = m.all_bijective(src, dst);
    let mut injective_group = true;
    let mut kernel_witness = None;
    let mut faithful = Vec::new();
    for a in k.elements() {
        let fa = m.phi[a.0];
        let samples = site_samples(src, a, max_word)?;
        let images: Vec<GradedElement> = samples
            .iter()
            .map(|x| induced_algebra_map(src, dst, m, x))
            .collect::<Result<_, _>>()?;
        for (x, y) in samples.iter().zip(&images) {
            for (p, mat) in &x.parts {
                let q = dst.semigroup().canonical(&m.map_path(l, p));
                let single = GradedElement::monomial(src, a, p, mat.clone())?;
                let img = induced_algebra_map(src, dst, m, &single)?;
                if img.parts.keys().any(|d| *d != q) {
                    degree.push(format!("{} at {}", p.display(k), k.label(a)));
                }
            }
            if induced_algebra_map(src, dst, m, &x.adjoint(src))? != y.adjoint(dst) {
                homomorphism.push(format!("adjoint of {}", x.display(src)));
            }
        }
        for (i, x) in samples.iter().enumerate().take(16) {
            for (j, y) in samples.iter().enumerate().take(16) {
                let lhs = induced_algebra_map(src, dst, m, &x.mul(src, y)?)?;
                if lhs != images[i].mul(dst, &images[j])? {
                    homomorphism.push(format!("{} · {}", x.display(src), y.display(src)));
                }
            }
        }
        let gens = loop_generators(src, a);
        for g in &gens {
            let chi = GradedElement::cycle(src, g)?;
            for b in k.elements() {
                if b == a || !k.leq(a, b) {
                    continue;
                }
                let lhs = induced_algebra_map(src, dst, m, &alpha_apply(src, a, b, &chi)?)?;
                let rhs = alpha_apply(dst, fa, m.phi[b.0], &induced_algebra_map(src, dst, m, &chi)?)?;
                if lhs != rhs {
                    alpha.push(format!("{} along {}<={}", g.display(k), k.label(a), k.label(b)));
                }
            }
            if bijective {
                let img = m.map_path(l, g);
                let expected = if img.is_empty() {
                    GradedElement::monomial(dst, fa, &PathSeq::trivial(fa), QMat::from_map(dst.dim(fa), dst.dim(fa), &dst.local_map(&img)))?
                } else {
                    GradedElement::cycle(dst, &img)?
                };
                if induced_algebra_map(src, dst, m, &chi)? != expected {
                    generator_rule.push(g.display(k));
                }
            }
        }
        let group = induced_group_map(src, dst, m, a, budget);
        injective_group &= group.injective_on_abelianization;
        // faithfulness on samples and their pairwise differences
        for (i, x) in samples.iter().enumerate() {
            if images[i].is_zero() && !x.is_zero() {
                kernel_witness.get_or_insert_with(|| format!("{} -> 0", x.display(src)));
                faithful.push(x.display(src));
            }
            for (j, y) in samples.iter().enumerate().skip(i + 1) {
                if images[i] == images[j] && x != y {
                    kernel_witness.get_or_insert_with(|| {
                        format!("{} - {} -> 0 at {}", x.display(src), y.display(src), l.label(fa))
                    });
                    faithful.push(format!("{} vs {}", x.display(src), y.display(src)));
                }
            }
        }
    }
    r.record("Φ* sends degree p into degree φ(p)", degree);
    r.record("Φ* is a *-homomorphism on samples", homomorphism);
    r.record("Φ* α = α Φ* on generators", alpha);
    if bijective {
        r.record("Φ* sends the cycle of p to the cycle of φ(p)", generator_rule);
    } else {
        r.skip("Φ* sends the cycle of p to the cycle of φ(p)", "some site map is not onto");
    }
    let hypotheses = bijective && injective_group;
    let note = match (bijective, injective_group) {
        (true, true) => "site maps bijective and φ* injective on abelianizations".to_string(),
        (false, _) => "some site map is not onto".to_string(),
        (true, false) => "φ* is not injective on abelianizations".to_string(),
    };
    if hypotheses {
        r.record("Φ* is injective on samples", faithful);
    } else {
        r.skip("Φ* is injective on samples", note.clone());
        if !injective_group {
            r.check("a kernel witness exists when φ* is not injective", kernel_witness.is_some(), || {
                "no sample collapsed".to_string()
            });
        }
    }
    Ok((
        r,
        AlgebraMorphismReport {
            hypotheses_hold: hypotheses,
            hypothesis_note: note,
            kernel_witness,
        },
    ))
}

#[derive(Debug, Clone, Serialize)]
pub struct CoronaMorphism {
    /// Target block index for each source block.
    pub assignment: Vec<usize>,
    /// Source blocks with more than one containing target block.
    pub ambiguous: Vec<usize>,
}

/// Sends each source block to the least target block containing its image.
pub fn corona_morphism(
    m: &NetMorphism,
    source: &Corona,
    target: &Corona,
) -> Result<CoronaMorphism, CoronaError> {
    let mut assignment = Vec::new();
    let mut ambiguous = Vec::new();
    for (i, block) in source.blocks().iter().enumerate() {
        let image: BTreeSet<Elem> = block.iter().map(|a| m.phi[a.0]).collect();
        let hits: Vec<usize> = target
            .blocks()
            .iter()
            .enumerate()
            .filter(|(_, b)| image.iter().all(|x| b.contains(x)))
            .map(|(j, _)| j)
            .collect();
        let &j = hits.first().ok_or(CoronaError::NoContainingBlock(i))?;
        if hits.len() > 1 {
            ambiguous.push(i);
        }
        assignment.push(j);
    }
    Ok(CoronaMorphism { assignment, ambiguous })
}

/// Block-level compatibility: `Φ*` commutes with the colimit identification
/// inside each assigned pair of blocks.
pub fn verify_corona_morphism(
    src: &TruncatedNet,
    dst: &TruncatedNet,
    m: &NetMorphism,
    max_word: usize,
) -> Result<(Report, CoronaMorphism), CoronaError> {
    let ck = build_corona(src);
    let cl = build_corona(dst);
    let cm = corona_morphism(m, &ck, &cl)?;
    let k = src.poset();
    let mut compat = Vec::new();
    for (i, block) in ck.blocks().iter().enumerate() {
        let j = cm.assignment[i];
        for &a in block {
            for x in site_samples(src, a, max_word)? {
                let fx = induced_algebra_map(src, dst, m, &x)?;
                for &b in block {
                    if b == a || !k.leq(a, b) {
                        continue;
                    }
                    let ax = alpha_apply(src, a, b, &x)?;
                    let fax = induced_algebra_map(src, dst, m, &ax)?;
                    if !cl.colimit_equal(dst, j, &fx, &fax)? {
                        compat.push(format!("block {i}: {} at {}", x.display(src), k.label(a)));
                    }
                }
            }
        }
    }
    let mut r = Report::new();
    r.record("Φ* respects the colimit identification in each block", compat);
    Ok((r, cm))
}

#[derive(Debug, Clone, Serialize)]
pub struct ExampleSummary {
    pub source_invariants: AbelianInvariants,
    pub target_invariants: AbelianInvariants,
    pub generator: String,
    pub generator_degree: String,
    pub image_degree: String,
    pub image: String,
    pub kernel_witness: Option<String>,
}

pub fn crown2() -> Poset {
    Poset::new(
        &["a1", "a2", "b1", "b2"],
        &[("a1", "b1"), ("a1", "b2"), ("a2", "b1"), ("a2", "b2")],
    )
    .expect("valid poset")
}

pub fn crown2_top() -> Poset {
    Poset::new(
        &["a1", "a2", "b1", "b2", "t"],
        &[("a1", "b1"), ("a1", "b2"), ("a2", "b1"), ("a2", "b2"), ("b1", "t"), ("b2", "t")],
    )
    .expect("valid poset")
}

/// The crown `C₂` (a circle) included in the crown with a top (a disk):
/// the shift-like generator at `a1` becomes a projection, and `φ*` kills
/// the loop group.
pub fn example_scenario() -> (Report, ExampleSummary) {
    let src = TruncatedNet::identity(crown2(), 2, 4).expect("valid net");
    let dst = TruncatedNet::identity(crown2_top(), 2, 4).expect("valid net");
    let k = src.poset();
    let l = dst.poset();
    let m = NetMorphism {
        phi: k.elements().map(|a| l.elem(k.label(a)).expect("shared label")).collect(),
        maps: vec![vec![0, 1]; k.len()],
    };
    let a = k.elem("a1").expect("site");
    let mut r = Report::new();
    r.extend("morphism: ", validate_hilbert_morphism(&src, &dst, &m));
    let g = loop_generators(&src, a)
        .into_iter()
        .next()
        .expect("the crown has a loop");
    let chi = GradedElement::cycle(&src, &g).expect("loop at a1");
    let chi_op = chi.materialize(&src);
    let cols: BTreeSet<usize> = src.interior_of_slice(a, 2 * g.len()).into_iter().collect();
    r.check("source generator has nontrivial degree", !g.is_empty(), || g.display(k));
    let cubic = chi_op.mul(&chi_op.adjoint()).mul(&chi_op).restrict_cols(&cols);
    r.check(
        "source generator is a partial isometry on interior vectors",
        cubic == chi_op.restrict_cols(&cols),
        || "χχ*χ differs from χ".into(),
    );
    let square = chi_op.mul(&chi_op).restrict_cols(&cols);
    r.check(
        "source generator is not a projection",
        square != chi_op.restrict_cols(&cols) || chi_op != chi_op.adjoint(),
        || "χ = χ* = χ²".into(),
    );
    r.check(
        "source generator shifts every basis vector to a different one",
        chi_op.entries.keys().all(|(row, col)| row != col),
        || "some vector is fixed".into(),
    );
    let image = induced_algebra_map(&src, &dst, &m, &chi).expect("image");
    let fa = m.phi[a.0];
    let e = PathSeq::trivial(fa);
    r.check("image of the generator has trivial degree", image.degrees() == vec![&e], || image.display(&dst));
    let img_adj = image.adjoint(&dst);
    let img_sq = image.mul(&dst, &image).expect("same base");
    r.check(
        "image of the generator is a projection",
        img_adj == image && img_sq == image,
        || image.display(&dst),
    );
    let group = induced_group_map(&src, &dst, &m, a, 10_000);
    r.check(
        "source loop group abelianizes to Z",
        group.source.rank == 1 && group.source.torsion.is_empty(),
        || format!("{:?}", group.source),
    );
    r.check("target loop group abelianizes to 0", group.target.is_trivial(), || {
        format!("{:?}", group.target)
    });
    r.check(
        "induced group map sends every generator to 0",
        group.trivial_images.iter().all(|&t| t) && !group.injective_on_abelianization,
        || format!("{:?}", group.images),
    );
    // χ and its support projection χ*χ have the same image
    let support = chi.adjoint(&src).mul(&src, &chi).expect("same base");
    let diff = chi.sub(&support).expect("same base");
    let diff_img = induced_algebra_map(&src, &dst, &m, &diff).expect("image");
    r.check(
        "χ minus its support projection is a nonzero kernel element",
        !diff.is_zero() && diff_img.is_zero(),
        || diff_img.display(&dst),
    );
    let witness = (!diff.is_zero() && diff_img.is_zero()).then(|| format!("{} -> 0", diff.display(&src)));
    let summary = ExampleSummary {
        source_invariants: group.source.clone(),
        target_invariants: group.target.clone(),
        generator: g.display(k),
        generator_degree: src.semigroup().canonical(&g).display(k),
        image_degree: image.degrees().iter().map(|p| p.display(l)).collect::<Vec<_>>().join(","),
        image: image.display(&dst),
        kernel_witness: witness,
    };
    (r, summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn crown_net() -> TruncatedNet {
        TruncatedNet::from_labels(
            crown2(),
            &[("a1", 2), ("a2", 2), ("b1", 3), ("b2", 3)],
            &[
                ("a1", "b1", vec![0, 1]),
                ("a2", "b1", vec![1, 2]),
                ("a1", "b2", vec![0, 2]),
                ("a2", "b2", vec![2, 1]),
            ],
            4,
        )
        .unwrap()
    }

    fn cone_net() -> TruncatedNet {
        TruncatedNet::from_labels(
            crown2_top(),
            &[("a1", 2), ("a2", 2), ("b1", 3), ("b2", 3), ("t", 3)],
            &[
                ("a1", "b1", vec![0, 1]),
                ("a2", "b1", vec![1, 2]),
                ("a1", "b2", vec![0, 2]),
                ("a2", "b2", vec![2, 1]),
                ("b1", "t", vec![0, 1, 2]),
                ("b2", "t", vec![0, 2, 1]),
            ],
            4,
        )
        .unwrap()
    }

    fn inclusion(src: &TruncatedNet, dst: &TruncatedNet) -> NetMorphism {
        let k = src.poset();
        NetMorphism {
            phi: k.elements().map(|a| dst.poset().elem(k.label(a)).unwrap()).collect(),
            maps: k.elements().map(|a| (0..src.dim(a)).collect()).collect(),
        }
    }

    #[test]
    fn alpha_on_trivial_and_identity() {
        let n = crown_net();
        let a = n.poset().elem("a1").unwrap();
        let b = n.poset().elem("b1").unwrap();
        let unit = GradedElement::unit(&n, a);
        let img = alpha_apply(&n, a, b, &unit).unwrap();
        assert_eq!(img.degrees(), vec![&PathSeq::trivial(b)]);
        assert_eq!(alpha_apply(&n, a, a, &unit).unwrap(), unit);
        assert!(matches!(alpha_apply(&n, b, a, &unit), Err(AlgebraError::NotComparable(..))));
        assert_eq!(alpha_apply(&n, b, b, &unit), Err(AlgebraError::BasepointMismatch));
    }

    #[test]
    fn isotony_on_crown() {
        let r = verify_isotony(&crown_net(), 2).unwrap();
        assert!(r.all_passed(), "{r}");
    }

    #[test]
    fn crown_corona() {
        let n = crown_net();
        let c = build_corona(&n);
        assert_eq!(
            c.decomposition.labelled(n.poset()),
            vec![vec!["a1", "a2", "b1"], vec!["a1", "a2", "b2"]]
        );
        let b1 = n.poset().elem("b1").unwrap();
        let b2 = n.poset().elem("b2").unwrap();
        let x = GradedElement::unit(&n, b1);
        let y = GradedElement::unit(&n, b2);
        assert!(matches!(c.colimit_equal_any(&n, &x, &y), Err(CoronaError::NotComparableInCorona(..))));
        assert!(verify_corona(&n, &c, 2).unwrap().all_passed());
    }

    #[test]
    fn morphism_validation() {
        let (k, l) = (crown_net(), cone_net());
        let m = inclusion(&k, &l);
        assert!(validate_hilbert_morphism(&k, &l, &m).all_passed());
        assert!(validate_hilbert_morphism(&k, &k, &NetMorphism::identity(&k)).all_passed());
        let mut broken = m.clone();
        broken.maps[k.poset().elem("b1").unwrap().0] = vec![0, 2, 1];
        let r = validate_hilbert_morphism(&k, &l, &broken);
        assert!(!r.all_passed());
        assert!(r.failures().any(|c| c.name == "embeddings intertwine"));
    }

    #[test]
    fn crown_into_cone() {
        let (k, l) = (crown_net(), cone_net());
        let m = inclusion(&k, &l);
        let (r, info) = verify_algebra_morphism(&k, &l, &m, 2, 10_000).unwrap();
        assert!(r.all_passed(), "{r}");
        assert!(!info.hypotheses_hold);
        let g = induced_group_map(&k, &l, &m, k.poset().elem("a1").unwrap(), 10_000);
        assert_eq!(g.source.rank, 1);
        assert!(g.target.is_trivial());
        assert!(!g.injective_on_abelianization);
        let (cr, cm) = verify_corona_morphism(&k, &l, &m, 2).unwrap();
        assert!(cr.all_passed(), "{cr}");
        assert_eq!(cm.assignment, vec![0, 0]);
    }

    #[test]
    fn identity_morphism_is_faithful() {
        let k = crown_net();
        let m = NetMorphism::identity(&k);
        let (r, info) = verify_algebra_morphism(&k, &k, &m, 2, 10_000).unwrap();
        assert!(r.all_passed(), "{r}");
        assert!(info.hypotheses_hold);
        assert!(info.kernel_witness.is_none());
        let ck = build_corona(&k);
        assert_eq!(corona_morphism(&m, &ck, &ck).unwrap().assignment, vec![0, 1]);
    }

    #[test]
    fn example() {
        let (r, s) = example_scenario();
        assert!(r.all_passed(), "{r}");
        assert_eq!(s.image_degree, "i(a1)");
        assert!(s.kernel_witness.is_some());
    }
}
