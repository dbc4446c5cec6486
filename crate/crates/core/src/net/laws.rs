//! Exhaustive verification sweeps over a truncated net.
//!
//! Identities that hold exactly for the truncated partial injections are
//! checked on every basis vector; identities whose two sides truncate
//! differently are checked on interior vectors only.

use std::collections::{BTreeMap, BTreeSet};

use super::{cycle_join, BasisPartialMap, CycleOp, TruncatedNet};
use crate::paths::{all_walks, loops_at, PathSeq};
use crate::report::Report;

fn witness(net: &TruncatedNet, what: &str, v: usize) -> String {
    format!("{what}: {}", net.describe(v))
}

/// The four identities relating the isometries of comparable pairs and their
/// adjoints.
pub fn verify_chi_laws(net: &TruncatedNet) -> Report {
    let poset = net.poset();
    let lab = |e| poset.label(e);
    let mut composition = Vec::new();
    let mut adjoint_composition = Vec::new();
    for (a, b, c) in poset.triangles() {
        let ab = net.chi_step(a, b, false).unwrap();
        let bc = net.chi_step(b, c, false).unwrap();
        let ac = net.chi_step(a, c, false).unwrap();
        if let Some(v) = ac.disagreement(&bc.compose(&ab), &net.interior_of_slice(a, 2)) {
            composition.push(witness(net, &format!("{} <= {} <= {}", lab(a), lab(b), lab(c)), v));
        }
        let ab_s = ab.adjoint();
        let bc_s = bc.adjoint();
        let ac_s = net.chi_step(a, c, true).unwrap();
        if let Some(v) = ac_s.disagreement(&ab_s.compose(&bc_s), &net.interior_of_slice(c, 2)) {
            adjoint_composition.push(witness(net, &format!("{} <= {} <= {}", lab(a), lab(b), lab(c)), v));
        }
    }
    let mut isometry = Vec::new();
    let mut range_projection = Vec::new();
    let mut adjoint_is_inverse = Vec::new();
    for (a, b) in poset.comparability_edges() {
        let chi = net.chi_step(a, b, false).unwrap();
        let star = net.chi_step(a, b, true).unwrap();
        if star != chi.adjoint() {
            adjoint_is_inverse.push(format!("{} <= {}", lab(a), lab(b)));
        }
        let on_a = net.interior_of_slice(a, 2);
        let id = BasisPartialMap::identity_on(on_a.iter().copied(), None);
        if let Some(v) = star.compose(&chi).disagreement(&id, &on_a) {
            isometry.push(witness(net, &format!("{} <= {}", lab(a), lab(b)), v));
        }
        let image: BTreeSet<usize> = net.gamma(a, b).unwrap().iter().copied().collect();
        let on_b = net.interior_of_slice(b, 2);
        let proj = net.projection(b, &image);
        if let Some(v) = chi.compose(&star).disagreement(&proj, &on_b) {
            range_projection.push(witness(net, &format!("{} <= {}", lab(a), lab(b)), v));
        }
    }
    let mut r = Report::new();
    r.record("embeddings compose along chains", composition);
    r.record("adjoint embeddings compose in reverse", adjoint_composition);
    r.record("adjoint of an embedding is its partial inverse", adjoint_is_inverse);
    r.record("embedding followed by its adjoint is the identity", isometry);
    r.record("adjoint followed by embedding projects onto the image", range_projection);
    r
}

/// Representation laws for all walks of at most `max_len` steps: adjoint is
/// the reversed path, the factored form agrees with the step-by-step one,
/// and composites of paths are products of operators.
pub fn verify_representation(net: &TruncatedNet, max_len: usize) -> Report {
    let walks = all_walks(net.poset(), max_len);
    let ops: Vec<BasisPartialMap> = walks.iter().map(|p| net.chi_seq(p)).collect();
    let mut adjoint = Vec::new();
    let mut factored = Vec::new();
    let mut injective = Vec::new();
    for (p, chi) in walks.iter().zip(&ops) {
        let d = net.poset();
        if chi.adjoint().map != net.chi_seq(&p.reverse()).map {
            adjoint.push(p.display(d));
        }
        if !chi.is_injective() {
            injective.push(p.display(d));
        }
        let on = net.interior_of_slice(p.start(), p.len());
        if let Some(v) = chi.disagreement(&net.chi_factored(p), &on) {
            factored.push(format!("{}: {}", p.display(d), net.describe(v)));
        }
    }
    let mut product = Vec::new();
    for (q, cq) in walks.iter().zip(&ops) {
        for (p, cp) in walks.iter().zip(&ops) {
            if q.end() != p.start() || p.len() + q.len() > max_len {
                continue;
            }
            let pq = q.then(p).unwrap();
            let on = net.interior_of_slice(q.start(), pq.len());
            if let Some(v) = net.chi_seq(&pq).disagreement(&cp.compose(cq), &on) {
                product.push(format!("{}: {}", pq.display(net.poset()), net.describe(v)));
            }
        }
    }
    let mut r = Report::new();
    r.record("path operators are partial injections", injective);
    r.record("adjoint equals the operator of the reversed path", adjoint);
    r.record("step-by-step operator equals local map tensor path shift", factored);
    r.record("operator of a composite path is the product", product);
    r
}

/// Behaviour of equivalent sequences: the trivial path acts as the identity,
/// equivalent sequences agree where both act, and coincide when every
/// embedding is bijective.
pub fn verify_sequence_laws(net: &TruncatedNet, max_len: usize) -> Report {
    let poset = net.poset();
    let mut r = Report::new();
    let mut identity = Vec::new();
    for a in poset.elements() {
        let chi = net.chi_seq(&PathSeq::trivial(a));
        let id = BasisPartialMap::identity_on(net.slice(a).iter().copied(), None);
        if chi.map != id.map {
            identity.push(poset.label(a).to_string());
        }
    }
    r.record("trivial path acts as the identity on its slice", identity);

    let mut groups: BTreeMap<PathSeq, Vec<PathSeq>> = BTreeMap::new();
    for w in all_walks(poset, max_len) {
        groups.entry(net.semigroup().canonical(&w)).or_default().push(w);
    }
    let bijective = net.all_gammas_bijective();
    let mut agree = Vec::new();
    let mut identical = Vec::new();
    for members in groups.values() {
        let ops: Vec<BasisPartialMap> = members.iter().map(|p| net.chi_seq(p)).collect();
        for i in 0..members.len() {
            for j in (i + 1)..members.len() {
                let w = members[i].len().max(members[j].len());
                let on = net.interior_of_slice(members[i].start(), w);
                let pair = || format!("{} ~ {}", members[i].display(poset), members[j].display(poset));
                if let Some(v) = ops[i].conflict(&ops[j], &on) {
                    agree.push(format!("{}: {}", pair(), net.describe(v)));
                }
                if bijective {
                    if let Some(v) = ops[i].disagreement(&ops[j], &on) {
                        identical.push(format!("{}: {}", pair(), net.describe(v)));
                    }
                }
            }
        }
    }
    r.record("equivalent sequences agree on common domain", agree);
    if bijective {
        r.record("equivalent sequences coincide when embeddings are bijective", identical);
    } else {
        r.skip(
            "equivalent sequences coincide when embeddings are bijective",
            "some embedding is not surjective",
        );
    }
    r
}

/// The domain of a path is where its operator is nonzero on every interior
/// path vector.
pub fn verify_domains(net: &TruncatedNet, max_len: usize) -> Report {
    let mut bad = Vec::new();
    for p in all_walks(net.poset(), max_len) {
        let chi = net.chi_seq(&p);
        let on = net.interior_of_slice(p.start(), p.len());
        let mut seen: BTreeMap<usize, bool> = BTreeMap::new();
        for v in on {
            let e = seen.entry(net.vector(v).index).or_insert(true);
            *e &= chi.apply(v).is_some();
        }
        let from_chi: BTreeSet<usize> = seen.into_iter().filter(|(_, ok)| *ok).map(|(n, _)| n).collect();
        if from_chi != net.domain_of(&p).indices {
            bad.push(p.display(net.poset()));
        }
    }
    let mut r = Report::new();
    r.record("domain equals the support of the path operator", bad);
    r
}

/// Cycle identities for loops of at most `max_len` steps at every site;
/// pairwise identities use loops of at most `pair_len` steps.
pub fn verify_cycle_laws(net: &TruncatedNet, max_len: usize, pair_len: usize, budget: usize) -> Report {
    let poset = net.poset();
    let sg = net.semigroup();
    let mut regular = Vec::new();
    let mut support = Vec::new();
    let mut trivial_projection = Vec::new();
    let mut commute = Vec::new();
    let mut cross_projection = Vec::new();
    let mut relations = Vec::new();
    let mut joins = Vec::new();
    let mut directed = Vec::new();
    let is_directed = poset.is_directed();
    for a in poset.elements() {
        let loops = loops_at(poset, a, max_len);
        let ops: Vec<BasisPartialMap> = loops.iter().map(|p| net.chi_seq(p)).collect();
        let classes: Vec<PathSeq> = loops.iter().map(|p| sg.canonical(p)).collect();
        let trivial: Vec<bool> = loops
            .iter()
            .map(|p| sg.equivalent(p, &PathSeq::trivial(a), budget) == crate::paths::Equivalence::Yes)
            .collect();
        let all: Vec<usize> = net.slice(a).to_vec();
        for (i, p) in loops.iter().enumerate() {
            let chi = &ops[i];
            let star = chi.adjoint();
            let name = || p.display(poset);
            if chi.compose(&star).compose(chi).map != chi.map || star.compose(chi).compose(&star).map != star.map {
                regular.push(name());
            }
            let q = net.projection(a, &net.domain_of(p).indices);
            let on = net.interior_of_slice(a, p.len());
            if let Some(v) = star.compose(chi).disagreement(&q, &on) {
                support.push(format!("{}: {}", name(), net.describe(v)));
            }
            if trivial[i] {
                if let Some(v) = chi.disagreement(&q, &on) {
                    trivial_projection.push(format!("{}: {}", name(), net.describe(v)));
                }
            }
            if is_directed && !trivial[i] {
                directed.push(name());
            }
        }
        for i in 0..loops.len() {
            if loops[i].len() > pair_len {
                continue;
            }
            for j in 0..loops.len() {
                if loops[j].len() > pair_len {
                    continue;
                }
                let pair = || format!("{} , {}", loops[i].display(poset), loops[j].display(poset));
                if trivial[i] && trivial[j] && i < j {
                    let xy = ops[i].compose(&ops[j]);
                    let yx = ops[j].compose(&ops[i]);
                    if let Some(v) = xy.disagreement(&yx, &all) {
                        commute.push(format!("{}: {}", pair(), net.describe(v)));
                    }
                }
                if classes[i] != classes[j] {
                    continue;
                }
                let x = ops[i].adjoint().compose(&ops[j]);
                if !x.is_projection() {
                    cross_projection.push(pair());
                }
                let pp = ops[i].adjoint().compose(&ops[i]);
                let qq = ops[j].adjoint().compose(&ops[j]);
                if x.below_on(&qq, &all).is_some() || x.below_on(&pp, &all).is_some() {
                    relations.push(pair());
                }
                if i < j {
                    let cx = CycleOp::of(net, &loops[i]).unwrap();
                    let cy = CycleOp::of(net, &loops[j]).unwrap();
                    match cycle_join(net, &cx, &cy) {
                        Ok(jr) if jr.sum_matches && jr.partial_isometry && jr.support_identity => {}
                        Ok(jr) => joins.push(format!(
                            "{}: sum {} isometry {} support {}",
                            pair(),
                            jr.sum_matches,
                            jr.partial_isometry,
                            jr.support_identity
                        )),
                        Err(e) => joins.push(format!("{}: {e}", pair())),
                    }
                }
            }
        }
    }
    let mut r = Report::new();
    r.record("cycles are regular: x x* x = x and x* x x* = x*", regular);
    r.record("x* x is the domain projection tensor identity", support);
    r.record("trivial cycles are domain projections", trivial_projection);
    r.record("trivial cycles commute", commute);
    r.record("x* y is a projection for equivalent loops", cross_projection);
    r.record("x* y lies below x* x and y* y", relations);
    r.record("joins are partial isometries with the stated support", joins);
    if is_directed {
        r.record("on a directed poset every cycle is trivial", directed);
    } else {
        r.skip("on a directed poset every cycle is trivial", "poset is not directed");
    }
    r
}
