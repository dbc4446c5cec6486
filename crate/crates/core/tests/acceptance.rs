//! Acceptance battery: eight criteria, one line each, each backed by an
//! oracle that does not go through the code it checks.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::process::ExitCode;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use num::BigRational;
use posetnet::algebra_net::{build_corona, example_scenario, induced_group_map, loop_generators, verify_algebra_morphism};
use posetnet::fixtures;
use posetnet::graded::{generated_samples, norm_estimate, GradedElement};
use posetnet::homotopy::{abelianization, loop_group_presentation};
use posetnet::net::{BasisPartialMap, TruncatedNet};
use posetnet::paths::{loops_at, Equivalence, PathSemigroup, PathSeq};
use posetnet::suite::{self, SuiteOptions};
use posetnet::{Elem, Poset, Report};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-9;

struct Outcome {
    passed: bool,
    detail: String,
}

fn from_report(r: &Report, extra: &str) -> Outcome {
    let failures: Vec<String> = r
        .failures()
        .take(3)
        .map(|c| format!("{} ({})", c.name, c.witness.clone().unwrap_or_default()))
        .collect();
    Outcome {
        passed: r.all_passed(),
        detail: if failures.is_empty() {
            format!("{} checks{extra}", r.checks.len())
        } else {
            failures.join("; ")
        },
    }
}

fn merge(outcomes: Vec<Outcome>) -> Outcome {
    Outcome {
        passed: outcomes.iter().all(|o| o.passed),
        detail: outcomes.iter().map(|o| o.detail.as_str()).collect::<Vec<_>>().join(" | "),
    }
}

// ---- walks as vertex sequences, built from the order relation only ----

fn vertex_walks(p: &Poset, max_len: usize) -> Vec<Vec<Elem>> {
    let mut out: Vec<Vec<Elem>> = p.elements().map(|a| vec![a]).collect();
    let mut layer = out.clone();
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            let last = *w.last().unwrap();
            for b in p.elements() {
                if b != last && p.comparable(last, b) {
                    let mut v = w.clone();
                    v.push(b);
                    next.push(v);
                }
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// One-step simplifications: drop a backtrack `x y x -> x`, or the middle
/// of a monotone chain `x <= y <= z` (either direction).
fn simplifications(p: &Poset, w: &[Elem]) -> Vec<Vec<Elem>> {
    let mut out = Vec::new();
    for i in 1..w.len().saturating_sub(1) {
        let (x, y, z) = (w[i - 1], w[i], w[i + 1]);
        if x == z {
            let mut v = w[..i].to_vec();
            v.extend_from_slice(&w[i + 2..]);
            out.push(v);
        } else if (p.leq(x, y) && p.leq(y, z)) || (p.leq(z, y) && p.leq(y, x)) {
            let mut v = w[..i].to_vec();
            v.extend_from_slice(&w[i + 1..]);
            out.push(v);
        }
    }
    out
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

fn rewriting_oracle(name: &str) -> Outcome {
    let p = fixtures::poset(name);
    let sg = PathSemigroup::new(p.clone());
    let walks = vertex_walks(&p, 7);
    let index: HashMap<&Vec<Elem>, usize> = walks.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let mut parent: Vec<usize> = (0..walks.len()).collect();
    for (i, w) in walks.iter().enumerate() {
        for s in simplifications(&p, w) {
            let j = index[&s];
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            parent[ri] = rj;
        }
    }
    let short: Vec<usize> = (0..walks.len()).filter(|&i| walks[i].len() <= 6).collect();
    let seqs: Vec<PathSeq> = short
        .iter()
        .map(|&i| PathSeq::from_vertices(&p, &walks[i]).expect("comparable steps"))
        .collect();
    let (mut pairs, mut unknown, mut wrong) = (0usize, 0usize, Vec::new());
    for x in 0..short.len() {
        for y in x..short.len() {
            let (wx, wy) = (&walks[short[x]], &walks[short[y]]);
            if wx[0] != wy[0] || wx.last() != wy.last() {
                continue;
            }
            pairs += 1;
            let same = find(&mut parent, short[x]) == find(&mut parent, short[y]);
            match sg.equivalent(&seqs[x], &seqs[y], 20_000) {
                Equivalence::Unknown => unknown += 1,
                Equivalence::Yes if !same => wrong.push(format!("{:?}~{:?}", wx, wy)),
                Equivalence::No if same => wrong.push(format!("{:?}!~{:?}", wx, wy)),
                _ => {}
            }
        }
    }
    Outcome {
        passed: unknown == 0 && wrong.is_empty(),
        detail: format!(
            "{name}: {pairs} pairs, {unknown} unknown, {} disagreements{}",
            wrong.len(),
            wrong.first().map(|w| format!(" e.g. {w}")).unwrap_or_default()
        ),
    }
}

fn criterion_1() -> Outcome {
    merge(["chain", "crown2", "crown3", "crown2_top"].iter().map(|n| rewriting_oracle(n)).collect())
}

// ---- first homology of the order complex over F_p ----

fn rank_mod(mut rows: Vec<Vec<i64>>, prime: i64) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows.len()).find(|&r| rows[r][c].rem_euclid(prime) != 0) else {
            continue;
        };
        rows.swap(rank, piv);
        let inv = (1..prime).find(|&k| (rows[rank][c] * k).rem_euclid(prime) == 1).unwrap();
        for x in rows[rank].iter_mut() {
            *x = (*x * inv).rem_euclid(prime);
        }
        for r in 0..rows.len() {
            if r != rank && rows[r][c].rem_euclid(prime) != 0 {
                let f = rows[r][c];
                for k in 0..cols {
                    rows[r][k] = (rows[r][k] - f * rows[rank][k]).rem_euclid(prime);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Betti number `b_1` of the order complex with coefficients mod `prime`.
fn betti1(p: &Poset, prime: i64) -> usize {
    let els: Vec<Elem> = p.elements().collect();
    let edges: Vec<(Elem, Elem)> = els
        .iter()
        .flat_map(|&x| els.iter().map(move |&y| (x, y)))
        .filter(|&(x, y)| x != y && p.leq(x, y))
        .collect();
    let eidx: BTreeMap<(Elem, Elem), usize> = edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let d1: Vec<Vec<i64>> = edges
        .iter()
        .map(|&(x, y)| {
            let mut row = vec![0; els.len()];
            row[y.0] += 1;
            row[x.0] -= 1;
            row
        })
        .collect();
    let mut d2 = Vec::new();
    for &(x, y) in &edges {
        for &z in &els {
            if z != y && p.leq(y, z) {
                let mut row = vec![0; edges.len()];
                row[eidx[&(y, z)]] += 1;
                row[eidx[&(x, z)]] -= 1;
                row[eidx[&(x, y)]] += 1;
                d2.push(row);
            }
        }
    }
    let r1 = rank_mod(d1, prime);
    let r2 = if d2.is_empty() { 0 } else { rank_mod(d2, prime) };
    edges.len() - r1 - r2
}

fn criterion_2() -> Outcome {
    let mut bad = Vec::new();
    let expected = [("crown2", 1), ("crown3", 1), ("chain", 0), ("crown2_top", 0), ("diamond_chain", 0)];
    for (name, rank) in expected {
        let p = fixtures::poset(name);
        // same b_1 mod 2, 3, 5 and 7 rules out torsion at those primes
        let oracle: BTreeSet<usize> = [2, 3, 5, 7].iter().map(|&q| betti1(&p, q)).collect();
        if oracle != BTreeSet::from([rank]) {
            bad.push(format!("{name}: homology oracle gave {oracle:?}"));
        }
        for a in p.elements() {
            let inv = abelianization(&loop_group_presentation(&p, a).unwrap());
            if inv.rank != rank || !inv.torsion.is_empty() {
                bad.push(format!("{name} at {}: {inv:?}", p.label(a)));
            }
        }
        if p.is_directed() && rank != 0 {
            bad.push(format!("{name}: directed but rank {rank}"));
        }
    }
    let lib = suite::criterion_invariants(&SuiteOptions::default());
    let mut o = from_report(&lib, "");
    o.passed &= bad.is_empty();
    if !bad.is_empty() {
        o.detail = bad.join("; ");
    }
    o
}

// ---- path operators checked through inner products ----

fn all_nets() -> Vec<(&'static str, TruncatedNet)> {
    fixtures::NETS.iter().map(|(n, _)| (*n, fixtures::net(n))).collect()
}

fn short_paths(net: &TruncatedNet, max_len: usize) -> Vec<PathSeq> {
    let p = net.poset();
    let mut out = Vec::new();
    for a in p.elements() {
        for l in 0..=max_len {
            out.extend(posetnet::paths::walks_from(p, a, l));
        }
    }
    out
}

fn criterion_3() -> Outcome {
    let mut bad = Vec::new();
    let mut checked = 0usize;
    for (name, net) in all_nets() {
        for p in short_paths(&net, 2) {
            let chi = net.chi_seq(&p);
            let rev = net.chi_seq(&p.reverse());
            // <χ v, w> = <v, χ_rev w> on vectors with room for the path
            let interior: BTreeSet<usize> = net.interior(p.len()).into_iter().collect();
            for &v in &interior {
                for &w in &interior {
                    checked += 1;
                    if (chi.apply(v) == Some(w)) != (rev.apply(w) == Some(v)) {
                        bad.push(format!("{name}: {} adjoint at {v},{w}", p.display(net.poset())));
                    }
                }
            }
            // partial isometry: isometric on its support
            let image: BTreeSet<usize> = chi.map.values().copied().collect();
            if image.len() != chi.map.len() {
                bad.push(format!("{name}: {} not injective", p.display(net.poset())));
            }
            // χ_{pq} = χ_p χ_q
            for q in short_paths(&net, 1) {
                if let Some(pq) = q.then(&p) {
                    let direct = net.chi_seq(&pq);
                    let product = chi.compose(&net.chi_seq(&q));
                    let room = net.interior(pq.len());
                    if direct.disagreement(&product, &room).is_some() {
                        bad.push(format!("{name}: product {}", pq.display(net.poset())));
                    }
                }
            }
        }
    }
    let lib = suite::criterion_sequences();
    let mut o = from_report(&lib, &format!(", {checked} adjoint pairs"));
    o.passed &= bad.is_empty();
    if !bad.is_empty() {
        o.detail = bad.into_iter().take(3).collect::<Vec<_>>().join("; ");
    }
    o
}

fn criterion_4() -> Outcome {
    let mut bad = Vec::new();
    for (name, net) in all_nets() {
        let p = net.poset();
        for a in p.elements() {
            let loops = loops_at(p, a, 4);
            for l in &loops {
                let chi = net.chi_seq(l);
                let adj = chi.adjoint();
                let room = net.interior(3 * l.len());
                if chi.compose(&adj).compose(&chi).disagreement(&chi, &room).is_some() {
                    bad.push(format!("{name}: χχ*χ for {}", l.display(p)));
                }
                if adj.compose(&chi).compose(&adj).disagreement(&adj, &room).is_some() {
                    bad.push(format!("{name}: χ*χχ* for {}", l.display(p)));
                }
                let support: BasisPartialMap = adj.compose(&chi);
                if !support.is_projection() {
                    bad.push(format!("{name}: χ*χ not a projection for {}", l.display(p)));
                }
            }
        }
    }
    let lib = suite::criterion_cycles(&SuiteOptions::default());
    let mut o = from_report(&lib, "");
    o.passed &= bad.is_empty();
    if !bad.is_empty() {
        o.detail = bad.into_iter().take(3).collect::<Vec<_>>().join("; ");
    }
    o
}

// ---- grading with randomized elements ----

fn random_elements(net: &TruncatedNet, a: Elem, count: usize, rng: &mut ChaCha8Rng) -> Vec<GradedElement> {
    let pool = generated_samples(net, a, &loop_generators(net, a), 2).unwrap();
    let mut out = Vec::new();
    while out.len() < count {
        let mut x = GradedElement::zero(net, a);
        for _ in 0..rng.random_range(1..=4) {
            let y = &pool[rng.random_range(0..pool.len())];
            let c = BigRational::new(rng.random_range(-6..=6).into(), rng.random_range(1..=4).into());
            x = x.add(&y.scale(&c)).unwrap();
        }
        if !x.is_zero() {
            out.push(x);
        }
    }
    out
}

/// Largest singular value by power iteration on `MᵀM`.
fn power_norm(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let g = m.transpose() * m;
    let mut v = DVector::from_fn(g.ncols(), |i, _| 1.0 + (i as f64) * 1e-3);
    let mut lambda = 0.0;
    for _ in 0..5000 {
        let w = &g * &v;
        let n = w.norm();
        if n == 0.0 {
            return 0.0;
        }
        let next = w / n;
        let l = next.dot(&(&g * &next));
        v = next;
        if (l - lambda).abs() < 1e-15 * l.abs().max(1.0) {
            lambda = l;
            break;
        }
        lambda = l;
    }
    lambda.max(0.0).sqrt()
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_2024);
    let mut randomized = 0usize;
    let mut bad = Vec::new();
    let mut largest = 0usize;
    let mut extras: BTreeMap<&str, Vec<GradedElement>> = BTreeMap::new();
    for &(name, site) in suite::GRADED_NETS {
        let net = fixtures::net(name);
        let a = net.poset().elem(site).unwrap();
        largest = largest.max(net.slice(a).len());
        let xs = random_elements(&net, a, 30, &mut rng);
        for x in &xs {
            let lib = norm_estimate(&net, x, TOL).unwrap();
            let lib_phi = norm_estimate(&net, &x.expectation(), TOL).unwrap();
            let oracle = power_norm(&x.to_dense(&net));
            if (lib - oracle).abs() > 1e-6 * oracle.max(1.0) {
                bad.push(format!("{name}: norm {lib} vs power iteration {oracle}"));
            }
            if lib_phi > lib + TOL {
                bad.push(format!("{name}: ‖Φx‖ = {lib_phi} > ‖x‖ = {lib}"));
            }
        }
        randomized += xs.len();
        extras.insert(name, xs);
    }
    if largest > 200 {
        bad.push(format!("slice of {largest} vectors exceeds 200"));
    }
    if randomized < 100 {
        bad.push(format!("only {randomized} randomized elements"));
    }
    let lib = suite::criterion_grading(&SuiteOptions::default(), &|name, _| extras[name].clone());
    let mut o = from_report(&lib, &format!(", {randomized} randomized elements, slices ≤ {largest}"));
    o.passed &= bad.is_empty();
    if !bad.is_empty() {
        o.detail = bad.into_iter().take(3).collect::<Vec<_>>().join("; ");
    }
    o
}

/// Maximal upward-directed subsets by brute force over all subsets.
fn directed_blocks(p: &Poset) -> BTreeSet<BTreeSet<String>> {
    let n = p.len();
    let els: Vec<Elem> = p.elements().collect();
    let directed = |mask: u32| {
        let s: Vec<Elem> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| els[i]).collect();
        s.iter().all(|&x| s.iter().all(|&y| s.iter().any(|&z| p.leq(x, z) && p.leq(y, z))))
    };
    let all: Vec<u32> = (1..1u32 << n).filter(|&m| directed(m)).collect();
    all.iter()
        .filter(|&&m| !all.iter().any(|&o| o != m && o & m == m))
        .map(|&m| (0..n).filter(|i| m >> i & 1 == 1).map(|i| p.label(els[i]).to_string()).collect())
        .collect()
}

fn criterion_6() -> Outcome {
    let mut bad = Vec::new();
    for (name, net) in all_nets() {
        let lib: BTreeSet<BTreeSet<String>> = build_corona(&net)
            .decomposition
            .labelled(net.poset())
            .into_iter()
            .map(|b| b.into_iter().collect())
            .collect();
        if lib != directed_blocks(net.poset()) {
            bad.push(format!("{name}: blocks {lib:?}"));
        }
    }
    let crown = directed_blocks(&fixtures::poset("crown2"));
    let expected: BTreeSet<BTreeSet<String>> = [["a1", "a2", "b1"], ["a1", "a2", "b2"]]
        .iter()
        .map(|b| b.iter().map(|s| s.to_string()).collect())
        .collect();
    if crown != expected {
        bad.push(format!("crown2 brute force gave {crown:?}"));
    }
    let lib = suite::criterion_net();
    let mut o = from_report(&lib, "");
    o.passed &= bad.is_empty();
    if !bad.is_empty() {
        o.detail = bad.join("; ");
    }
    o
}

fn criterion_7() -> Outcome {
    let mut bad = Vec::new();
    let (src, dst, m) = fixtures::morphism("crown2_into_top");
    match verify_algebra_morphism(&src, &dst, &m, 3, 20_000) {
        Ok((r, _)) => {
            if !r.all_passed() {
                bad.push(format!("crown2_into_top: {r}"));
            }
        }
        Err(e) => bad.push(e.to_string()),
    }
    // identity on a net with bijective site maps and injective φ*: faithful
    let k = fixtures::net("crown3_net");
    let id = posetnet::algebra_net::NetMorphism::identity(&k);
    match verify_algebra_morphism(&k, &k, &id, 3, 20_000) {
        Ok((r, info)) => {
            if !info.hypotheses_hold || !r.all_passed() || info.kernel_witness.is_some() {
                bad.push(format!("crown3 identity: {r}"));
            }
        }
        Err(e) => bad.push(e.to_string()),
    }
    let a = src.poset().elem("a1").unwrap();
    let g = induced_group_map(&src, &dst, &m, a, 20_000);
    if g.source.rank != 1 || !g.target.is_trivial() {
        bad.push(format!("group map {:?} -> {:?}", g.source, g.target));
    }
    let lib = suite::criterion_morphisms(&SuiteOptions::default());
    let mut o = from_report(&lib, "");
    o.passed &= bad.is_empty();
    if !bad.is_empty() {
        o.detail = bad.join("; ");
    }
    o
}

fn criterion_8() -> Outcome {
    let (r, s) = example_scenario();
    let mut o = from_report(&r, &format!(", generator {} -> degree {}", s.generator, s.image_degree));
    let ok = s.source_invariants.rank == 1
        && s.target_invariants.is_trivial()
        && s.generator_degree != s.image_degree
        && s.image_degree == "i(a1)"
        && s.kernel_witness.is_some();
    o.passed &= ok;
    o
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("rewriting decides path equivalence", criterion_1),
        ("loop group invariants", criterion_2),
        ("path operator laws", criterion_3),
        ("cycle algebra", criterion_4),
        ("grading and expectation", criterion_5),
        ("net of algebras and corona", criterion_6),
        ("morphisms of nets", criterion_7),
        ("circle into disk example", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = f();
        println!(
            "criterion {} [{}] {name}: {} ({:.2?})",
            i + 1,
            if o.passed { "PASS" } else { "FAIL" },
            o.detail,
            t.elapsed()
        );
        failed += usize::from(!o.passed);
    }
    println!("acceptance: {} of 8 criteria passed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
