//! The verification battery over the bundled fixtures, one report per
//! criterion.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::algebra_net::{
    build_corona, example_scenario, loop_generators, verify_algebra_morphism, verify_corona,
    verify_corona_morphism, verify_isotony,
};
use crate::fixtures;
use crate::graded::{grading_report, GradedElement};
use crate::homotopy::{abelianization, loop_group_presentation, loops_trivial_if_directed};
use crate::net::{
    verify_chi_laws, verify_cycle_laws, verify_domains, verify_representation, verify_sequence_laws,
};
use crate::paths::{all_walks, contractions, loops_at, Equivalence, PathSemigroup, PathSeq};
use crate::poset::Poset;
use crate::report::Report;

#[derive(Debug, Clone, Copy)]
pub struct SuiteOptions {
    pub tol: f64,
    pub budget: usize,
    /// Longest paths compared pairwise in the rewriting check.
    pub pair_len: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            tol: 1e-9,
            budget: 20_000,
            pair_len: 5,
        }
    }
}

/// Posets whose path classes the library decides.
pub const DECIDED_POSETS: &[&str] = &["chain", "crown2", "crown3", "crown2_top"];

/// Union-find closure of the contraction relation over all walks of at
/// most `max_len` steps; compares `equivalent` on pairs up to `pair_len`.
pub fn rewriting_battery(poset: &Poset, pair_len: usize, slack: usize, budget: usize) -> Report {
    let sg = PathSemigroup::new(poset.clone());
    let walks = all_walks(poset, pair_len + slack);
    let index: BTreeMap<&PathSeq, usize> = walks.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let mut parent: Vec<usize> = (0..walks.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (i, w) in walks.iter().enumerate() {
        for c in contractions(poset, w) {
            if let Some(&j) = index.get(&c.strip_trivial()) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[ri] = rj;
            }
        }
    }
    let short: Vec<usize> = (0..walks.len()).filter(|&i| walks[i].len() <= pair_len).collect();
    let mut unknown = Vec::new();
    let mut disagree = Vec::new();
    for (n, &i) in short.iter().enumerate() {
        for &j in &short[n..] {
            let (p, q) = (&walks[i], &walks[j]);
            if p.start() != q.start() || p.end() != q.end() {
                continue;
            }
            let same = find(&mut parent, i) == find(&mut parent, j);
            match sg.equivalent(p, q, budget) {
                Equivalence::Unknown => unknown.push(format!("{} ? {}", p.display(poset), q.display(poset))),
                Equivalence::Yes if !same => {
                    disagree.push(format!("{} ~ {} not in the closure", p.display(poset), q.display(poset)))
                }
                Equivalence::No if same => {
                    disagree.push(format!("{} ≁ {} joined in the closure", p.display(poset), q.display(poset)))
                }
                _ => {}
            }
        }
    }
    let mut r = Report::new();
    r.record("no undecided pairs", unknown);
    r.record("equivalence agrees with the bounded rewrite closure", disagree);
    let mut canon = Vec::new();
    for &i in &short {
        let p = &walks[i];
        let c = sg.canonical(p);
        if sg.canonical(&c) != c || c.start() != p.start() || c.end() != p.end() {
            canon.push(p.display(poset));
        }
    }
    r.record("canonical forms are idempotent and keep endpoints", canon);
    r
}

pub fn criterion_rewriting(opts: &SuiteOptions) -> Report {
    let mut r = Report::new();
    for name in DECIDED_POSETS {
        r.extend(&format!("{name}: "), rewriting_battery(&fixtures::poset(name), opts.pair_len, 2, opts.budget));
    }
    r
}

/// Expected rank of the abelianized loop group; torsion is always empty.
pub const EXPECTED_INVARIANTS: &[(&str, usize)] = &[
    ("chain", 0),
    ("crown2", 1),
    ("crown3", 1),
    ("crown2_top", 0),
    ("diamond_chain", 0),
];

pub fn criterion_invariants(opts: &SuiteOptions) -> Report {
    let mut r = Report::new();
    for &(name, rank) in EXPECTED_INVARIANTS {
        let p = fixtures::poset(name);
        for a in p.elements() {
            let inv = abelianization(&loop_group_presentation(&p, a).expect("connected fixture"));
            r.check(
                format!("{name} at {}: rank {rank}, no torsion", p.label(a)),
                inv.rank == rank && inv.torsion.is_empty(),
                || format!("{inv:?}"),
            );
        }
        if p.is_directed() {
            let sg = PathSemigroup::new(p.clone());
            let samples: Vec<PathSeq> = p.elements().flat_map(|a| loops_at(&p, a, 4)).collect();
            let rep = loops_trivial_if_directed(&sg, &samples, opts.budget).expect("directed");
            r.check(format!("{name}: sampled loops are trivial"), rep.all_trivial, || {
                format!("{} nontrivial", rep.nontrivial.len())
            });
        }
    }
    let anti = fixtures::poset("antichain");
    r.check(
        "antichain has no loop group presentation",
        loop_group_presentation(&anti, anti.elements().next().unwrap()).is_err(),
        || "presentation built".into(),
    );
    r
}

pub fn criterion_sequences() -> Report {
    let mut r = Report::new();
    for (name, _) in fixtures::NETS {
        let net = fixtures::net(name);
        let mut sub = verify_chi_laws(&net);
        sub.extend("", verify_representation(&net, 3));
        sub.extend("", verify_sequence_laws(&net, 3));
        sub.extend("", verify_domains(&net, 3));
        r.extend(&format!("{name}: "), sub);
    }
    r
}

pub fn criterion_cycles(opts: &SuiteOptions) -> Report {
    let mut r = Report::new();
    for (name, _) in fixtures::NETS {
        let net = fixtures::net(name);
        r.extend(&format!("{name}: "), verify_cycle_laws(&net, 4, 2, opts.budget));
    }
    r
}

/// Nets whose grading is checked, with the site used as base.
pub const GRADED_NETS: &[(&str, &str)] = &[
    ("crown2_net", "a1"),
    ("crown2_id_net", "b1"),
    ("crown3_net", "a1"),
    ("crown2_top_net", "a1"),
    ("chain_growing_net", "b"),
];

pub fn criterion_grading(opts: &SuiteOptions, extra: &dyn Fn(&str, &crate::net::TruncatedNet) -> Vec<GradedElement>) -> Report {
    let mut r = Report::new();
    for &(name, site) in GRADED_NETS {
        let net = fixtures::net(name);
        let a = net.poset().elem(site).expect("fixture site");
        let gens = loop_generators(&net, a);
        match grading_report(&net, a, &gens, &extra(name, &net), 3, opts.tol) {
            Ok((rep, summary)) => {
                r.extend(&format!("{name}: "), rep);
                r.check(format!("{name}: samples were generated"), summary.samples > 0, || "none".into());
            }
            Err(e) => r.fail(format!("{name}: grading"), e.to_string()),
        }
    }
    r
}

pub fn criterion_net() -> Report {
    let mut r = Report::new();
    for (name, _) in fixtures::NETS {
        let net = fixtures::net(name);
        match verify_isotony(&net, 3) {
            Ok(rep) => r.extend(&format!("{name}: "), rep),
            Err(e) => r.fail(format!("{name}: isotony"), e.to_string()),
        }
        let corona = build_corona(&net);
        match verify_corona(&net, &corona, 1) {
            Ok(rep) => r.extend(&format!("{name}: corona: "), rep),
            Err(e) => r.fail(format!("{name}: corona"), e.to_string()),
        }
    }
    let crown = fixtures::net("crown2_net");
    let blocks = build_corona(&crown).decomposition.labelled(crown.poset());
    r.check(
        "crown2 corona blocks are {a1,a2,b1} and {a1,a2,b2}",
        blocks == vec![vec!["a1", "a2", "b1"], vec!["a1", "a2", "b2"]],
        || format!("{blocks:?}"),
    );
    r
}

pub fn criterion_morphisms(opts: &SuiteOptions) -> Report {
    let mut r = Report::new();
    for &(name, _, _) in fixtures::MORPHISM_ENDPOINTS {
        let (src, dst, m) = fixtures::morphism(name);
        match verify_algebra_morphism(&src, &dst, &m, 2, opts.budget) {
            Ok((rep, info)) => {
                r.extend(&format!("{name}: "), rep);
                if !info.hypotheses_hold {
                    r.skip(format!("{name}: faithfulness claim"), info.hypothesis_note);
                }
            }
            Err(e) => r.fail(format!("{name}: induced morphism"), e.to_string()),
        }
        match verify_corona_morphism(&src, &dst, &m, 1) {
            Ok((rep, _)) => r.extend(&format!("{name}: corona: "), rep),
            Err(e) => r.fail(format!("{name}: corona morphism"), e.to_string()),
        }
        let composed = m.then(&crate::algebra_net::NetMorphism::identity(&dst));
        r.check(format!("{name}: composing with the identity changes nothing"), composed == m, || {
            "composite differs".into()
        });
    }
    r
}

pub fn criterion_example() -> Report {
    example_scenario().0
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub criterion: String,
    pub passed: bool,
    pub report: Report,
}

pub const CRITERIA: &[&str] = &[
    "rewriting",
    "loop group invariants",
    "path operator laws",
    "cycle algebra",
    "grading",
    "net of algebras",
    "morphisms",
    "example",
];

pub fn run_criterion(i: usize, opts: &SuiteOptions) -> Report {
    match i {
        0 => criterion_rewriting(opts),
        1 => criterion_invariants(opts),
        2 => criterion_sequences(),
        3 => criterion_cycles(opts),
        4 => criterion_grading(opts, &|_, _| Vec::new()),
        5 => criterion_net(),
        6 => criterion_morphisms(opts),
        7 => criterion_example(),
        _ => Report::new(),
    }
}

pub fn run_suite(opts: &SuiteOptions) -> Vec<CriterionResult> {
    CRITERIA
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let report = run_criterion(i, opts);
            CriterionResult {
                criterion: name.to_string(),
                passed: report.all_passed(),
                report,
            }
        })
        .collect()
}
