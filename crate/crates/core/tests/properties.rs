use num::BigRational;
use posetnet::algebra_net::{alpha_apply, loop_generators};
use posetnet::fixtures;
use posetnet::graded::{generated_samples, GradedElement};
use posetnet::homotopy::{abelianization, loop_group_presentation};
use posetnet::paths::{reduce, Equivalence, PathClass, PathSemigroup, PathSeq};
use posetnet::{Elem, Poset};
use proptest::prelude::*;

const POSETS: &[&str] = &["chain", "crown2", "crown3", "crown2_top", "diamond_chain"];

/// A walk steered by `choices`, starting at element `start mod n`.
fn walk(p: &Poset, start: usize, choices: &[usize]) -> PathSeq {
    let mut v = vec![Elem(start % p.len())];
    for &c in choices {
        let nb = p.neighbors(*v.last().unwrap());
        if nb.is_empty() {
            break;
        }
        v.push(nb[c % nb.len()]);
    }
    PathSeq::from_vertices(p, &v).unwrap()
}

/// A walk from `from` that ends with a tree path back to `to`.
fn walk_to(p: &Poset, from: Elem, to: Elem, choices: &[usize]) -> PathSeq {
    let w = walk(p, from.0, choices);
    let mut v = w.vertices();
    let end = *v.last().unwrap();
    let mut back = shortest(p, end, to);
    back.remove(0);
    v.extend(back);
    PathSeq::from_vertices(p, &v).unwrap()
}

fn shortest(p: &Poset, from: Elem, to: Elem) -> Vec<Elem> {
    let mut prev = vec![None; p.len()];
    let mut queue = std::collections::VecDeque::from([from]);
    let mut seen = vec![false; p.len()];
    seen[from.0] = true;
    while let Some(x) = queue.pop_front() {
        for &y in p.neighbors(x) {
            if !seen[y.0] {
                seen[y.0] = true;
                prev[y.0] = Some(x);
                queue.push_back(y);
            }
        }
    }
    let mut path = vec![to];
    while let Some(x) = prev[path.last().unwrap().0] {
        path.push(x);
    }
    path.reverse();
    path
}

fn choices() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0usize..6, 0..7)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reduce_is_idempotent_and_keeps_endpoints(k in 0..POSETS.len(), s in 0usize..8, c in choices()) {
        let p = fixtures::poset(POSETS[k]);
        let w = walk(&p, s, &c);
        let r = reduce(&p, &w);
        prop_assert_eq!(reduce(&p, &r), r.clone());
        prop_assert_eq!((r.start(), r.end()), (w.start(), w.end()));
        prop_assert!(r.len() <= w.len());
    }

    #[test]
    fn concatenation_is_associative(k in 0..POSETS.len(), s in 0usize..8, c1 in choices(), c2 in choices(), c3 in choices()) {
        let p = fixtures::poset(POSETS[k]);
        let sg = PathSemigroup::new(p.clone());
        let x = walk(&p, s, &c1);
        let y = walk(&p, x.end().0, &c2);
        let z = walk(&p, y.end().0, &c3);
        let (cx, cy, cz) = (sg.class_of(&x), sg.class_of(&y), sg.class_of(&z));
        // concat(p, q) walks q first
        let left = sg.concat(&cz, &sg.concat(&cy, &cx));
        let right = sg.concat(&sg.concat(&cz, &cy), &cx);
        prop_assert_eq!(left, right);
    }

    #[test]
    fn mismatched_endpoints_give_zero(k in 0..POSETS.len(), s in 0usize..8, c1 in choices(), c2 in choices()) {
        let p = fixtures::poset(POSETS[k]);
        let sg = PathSemigroup::new(p.clone());
        let x = walk(&p, s, &c1);
        let y = walk(&p, s + 1, &c2);
        let prod = sg.concat(&sg.class_of(&y), &sg.class_of(&x));
        prop_assert_eq!(prod.is_zero(), x.end() != y.start());
        prop_assert!(sg.concat(&PathClass::Zero, &sg.class_of(&x)).is_zero());
    }

    #[test]
    fn reverse_is_an_anti_homomorphism(k in 0..POSETS.len(), s in 0usize..8, c1 in choices(), c2 in choices()) {
        let p = fixtures::poset(POSETS[k]);
        let sg = PathSemigroup::new(p.clone());
        let x = walk(&p, s, &c1);
        let y = walk(&p, x.end().0, &c2);
        let xy = x.then(&y).unwrap();
        let rev = y.reverse().then(&x.reverse()).unwrap();
        prop_assert_eq!(sg.canonical(&xy.reverse()), sg.canonical(&rev));
        prop_assert_eq!(xy.reverse().reverse(), xy.clone());
        let back = xy.then(&xy.reverse()).unwrap();
        prop_assert_eq!(sg.equivalent(&back, &PathSeq::trivial(xy.start()), 20_000), Equivalence::Yes);
    }

    #[test]
    fn decided_posets_answer_by_canonical_forms(k in 0..4usize, s in 0usize..8, c1 in choices(), c2 in choices()) {
        let p = fixtures::poset(POSETS[k]);
        let sg = PathSemigroup::new(p.clone());
        prop_assert!(sg.decides_classes());
        let x = walk(&p, s, &c1);
        let y = walk_to(&p, x.start(), x.end(), &c2);
        let same = sg.canonical(&x) == sg.canonical(&y);
        let eq = sg.equivalent(&x, &y, 20_000);
        prop_assert_eq!(eq, if same { Equivalence::Yes } else { Equivalence::No });
    }

    #[test]
    fn equivalence_respects_abelian_classes(k in 0..POSETS.len(), s in 0usize..8, c1 in choices(), c2 in choices()) {
        let p = fixtures::poset(POSETS[k]);
        let sg = PathSemigroup::new(p.clone());
        let x = walk(&p, s, &c1);
        let y = walk_to(&p, x.start(), x.end(), &c2);
        let m = sg.model();
        if m.abelian_class(&x) != m.abelian_class(&y) {
            prop_assert_ne!(sg.equivalent(&x, &y, 20_000), Equivalence::Yes);
        }
    }

    #[test]
    fn relabeling_preserves_invariants(k in 0..POSETS.len(), shift in 0usize..5) {
        let p = fixtures::poset(POSETS[k]);
        let spec = p.to_spec();
        let rename = |s: &str| format!("{}{}", "z".repeat(shift), s.chars().rev().collect::<String>());
        let elements: Vec<String> = spec.elements.iter().map(|s| rename(s)).collect();
        let pairs: Vec<(String, String)> = spec.leq.iter().map(|(a, b)| (rename(a), rename(b))).collect();
        let q = Poset::new(&elements, &pairs).unwrap();
        let a = p.elements().next().unwrap();
        let b = q.elem(&rename(p.label(a))).unwrap();
        let ia = abelianization(&loop_group_presentation(&p, a).unwrap());
        let ib = abelianization(&loop_group_presentation(&q, b).unwrap());
        prop_assert_eq!(ia, ib);
        prop_assert_eq!(p.maximal_directed_subsets().blocks.len(), q.maximal_directed_subsets().blocks.len());
    }

    #[test]
    fn path_operators_are_partial_isometries(n in 0..fixtures::NETS.len(), s in 0usize..8, c in choices()) {
        let net = fixtures::net(fixtures::NETS[n].0);
        let w = walk(net.poset(), s, &c);
        let chi = net.chi_seq(&w);
        let adj = chi.adjoint();
        prop_assert_eq!(chi.compose(&adj).compose(&chi).map, chi.map.clone());
        prop_assert!(adj.compose(&chi).is_projection());
        prop_assert_eq!(net.chi_seq(&w.reverse()).map, adj.map);
    }

    #[test]
    fn graded_products_and_adjoints(i in 0usize..64, j in 0usize..64, num in -5i64..6, den in 1i64..4) {
        let net = fixtures::net("crown2_net");
        let a = net.poset().elem("a1").unwrap();
        let xs = generated_samples(&net, a, &loop_generators(&net, a), 2).unwrap();
        let x = &xs[i % xs.len()];
        let y = xs[j % xs.len()].scale(&BigRational::new(num.into(), den.into()));
        let xy = x.mul(&net, &y).unwrap();
        prop_assert_eq!(xy.adjoint(&net), y.adjoint(&net).mul(&net, &x.adjoint(&net)).unwrap());
        prop_assert_eq!(xy.expectation().expectation(), xy.expectation());
        let sum = x.add(&y).unwrap();
        prop_assert_eq!(sum.expectation(), x.expectation().add(&y.expectation()).unwrap());
    }

    #[test]
    fn connecting_maps_compose(i in 0usize..64, j in 0usize..64) {
        let net = fixtures::net("crown2_top_net");
        let p = net.poset();
        let (a, b, t) = (p.elem("a2").unwrap(), p.elem("b2").unwrap(), p.elem("t").unwrap());
        let xs = generated_samples(&net, a, &loop_generators(&net, a), 2).unwrap();
        let x = &xs[i % xs.len()];
        let y = &xs[j % xs.len()];
        let direct = alpha_apply(&net, a, t, x).unwrap();
        let stepwise = alpha_apply(&net, b, t, &alpha_apply(&net, a, b, x).unwrap()).unwrap();
        prop_assert_eq!(&direct, &stepwise);
        let prod = alpha_apply(&net, a, t, &x.mul(&net, y).unwrap()).unwrap();
        prop_assert_eq!(prod, direct.mul(&net, &alpha_apply(&net, a, t, y).unwrap()).unwrap());
    }

    #[test]
    fn directed_blocks_cover_and_are_directed(k in 0..POSETS.len()) {
        let p = fixtures::poset(POSETS[k]);
        let d = p.maximal_directed_subsets();
        for e in p.elements() {
            prop_assert!(!d.blocks_containing(e).is_empty());
        }
        for b in &d.blocks {
            prop_assert!(p.is_upward_directed(b));
        }
        prop_assert_eq!(d, p.maximal_directed_subsets_exhaustive(16).unwrap());
    }
}

#[test]
fn unit_is_neutral() {
    let net = fixtures::net("crown3_net");
    let a = net.poset().elem("a2").unwrap();
    let one = GradedElement::unit(&net, a);
    for x in generated_samples(&net, a, &loop_generators(&net, a), 2).unwrap() {
        assert_eq!(one.mul(&net, &x).unwrap(), x);
        assert_eq!(x.mul(&net, &one).unwrap(), x);
    }
}
