//! The edge-path groupoid of the comparability complex, reduced to a group
//! presentation through a spanning forest.
//!
//! Two paths with the same endpoints are equivalent exactly when their edge
//! words agree in the presented group. Generators that occur once in some
//! relator are eliminated; when no relators survive, the group is free and
//! freely reduced words are canonical, so equivalence becomes decidable.

use std::collections::{BTreeSet, HashMap, VecDeque};

use super::smith::{left_kernel, mat_mul, smith_normal_form, IntMatrix, Smith};
use super::word::Word;
use crate::paths::PathSeq;
use crate::poset::{Elem, Poset};

/// Abelianized relator lattice, diagonalized.
#[derive(Debug, Clone)]
pub struct AbelianModel {
    pub ngens: usize,
    pub relators: IntMatrix,
    smith: Smith,
}

impl AbelianModel {
    pub fn new(ngens: usize, relators: &[Word]) -> AbelianModel {
        let rows: IntMatrix = relators.iter().map(|r| r.exponents(ngens)).collect();
        let smith = smith_normal_form(&rows, ngens);
        AbelianModel {
            ngens,
            relators: rows,
            smith,
        }
    }

    pub fn rank(&self) -> usize {
        self.ngens - self.smith.rank()
    }

    pub fn torsion(&self) -> Vec<i64> {
        self.smith.diag.iter().copied().filter(|&d| d > 1).collect()
    }

    /// Canonical coordinates of an exponent vector in the quotient group.
    pub fn class(&self, exponents: &[i64]) -> Vec<i64> {
        let w = mat_mul(&vec![exponents.to_vec()], &self.smith.right, self.ngens, self.ngens)
            .remove(0);
        w.iter()
            .enumerate()
            .map(|(j, &x)| match self.smith.diag.get(j) {
                Some(&d) if d != 0 => x.rem_euclid(d),
                _ => x,
            })
            .collect()
    }

    pub fn is_zero(&self, exponents: &[i64]) -> bool {
        self.class(exponents).iter().all(|&x| x == 0)
    }

    /// Whether the homomorphism sending source generator `i` to the target
    /// exponent vector `images[i]` is injective on abelianizations.
    pub fn map_is_injective(&self, target: &AbelianModel, images: &[Vec<i64>]) -> bool {
        let n = self.ngens;
        let m = target.ngens;
        if n == 0 {
            return true;
        }
        // rows: image of each source generator in the target's diagonal basis,
        // followed by the target's relations in that basis
        let mut stacked: IntMatrix = if m == 0 {
            vec![vec![]; n]
        } else {
            mat_mul(&images.to_vec(), &target.smith.right, m, m)
        };
        for (j, &d) in target.smith.diag.iter().enumerate() {
            if d != 0 {
                let mut row = vec![0; m];
                row[j] = d;
                stacked.push(row);
            }
        }
        if m == 0 {
            // everything maps to zero
            return (0..n).all(|i| {
                let mut e = vec![0; n];
                e[i] = 1;
                self.is_zero(&e)
            });
        }
        left_kernel(&stacked, m)
            .iter()
            .all(|v| self.is_zero(&v[..n]))
    }
}

#[derive(Debug, Clone)]
pub struct GroupoidModel {
    pub tree: Vec<(Elem, Elem)>,
    /// Non-tree comparability edges `(lo, hi)`, oriented upward.
    pub generators: Vec<(Elem, Elem)>,
    /// One normalized relator per triangle (duplicates and trivial words dropped).
    pub relators: Vec<Word>,
    edge_gen: HashMap<(Elem, Elem), usize>,
    parent: Vec<Option<Elem>>,
    images: Vec<Word>,
    residual: Vec<Word>,
    pub abelian: AbelianModel,
}

impl GroupoidModel {
    /// Spanning forest by breadth-first search from `root` (then from the
    /// least unvisited element of each remaining component).
    pub fn new(poset: &Poset, root: Option<Elem>) -> GroupoidModel {
        let n = poset.len();
        let mut parent = vec![None; n];
        let mut seen = vec![false; n];
        let mut tree = BTreeSet::new();
        let starts = root.into_iter().chain(poset.elements());
        for s in starts {
            if seen[s.0] {
                continue;
            }
            seen[s.0] = true;
            let mut queue = VecDeque::from([s]);
            while let Some(x) = queue.pop_front() {
                for &y in poset.neighbors(x) {
                    if !seen[y.0] {
                        seen[y.0] = true;
                        parent[y.0] = Some(x);
                        tree.insert(if poset.leq(x, y) { (x, y) } else { (y, x) });
                        queue.push_back(y);
                    }
                }
            }
        }
        let generators: Vec<(Elem, Elem)> = poset
            .comparability_edges()
            .into_iter()
            .filter(|e| !tree.contains(e))
            .collect();
        let edge_gen = generators
            .iter()
            .enumerate()
            .map(|(i, &e)| (e, i))
            .collect();
        let mut model = GroupoidModel {
            tree: tree.into_iter().collect(),
            generators,
            relators: Vec::new(),
            edge_gen,
            parent,
            images: Vec::new(),
            residual: Vec::new(),
            abelian: AbelianModel::new(0, &[]),
        };
        let mut rels = BTreeSet::new();
        for (x, y, z) in poset.triangles() {
            let w = model.letter(x, y).mul(&model.letter(y, z)).mul(&model.letter(z, x));
            let w = w.normalized_relator();
            if !w.is_empty() {
                rels.insert(w);
            }
        }
        model.relators = rels.into_iter().collect();
        let ngens = model.generators.len();
        model.abelian = AbelianModel::new(ngens, &model.relators);
        model.eliminate();
        model
    }

    pub fn ngens(&self) -> usize {
        self.generators.len()
    }

    /// The word of one edge traversal `from -> to`.
    pub fn letter(&self, from: Elem, to: Elem) -> Word {
        if let Some(&g) = self.edge_gen.get(&(from, to)) {
            Word::gen(g, false)
        } else if let Some(&g) = self.edge_gen.get(&(to, from)) {
            Word::gen(g, true)
        } else {
            Word::empty()
        }
    }

    /// Edge word of a path, freely reduced.
    pub fn path_word(&self, path: &PathSeq) -> Word {
        let mut w = Word::empty();
        for s in path.steps().iter().filter(|s| !s.is_trivial()) {
            for &l in &self.letter(s.start(), s.end()).0 {
                w.push(l);
            }
        }
        w
    }

    /// Tree path from `x` to the root of its component.
    pub fn to_root(&self, x: Elem) -> Vec<Elem> {
        let mut v = vec![x];
        let mut cur = x;
        while let Some(p) = self.parent[cur.0] {
            v.push(p);
            cur = p;
        }
        v
    }

    /// The loop at the component root that crosses generator `g` once.
    pub fn generator_loop(&self, poset: &Poset, g: usize) -> PathSeq {
        let (lo, hi) = self.generators[g];
        let mut v: Vec<Elem> = self.to_root(lo).into_iter().rev().collect();
        v.extend(self.to_root(hi));
        PathSeq::from_vertices(poset, &v).expect("tree and generator edges are comparable")
    }

    fn eliminate(&mut self) {
        self.images = (0..self.ngens()).map(|g| Word::gen(g, false)).collect();
        let mut rels: Vec<Word> = self.relators.clone();
        loop {
            rels.retain(|r| !r.is_empty());
            let found = rels.iter().enumerate().find_map(|(ri, r)| {
                (0..self.ngens())
                    .find(|&g| r.occurrences(g) == 1)
                    .map(|g| (ri, g))
            });
            let Some((ri, g)) = found else {
                break;
            };
            let r = rels.remove(ri);
            let k = r.0.iter().position(|&l| Word::generator(l) == g).unwrap();
            let sign = r.0[k];
            // rotate to g^sign * rest = 1
            let rest = Word(r.0[k + 1..].iter().chain(&r.0[..k]).copied().collect());
            let value = if sign > 0 { rest.inverse() } else { rest };
            for w in rels.iter_mut() {
                *w = w.substitute(g, &value).cyclically_reduced();
            }
            for w in self.images.iter_mut() {
                *w = w.substitute(g, &value);
            }
        }
        self.residual = rels;
    }

    /// No relators survive elimination: the group is free and reduced image
    /// words decide equivalence.
    pub fn is_complete(&self) -> bool {
        self.residual.is_empty()
    }

    pub fn residual_relators(&self) -> &[Word] {
        &self.residual
    }

    /// Image of a word in the eliminated presentation.
    pub fn image(&self, w: &Word) -> Word {
        let mut out = Word::empty();
        for &l in &w.0 {
            let img = &self.images[Word::generator(l)];
            if l > 0 {
                for &m in &img.0 {
                    out.push(m);
                }
            } else {
                for &m in img.0.iter().rev() {
                    out.push(-m);
                }
            }
        }
        out
    }

    /// Equivalence key: equal keys mean equivalent paths; when the model is
    /// complete the converse holds too.
    pub fn key(&self, path: &PathSeq) -> (Elem, Elem, Word) {
        (path.start(), path.end(), self.image(&self.path_word(path)))
    }

    pub fn abelian_class(&self, path: &PathSeq) -> Vec<i64> {
        self.abelian
            .class(&self.path_word(path).exponents(self.ngens()))
    }
}
