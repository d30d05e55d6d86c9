//! Dense engine over fully enumerated groups.
//!
//! Elements are dense ids with 0 the identity. The group is stored as its right
//! Cayley graph on the generator letters (`x, x^-1, y, y^-1, ...`) together
//! with left multiplication by letters and a breadth-first spanning tree, which
//! makes a general product cost the tree depth of one factor.

use std::collections::HashMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::enumerate::{CosetTable, PermGroupGens};
use crate::error::{Error, Result};
use crate::presentations::{Presentation, Word};

pub type Elem = u32;

/// Default element bound for dense construction.
pub const DEFAULT_CAP: usize = 1 << 19;

const NONE: u32 = u32::MAX;

#[derive(Debug, Clone)]
pub struct DenseGroup {
    n: usize,
    ngens: usize,
    /// `g * letter`, row-major with `2 * ngens` columns.
    rmul: Vec<u32>,
    /// `letter * g`, same layout.
    lmul: Vec<u32>,
    parent: Vec<u32>,
    /// Letter with `g = parent[g] * letter`.
    last: Vec<u8>,
    depth: Vec<u16>,
    inv: Vec<u32>,
    orders: OnceLock<Vec<u32>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subgroup {
    /// Sorted element ids.
    pub elements: Vec<Elem>,
    pub generators: Vec<Elem>,
}

impl Subgroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, g: Elem) -> bool {
        self.elements.binary_search(&g).is_ok()
    }

    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut m = vec![false; n];
        for &g in &self.elements {
            m[g as usize] = true;
        }
        m
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesTerm {
    pub order: u64,
    pub generators: Vec<Elem>,
    /// Abelian invariants of this term modulo the previous one.
    pub factor_invariants: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesReport {
    pub terms: Vec<SeriesTerm>,
    pub class: usize,
}

impl DenseGroup {
    /// From the coset table of the trivial subgroup.
    pub fn from_regular_table(t: &CosetTable, cap: usize) -> Result<DenseGroup> {
        if t.index > cap {
            return Err(Error::BoundExceeded(cap));
        }
        Self::from_right_table(t.ngens, t.index, &t.table)
    }

    /// From faithful permutation generators; elements are enumerated as
    /// permutations unless the action is regular.
    pub fn build(gens: &PermGroupGens, cap: usize) -> Result<DenseGroup> {
        if !gens.is_valid() {
            return Err(Error::InvalidParams("generators are not permutations".into()));
        }
        let k = gens.perms.len();
        let deg = gens.degree;
        let inverse = |p: &[u32]| {
            let mut q = vec![0u32; p.len()];
            for (i, &j) in p.iter().enumerate() {
                q[j as usize] = i as u32;
            }
            q
        };
        let letters: Vec<Vec<u32>> = gens.perms.iter().flat_map(|p| [p.clone(), inverse(p)]).collect();
        if deg > 0 && is_transitive(&letters, deg) {
            // A regular action is its own Cayley graph, with element g read as
            // the point 0^g; from_right_table rejects anything else.
            let mut table = vec![0u32; deg * 2 * k];
            for c in 0..deg {
                for (col, p) in letters.iter().enumerate() {
                    table[c * 2 * k + col] = p[c];
                }
            }
            if let Ok(g) = Self::from_right_table(k, deg, &table) {
                return Ok(g);
            }
        }
        let mut index: HashMap<Vec<u32>, u32> = HashMap::new();
        let mut elems: Vec<Vec<u32>> = vec![(0..deg as u32).collect()];
        index.insert(elems[0].clone(), 0);
        let mut table: Vec<u32> = Vec::new();
        let mut i = 0;
        while i < elems.len() {
            for p in &letters {
                let q: Vec<u32> = elems[i].iter().map(|&j| p[j as usize]).collect();
                let id = match index.get(&q) {
                    Some(&id) => id,
                    None => {
                        if elems.len() >= cap {
                            return Err(Error::BoundExceeded(cap));
                        }
                        let id = elems.len() as u32;
                        index.insert(q.clone(), id);
                        elems.push(q);
                        id
                    }
                };
                table.push(id);
            }
            i += 1;
        }
        Self::from_right_table(k, elems.len(), &table)
    }

    /// From a right multiplication table by letters that is the Cayley graph of
    /// a group: every left translation by a letter must be a graph automorphism.
    /// Ids are renumbered breadth-first from row 0.
    pub fn from_right_table(ngens: usize, n: usize, raw: &[u32]) -> Result<DenseGroup> {
        let nc = 2 * ngens;
        if raw.len() != n * nc || n == 0 || raw.iter().any(|&v| v as usize >= n) {
            return Err(Error::Relation("malformed multiplication table".into()));
        }
        let mut newid = vec![NONE; n];
        let mut order = Vec::with_capacity(n);
        newid[0] = 0;
        order.push(0usize);
        let mut i = 0;
        while i < order.len() {
            let c = order[i];
            i += 1;
            for col in 0..nc {
                let d = raw[c * nc + col] as usize;
                if newid[d] == NONE {
                    newid[d] = order.len() as u32;
                    order.push(d);
                }
            }
        }
        if order.len() != n {
            return Err(Error::Relation("multiplication table is not connected".into()));
        }
        let mut rmul = vec![0u32; n * nc];
        for (new, &old) in order.iter().enumerate() {
            for col in 0..nc {
                rmul[new * nc + col] = newid[raw[old * nc + col] as usize];
            }
        }
        for c in 0..n {
            for col in 0..nc {
                if rmul[rmul[c * nc + col] as usize * nc + (col ^ 1)] as usize != c {
                    return Err(Error::Relation("letter columns are not mutually inverse".into()));
                }
            }
        }
        let mut parent = vec![0u32; n];
        let mut last = vec![0u8; n];
        let mut depth = vec![0u16; n];
        let mut seen = vec![false; n];
        seen[0] = true;
        // Ids are already breadth-first, so a forward sweep finds the tree.
        for c in 0..n {
            for col in 0..nc {
                let d = rmul[c * nc + col] as usize;
                if !seen[d] {
                    seen[d] = true;
                    parent[d] = c as u32;
                    last[d] = col as u8;
                    depth[d] = depth[c].saturating_add(1);
                }
            }
        }
        let mut g = DenseGroup {
            n,
            ngens,
            rmul,
            lmul: vec![0u32; n * nc],
            parent,
            last,
            depth,
            inv: vec![0u32; n],
            orders: OnceLock::new(),
        };
        // Left translation by a letter s: L(e) = s, L(p * t) = L(p) * t.
        for s in 0..nc {
            let se = g.rmul[s];
            g.lmul[s] = se;
            for c in 1..n {
                let p = g.parent[c] as usize;
                let t = g.last[c] as usize;
                g.lmul[c * nc + s] = g.rmul[g.lmul[p * nc + s] as usize * nc + t];
            }
        }
        // The translations must commute with every right letter.
        for c in 0..n {
            for s in 0..nc {
                let l = g.lmul[c * nc + s] as usize;
                for t in 0..nc {
                    if g.lmul[g.rmul[c * nc + t] as usize * nc + s] != g.rmul[l * nc + t] {
                        return Err(Error::Relation("table is not the Cayley graph of a group".into()));
                    }
                }
            }
        }
        for c in 1..n {
            let p = g.parent[c] as usize;
            let t = g.last[c] as usize;
            g.inv[c] = g.lmul[g.inv[p] as usize * nc + (t ^ 1)];
        }
        Ok(g)
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn ngens(&self) -> usize {
        self.ngens
    }

    pub fn identity(&self) -> Elem {
        0
    }

    /// Image of generator `i`.
    pub fn gen(&self, i: usize) -> Elem {
        self.rmul[2 * i]
    }

    pub fn generators(&self) -> Vec<Elem> {
        (0..self.ngens).map(|i| self.gen(i)).collect()
    }

    /// `g * letter`.
    pub fn act(&self, g: Elem, letter: usize) -> Elem {
        self.rmul[g as usize * 2 * self.ngens + letter]
    }

    /// `letter * g`.
    pub fn left_act(&self, letter: usize, g: Elem) -> Elem {
        self.lmul[g as usize * 2 * self.ngens + letter]
    }

    pub fn depth(&self, g: Elem) -> usize {
        self.depth[g as usize] as usize
    }

    /// Letters of the tree word for `g`, first letter first.
    pub fn word_letters(&self, g: Elem) -> Vec<u8> {
        let mut w = Vec::with_capacity(self.depth(g));
        let mut c = g as usize;
        while c != 0 {
            w.push(self.last[c]);
            c = self.parent[c] as usize;
        }
        w.reverse();
        w
    }

    /// The tree word for `g` over the generators.
    pub fn word(&self, g: Elem) -> Word {
        Word::from_letters(
            &self
                .word_letters(g)
                .iter()
                .map(|&l| {
                    let gi = (l / 2) as i32 + 1;
                    if l % 2 == 0 {
                        gi
                    } else {
                        -gi
                    }
                })
                .collect::<Vec<_>>(),
        )
    }

    pub fn mul(&self, g: Elem, h: Elem) -> Elem {
        // g * h = g' * (t * h) for g = g' * t.
        let nc = 2 * self.ngens;
        let (mut g, mut h) = (g as usize, h);
        while g != 0 {
            h = self.lmul[h as usize * nc + self.last[g] as usize];
            g = self.parent[g] as usize;
        }
        h
    }

    /// Applies letters on the right.
    pub fn apply(&self, g: Elem, letters: &[u8]) -> Elem {
        let nc = 2 * self.ngens;
        letters.iter().fold(g, |c, &l| self.rmul[c as usize * nc + l as usize])
    }

    pub fn inverse(&self, g: Elem) -> Elem {
        self.inv[g as usize]
    }

    pub fn pow(&self, g: Elem, k: i64) -> Elem {
        let mut base = if k < 0 { self.inverse(g) } else { g };
        let mut e = k.unsigned_abs();
        let mut acc = 0;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// `[a,b] = a^-1 b^-1 a b`.
    pub fn commutator(&self, a: Elem, b: Elem) -> Elem {
        let ab = self.mul(a, b);
        let ba = self.mul(b, a);
        self.mul(self.inverse(ba), ab)
    }

    /// `a^b = b^-1 a b`.
    pub fn conjugate(&self, a: Elem, b: Elem) -> Elem {
        self.mul(self.mul(self.inverse(b), a), b)
    }

    /// Conjugation by a letter in constant time.
    pub fn conjugate_by_letter(&self, g: Elem, letter: usize) -> Elem {
        self.left_act(letter ^ 1, self.act(g, letter))
    }

    pub fn element_order(&self, g: Elem) -> u64 {
        if let Some(o) = self.orders.get() {
            return o[g as usize] as u64;
        }
        let w = self.word_letters(g);
        let mut x = g;
        let mut k = 1;
        while x != 0 {
            x = self.apply(x, &w);
            k += 1;
        }
        k
    }

    /// Evaluates a word with `images[i]` substituted for generator `i`.
    pub fn eval(&self, w: &Word, images: &[Elem]) -> Elem {
        w.syllables().iter().fold(0, |acc, &(g, e)| self.mul(acc, self.pow(images[g], e)))
    }

    pub fn elem_of_word(&self, w: &Word) -> Elem {
        self.apply(0, &w.letters().iter().map(|&l| l as u8).collect::<Vec<_>>())
    }

    /// True when every relator of `pres` is trivial at the generators.
    pub fn satisfies(&self, pres: &Presentation) -> bool {
        let imgs = self.generators();
        pres.ngens() == self.ngens && pres.relators.iter().all(|r| self.eval(r, &imgs) == 0)
    }

    pub fn is_abelian(&self) -> bool {
        let gens = self.generators();
        gens.iter().all(|&a| gens.iter().all(|&b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn trivial_subgroup(&self) -> Subgroup {
        Subgroup {
            elements: vec![0],
            generators: vec![],
        }
    }

    pub fn whole(&self) -> Subgroup {
        Subgroup {
            elements: (0..self.n as u32).collect(),
            generators: self.generators(),
        }
    }

    fn closure_mask(&self, seeds: &[Elem], mask: &mut [bool], list: &mut Vec<Elem>) {
        let words: Vec<Vec<u8>> = seeds.iter().map(|&s| self.word_letters(s)).collect();
        let mut i = 0;
        while i < list.len() {
            let h = list[i];
            i += 1;
            for w in &words {
                let k = self.apply(h, w);
                if !mask[k as usize] {
                    mask[k as usize] = true;
                    list.push(k);
                }
            }
        }
    }

    pub fn subgroup_closure(&self, seeds: &[Elem]) -> Subgroup {
        let mut mask = vec![false; self.n];
        mask[0] = true;
        let mut list = vec![0];
        self.closure_mask(seeds, &mut mask, &mut list);
        list.sort_unstable();
        Subgroup {
            elements: list,
            generators: seeds.iter().copied().filter(|&s| s != 0).collect(),
        }
    }

    pub fn normal_closure(&self, seeds: &[Elem]) -> Subgroup {
        let mut gens: Vec<Elem> = seeds.iter().copied().filter(|&s| s != 0).collect();
        let mut mask = vec![false; self.n];
        mask[0] = true;
        let mut list = vec![0];
        self.closure_mask(&gens, &mut mask, &mut list);
        let mut i = 0;
        while i < gens.len() {
            let g = gens[i];
            i += 1;
            for t in 0..self.ngens {
                let c = self.conjugate_by_letter(g, 2 * t);
                if !mask[c as usize] {
                    gens.push(c);
                    self.closure_mask(&gens, &mut mask, &mut list);
                }
            }
        }
        list.sort_unstable();
        Subgroup {
            elements: list,
            generators: gens,
        }
    }

    pub fn is_normal(&self, s: &Subgroup) -> bool {
        let mask = s.mask(self.n);
        s.generators
            .iter()
            .all(|&g| (0..2 * self.ngens).all(|l| mask[self.conjugate_by_letter(g, l) as usize]))
            && self.is_closed(s, &mask)
    }

    fn is_closed(&self, s: &Subgroup, mask: &[bool]) -> bool {
        let words: Vec<Vec<u8>> = s.generators.iter().map(|&g| self.word_letters(g)).collect();
        mask[0]
            && s.elements
                .iter()
                .all(|&h| words.iter().all(|w| mask[self.apply(h, w) as usize]))
    }

    /// Checks that a claimed subgroup is closed and generated by its generators.
    pub fn is_subgroup(&self, s: &Subgroup) -> bool {
        let c = self.subgroup_closure(&s.generators);
        c.elements == s.elements
    }

    pub fn subgroup_is_abelian(&self, s: &Subgroup) -> bool {
        s.generators
            .iter()
            .all(|&a| s.generators.iter().all(|&b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn intersection(&self, a: &Subgroup, b: &Subgroup) -> Subgroup {
        let mask = b.mask(self.n);
        let elements: Vec<Elem> = a.elements.iter().copied().filter(|&g| mask[g as usize]).collect();
        let generators = self.generating_set(&elements);
        Subgroup { elements, generators }
    }

    /// A small generating set, chosen greedily by decreasing element order.
    pub fn generating_set(&self, elements: &[Elem]) -> Vec<Elem> {
        let ord = self.orders();
        let mut cand: Vec<(u32, Elem)> = elements.iter().map(|&g| (ord[g as usize], g)).collect();
        cand.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        let mut mask = vec![false; self.n];
        mask[0] = true;
        let mut list = vec![0];
        let mut gens = Vec::new();
        for (_, g) in cand {
            if list.len() == elements.len() {
                break;
            }
            if !mask[g as usize] {
                gens.push(g);
                self.closure_mask(&gens, &mut mask, &mut list);
            }
        }
        gens
    }

    pub fn center(&self) -> Subgroup {
        let nc = 2 * self.ngens;
        let elements: Vec<Elem> = (0..self.n)
            .filter(|&g| (0..nc).step_by(2).all(|s| self.rmul[g * nc + s] == self.lmul[g * nc + s]))
            .map(|g| g as Elem)
            .collect();
        let generators = self.generating_set(&elements);
        Subgroup { elements, generators }
    }

    /// Coset labels `g ↦ gN` for a normal subgroup, numbered by first occurrence.
    pub fn coset_labels(&self, nsub: &Subgroup) -> Vec<u32> {
        let mut label = vec![NONE; self.n];
        let mut next = 0;
        for g in 0..self.n as Elem {
            if label[g as usize] != NONE {
                continue;
            }
            for &z in &nsub.elements {
                label[self.mul(g, z) as usize] = next;
            }
            next += 1;
        }
        label
    }

    pub fn quotient(&self, nsub: &Subgroup) -> Result<DenseGroup> {
        if !self.is_normal(nsub) {
            return Err(Error::NotNormal);
        }
        let label = self.coset_labels(nsub);
        let m = self.n / nsub.order();
        let nc = 2 * self.ngens;
        let mut rep = vec![NONE; m];
        for g in 0..self.n {
            let l = label[g] as usize;
            if rep[l] == NONE {
                rep[l] = g as u32;
            }
        }
        let mut table = vec![0u32; m * nc];
        for l in 0..m {
            for col in 0..nc {
                table[l * nc + col] = label[self.rmul[rep[l] as usize * nc + col] as usize];
            }
        }
        DenseGroup::from_right_table(self.ngens, m, &table)
    }

    /// The quotient together with the projection of every element.
    pub fn quotient_with_projection(&self, nsub: &Subgroup) -> Result<(DenseGroup, Vec<Elem>)> {
        let q = self.quotient(nsub)?;
        let nc = 2 * self.ngens;
        let mut proj = vec![0 as Elem; self.n];
        // Ids are in breadth-first order, so parents come first.
        for g in 1..self.n {
            let p = self.parent[g] as usize;
            proj[g] = q.rmul[proj[p] as usize * nc + self.last[g] as usize];
        }
        Ok((q, proj))
    }

    /// Size of the conjugacy class of every element.
    pub fn class_sizes(&self) -> Vec<u32> {
        let (reps, class) = self.conjugacy_classes();
        let mut count = vec![0u32; reps.len()];
        for &c in &class {
            count[c as usize] += 1;
        }
        class.iter().map(|&c| count[c as usize]).collect()
    }

    /// The subgroup generated by `gens` as a group in its own right, with
    /// `gens` as its generators; also returns the embedding of its ids.
    pub fn subgroup_as_group(&self, gens: &[Elem]) -> Result<(DenseGroup, Vec<Elem>)> {
        let s = self.subgroup_closure(gens);
        let mut local = HashMap::with_capacity(s.order());
        for (i, &g) in s.elements.iter().enumerate() {
            local.insert(g, i as u32);
        }
        let words: Vec<[Vec<u8>; 2]> = gens
            .iter()
            .map(|&g| [self.word_letters(g), self.word_letters(self.inverse(g))])
            .collect();
        let nc = 2 * gens.len();
        let mut table = vec![0u32; s.order() * nc];
        for (i, &g) in s.elements.iter().enumerate() {
            for (j, w) in words.iter().enumerate() {
                table[i * nc + 2 * j] = local[&self.apply(g, &w[0])];
                table[i * nc + 2 * j + 1] = local[&self.apply(g, &w[1])];
            }
        }
        let sub = DenseGroup::from_right_table(gens.len(), s.order(), &table)?;
        // Map the renumbered ids back through the tree words.
        let embed: Vec<Elem> = (0..sub.order() as Elem)
            .map(|h| {
                sub.word_letters(h).iter().fold(0, |c, &l| {
                    let w = &words[(l / 2) as usize][(l % 2) as usize];
                    self.apply(c, w)
                })
            })
            .collect();
        Ok((sub, embed))
    }

    pub fn derived_subgroup(&self) -> Subgroup {
        let gens = self.generators();
        let mut seeds = Vec::new();
        for i in 0..gens.len() {
            for j in i + 1..gens.len() {
                seeds.push(self.commutator(gens[i], gens[j]));
            }
        }
        self.normal_closure(&seeds)
    }

    /// Terms `Z_1 ⊂ Z_2 ⊂ ... ⊂ Z_c = G` with factor invariants.
    pub fn upper_central_series(&self) -> Result<(Vec<Subgroup>, SeriesReport)> {
        let nc = 2 * self.ngens;
        let mut terms: Vec<Subgroup> = Vec::new();
        let mut label: Vec<u32> = (0..self.n as u32).collect();
        let mut prev = self.trivial_subgroup();
        let mut report = Vec::new();
        loop {
            let elements: Vec<Elem> = (0..self.n)
                .filter(|&g| {
                    (0..nc)
                        .step_by(2)
                        .all(|s| label[self.rmul[g * nc + s] as usize] == label[self.lmul[g * nc + s] as usize])
                })
                .map(|g| g as Elem)
                .collect();
            if elements.len() == prev.order() {
                if prev.order() != self.n {
                    return Err(Error::Relation("group is not nilpotent".into()));
                }
                break;
            }
            let generators = self.generating_set(&elements);
            let z = Subgroup { elements, generators };
            if !self.is_normal(&z) {
                return Err(Error::NotNormal);
            }
            let inv = self.factor_invariants(&z, &prev)?;
            report.push(SeriesTerm {
                order: z.order() as u64,
                generators: z.generators.clone(),
                factor_invariants: inv,
            });
            label = self.coset_labels(&z);
            prev = z.clone();
            terms.push(z);
            if prev.order() == self.n {
                break;
            }
        }
        let class = terms.len();
        Ok((terms, SeriesReport { terms: report, class }))
    }

    pub fn nilpotency_class(&self) -> Result<usize> {
        Ok(self.upper_central_series()?.1.class)
    }

    /// Abelian invariants of `a / b` for `b ⊴ a` with abelian quotient, as
    /// ascending elementary divisors.
    pub fn factor_invariants(&self, a: &Subgroup, b: &Subgroup) -> Result<Vec<u64>> {
        let bmask = b.mask(self.n);
        let amask = a.mask(self.n);
        if !b.elements.iter().all(|&g| amask[g as usize]) {
            return Err(Error::Relation("not a subgroup of the numerator".into()));
        }
        // Commutators of generators must land in b.
        for &x in &a.generators {
            for &y in &a.generators {
                if !bmask[self.commutator(x, y) as usize] {
                    return Err(Error::NotAbelian);
                }
            }
        }
        // One representative per coset of b, and its order modulo b.
        let label = {
            let mut label = vec![NONE; self.n];
            let mut next = 0;
            for &g in &a.elements {
                if label[g as usize] == NONE {
                    for &z in &b.elements {
                        label[self.mul(g, z) as usize] = next;
                    }
                    next += 1;
                }
            }
            label
        };
        let mut seen = vec![false; a.order() / b.order()];
        let mut orders: Vec<u64> = Vec::with_capacity(seen.len());
        for &g in &a.elements {
            let l = label[g as usize] as usize;
            if std::mem::replace(&mut seen[l], true) {
                continue;
            }
            let w = self.word_letters(g);
            let mut x = g;
            let mut k = 1u64;
            while !bmask[x as usize] {
                x = self.apply(x, &w);
                k += 1;
            }
            orders.push(k);
        }
        abelian_invariants_from_orders(&orders)
    }

    pub fn abelian_invariants(&self, s: &Subgroup) -> Result<Vec<u64>> {
        self.factor_invariants(s, &self.trivial_subgroup())
    }

    /// One representative per conjugacy class: the least id in the class.
    pub fn conjugacy_class_reps(&self) -> Vec<Elem> {
        let (reps, _) = self.conjugacy_classes();
        reps
    }

    /// Class representatives and, for each element, the index of its class.
    pub fn conjugacy_classes(&self) -> (Vec<Elem>, Vec<u32>) {
        let mut class = vec![NONE; self.n];
        let mut reps = Vec::new();
        let mut stack = Vec::new();
        for g in 0..self.n as Elem {
            if class[g as usize] != NONE {
                continue;
            }
            let id = reps.len() as u32;
            reps.push(g);
            class[g as usize] = id;
            stack.push(g);
            while let Some(h) = stack.pop() {
                for t in 0..self.ngens {
                    let c = self.conjugate_by_letter(h, 2 * t);
                    if class[c as usize] == NONE {
                        class[c as usize] = id;
                        stack.push(c);
                    }
                }
            }
        }
        (reps, class)
    }

    pub fn centralizer_order(&self, g: Elem) -> usize {
        let w = self.word_letters(g);
        (0..self.n as Elem)
            .filter(|&h| self.apply(h, &w) == self.mul(g, h))
            .count()
    }

    /// Orders of all elements, computed once by walking cyclic subgroups.
    pub fn orders(&self) -> &[u32] {
        self.orders.get_or_init(|| self.compute_orders())
    }

    fn compute_orders(&self) -> Vec<u32> {
        let mut ord = vec![0u32; self.n];
        ord[0] = 1;
        for g in 1..self.n as Elem {
            if ord[g as usize] != 0 {
                continue;
            }
            let w = self.word_letters(g);
            let mut powers = vec![g];
            let mut x = self.apply(g, &w);
            while x != 0 {
                powers.push(x);
                x = self.apply(x, &w);
            }
            let n = powers.len() as u32 + 1;
            for (k, &p) in powers.iter().enumerate() {
                if ord[p as usize] == 0 {
                    ord[p as usize] = n / num_integer::gcd(n, k as u32 + 1);
                }
            }
        }
        ord
    }

    /// The right multiplication table by letters, in memory order.
    pub fn right_table(&self) -> &[u32] {
        &self.rmul
    }
}

fn is_transitive(letters: &[Vec<u32>], deg: usize) -> bool {
    let mut seen = vec![false; deg];
    seen[0] = true;
    let mut stack = vec![0usize];
    let mut count = 1;
    while let Some(c) = stack.pop() {
        for p in letters {
            let d = p[c] as usize;
            if !seen[d] {
                seen[d] = true;
                count += 1;
                stack.push(d);
            }
        }
    }
    count == deg
}

fn factor_prime(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Elementary divisors of a finite abelian group given the order of each element.
pub fn abelian_invariants_from_orders(orders: &[u64]) -> Result<Vec<u64>> {
    let n = orders.len() as u64;
    let mut out = Vec::new();
    for q in factor_prime(n) {
        // count[k] = #{g : g^{q^k} = 1} restricted to the q-part.
        let qpart = |o: u64| {
            let mut o = o;
            let mut v = 1;
            while o.is_multiple_of(q) {
                o /= q;
                v *= q;
            }
            (v, o)
        };
        let mut log_count = Vec::new();
        let mut k = 0u32;
        loop {
            let qk = q.pow(k);
            let c = orders.iter().filter(|&&o| qpart(o).1 == 1 && qk % qpart(o).0 == 0).count() as u64;
            let mut l = 0u32;
            let mut c2 = c;
            while c2.is_multiple_of(q) && c2 > 1 {
                c2 /= q;
                l += 1;
            }
            if c2 != 1 {
                return Err(Error::Relation("element orders do not come from an abelian group".into()));
            }
            log_count.push(l);
            if k > 0 && log_count[k as usize] == log_count[k as usize - 1] {
                break;
            }
            k += 1;
        }
        // ge[j] = #{i : e_i >= j} = log_count[j] - log_count[j-1].
        let ge: Vec<u32> = (1..log_count.len()).map(|j| log_count[j] - log_count[j - 1]).collect();
        for j in 0..ge.len() {
            let next = ge.get(j + 1).copied().unwrap_or(0);
            for _ in 0..ge[j].saturating_sub(next) {
                out.push(q.pow(j as u32 + 1));
            }
        }
    }
    out.sort_unstable();
    if out.iter().product::<u64>() != n {
        return Err(Error::Relation("element orders do not come from an abelian group".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::{regular_table, EnumLimits};
    use crate::params::{Family, FamilyParams};
    use crate::presentations::presentation;

    fn family(f: Family, p: u64, m: u32, ell: i64) -> DenseGroup {
        let pres = presentation(&FamilyParams::new(f, p, m, ell).unwrap()).unwrap();
        DenseGroup::from_regular_table(&regular_table(&pres, EnumLimits::default()).unwrap(), DEFAULT_CAP).unwrap()
    }

    #[test]
    fn j2_3_basics() {
        let g = family(Family::J2, 2, 1, 1);
        assert_eq!(g.order(), 16);
        assert_eq!(g.element_order(0), 1);
        assert_eq!(g.nilpotency_class().unwrap(), 3);
        let reps = g.conjugacy_class_reps();
        let (_, class) = g.conjugacy_classes();
        let mut sizes = vec![0; reps.len()];
        for c in class {
            sizes[c as usize] += 1;
        }
        assert_eq!(sizes.iter().sum::<usize>(), 16);
        for a in 0..16 {
            for b in 0..16 {
                let ab = g.mul(a, b);
                assert_eq!(g.mul(ab, g.inverse(b)), a);
            }
        }
    }

    #[test]
    fn j2_5_center_and_abelianization() {
        let g = family(Family::J2, 2, 2, 1);
        assert_eq!(g.order(), 2048);
        let (a, b) = (g.gen(0), g.gen(1));
        assert_eq!(g.element_order(a), 32);
        let z = g.center();
        assert_eq!(z.elements, g.subgroup_closure(&[g.pow(a, 8)]).elements);
        let d = g.derived_subgroup();
        assert_eq!(g.order() / d.order(), 16);
        assert_eq!(g.factor_invariants(&g.whole(), &d).unwrap(), vec![4, 4]);
        let c = g.commutator(a, b);
        assert_eq!(g.subgroup_closure(&[g.pow(a, 8), g.pow(c, 2)]).elements, g.upper_central_series().unwrap().0[1].elements);
    }

    #[test]
    fn quotient_and_invariants() {
        let g = family(Family::J1, 3, 1, 1);
        let z = g.center();
        let q = g.quotient(&z).unwrap();
        assert_eq!(q.order() * z.order(), g.order());
        assert!(g.quotient(&g.subgroup_closure(&[g.gen(0)])).is_err());
        assert_eq!(g.quotient(&g.whole()).unwrap().order(), 1);
        assert_eq!(abelian_invariants_from_orders(&[1]).unwrap(), Vec::<u64>::new());
        assert_eq!(abelian_invariants_from_orders(&[1, 2, 2, 2]).unwrap(), vec![2, 2]);
        assert_eq!(abelian_invariants_from_orders(&[1, 2, 4, 4]).unwrap(), vec![4]);
        assert_eq!(abelian_invariants_from_orders(&[1, 2, 3, 3, 6, 6]).unwrap(), vec![2, 3]);
    }
}
