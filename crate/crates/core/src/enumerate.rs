//! Todd–Coxeter coset enumeration.
//!
//! Two strategies are provided: HLT (relator-based, with lookahead when the coset
//! table fills up) and Felsch (definition in row order, with deduction processing).
//! Coincidences are handled with a union-find forest and a queue, and a completed
//! table is renumbered in breadth-first order so that it is canonical.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::presentations::{Presentation, Word};

const NONE: u32 = u32::MAX;
/// Beyond this many letter traces a lookahead pass costs more than it saves.
const LOOKAHEAD_WORK: usize = 1 << 28;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Strategy {
    #[default]
    Hlt,
    Felsch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumLimits {
    pub max_cosets: usize,
    pub max_deductions: usize,
    pub strategy: Strategy,
}

impl Default for EnumLimits {
    fn default() -> Self {
        EnumLimits {
            max_cosets: 1 << 22,
            max_deductions: 1 << 20,
            strategy: Strategy::Hlt,
        }
    }
}

/// A closed coset table. Row 0 is the subgroup; columns are `x, x^-1, y, y^-1, ...`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetTable {
    pub ngens: usize,
    pub index: usize,
    /// Row-major, `index * 2 * ngens` entries.
    pub table: Vec<u32>,
}

impl CosetTable {
    pub fn ncols(&self) -> usize {
        2 * self.ngens
    }

    pub fn act(&self, coset: usize, col: usize) -> usize {
        self.table[coset * self.ncols() + col] as usize
    }

    pub fn trace(&self, coset: usize, w: &Word) -> usize {
        w.letters().iter().fold(coset, |c, &l| self.act(c, l))
    }

    /// Permutations induced by the generators (column `2g`).
    pub fn permutations(&self) -> PermGroupGens {
        let perms = (0..self.ngens)
            .map(|g| (0..self.index).map(|c| self.act(c, 2 * g) as u32).collect())
            .collect();
        PermGroupGens {
            degree: self.index,
            perms,
            faithful: false,
        }
    }

    /// Every relator closes at every coset; column pairs are mutually inverse.
    pub fn is_valid_for(&self, pres: &Presentation, subgroup: &[Word]) -> bool {
        let nc = self.ncols();
        if self.table.len() != self.index * nc || self.table.iter().any(|&v| v as usize >= self.index) {
            return false;
        }
        for c in 0..self.index {
            for col in 0..nc {
                if self.act(self.act(c, col), col ^ 1) != c {
                    return false;
                }
            }
        }
        let rels: Vec<Vec<usize>> = pres.relators.iter().map(|w| w.letters()).collect();
        for c in 0..self.index {
            for r in &rels {
                if r.iter().fold(c, |d, &l| self.act(d, l)) != c {
                    return false;
                }
            }
        }
        subgroup.iter().all(|w| self.trace(0, w) == 0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermGroupGens {
    pub degree: usize,
    pub perms: Vec<Vec<u32>>,
    pub faithful: bool,
}

impl PermGroupGens {
    pub fn is_valid(&self) -> bool {
        self.perms.iter().all(|p| {
            let mut seen = vec![false; self.degree];
            p.len() == self.degree
                && p.iter().all(|&i| {
                    let i = i as usize;
                    i < self.degree && !std::mem::replace(&mut seen[i], true)
                })
        })
    }

    /// Size of the generated group, or `None` once it exceeds `cap`.
    pub fn closure_size(&self, cap: usize) -> Option<usize> {
        use std::collections::HashSet;
        let id: Vec<u32> = (0..self.degree as u32).collect();
        let mut seen: HashSet<Vec<u32>> = HashSet::new();
        seen.insert(id.clone());
        let mut frontier = vec![id];
        while let Some(g) = frontier.pop() {
            for s in &self.perms {
                // g then s
                let h: Vec<u32> = g.iter().map(|&i| s[i as usize]).collect();
                if seen.insert(h.clone()) {
                    if seen.len() > cap {
                        return None;
                    }
                    frontier.push(h);
                }
            }
        }
        Some(seen.len())
    }
}

/// Resumable enumeration state.
pub struct Enumerator {
    ngens: usize,
    ncols: usize,
    relators: Vec<Vec<usize>>,
    subgroup: Vec<Vec<usize>>,
    /// Felsch: cyclic conjugates of relators indexed by first letter.
    rotations: Vec<Vec<Vec<usize>>>,
    limits: EnumLimits,
    table: Vec<u32>,
    parent: Vec<u32>,
    queue: Vec<u32>,
    deductions: Vec<(u32, u32)>,
    deductions_overflowed: bool,
    rows: usize,
    live: usize,
    cursor: usize,
    started: bool,
    /// Total cosets ever defined.
    pub total_defined: usize,
    /// Largest number of simultaneously live cosets.
    pub max_live: usize,
}

enum Step {
    Done,
    Full,
}

impl Enumerator {
    pub fn new(pres: &Presentation, subgroup: &[Word], limits: EnumLimits) -> Self {
        let ngens = pres.ngens();
        let ncols = 2 * ngens;
        let mut relators: Vec<Vec<usize>> = Vec::new();
        for w in &pres.relators {
            let l = w.letters();
            if !l.is_empty() && !relators.contains(&l) {
                relators.push(l);
            }
        }
        // Short relators first: they close rows sooner.
        relators.sort_by_key(|r| r.len());
        let mut rotations = vec![Vec::new(); ncols];
        for r in &relators {
            for w in [r.clone(), invert_letters(r)] {
                for k in 0..w.len() {
                    let mut rot = w[k..].to_vec();
                    rot.extend_from_slice(&w[..k]);
                    if !rotations[rot[0]].contains(&rot) {
                        rotations[rot[0]].push(rot);
                    }
                }
            }
        }
        let subgroup = subgroup.iter().map(|w| w.letters()).filter(|l| !l.is_empty()).collect();
        let mut e = Enumerator {
            ngens,
            ncols,
            relators,
            subgroup,
            rotations,
            limits,
            table: Vec::new(),
            parent: Vec::new(),
            queue: Vec::new(),
            deductions: Vec::new(),
            deductions_overflowed: false,
            rows: 0,
            live: 0,
            cursor: 0,
            started: false,
            total_defined: 0,
            max_live: 0,
        };
        e.new_row();
        e
    }

    pub fn set_max_cosets(&mut self, max: usize) {
        self.limits.max_cosets = max;
    }

    pub fn live_cosets(&self) -> usize {
        self.live
    }

    #[inline]
    fn get(&self, c: usize, col: usize) -> u32 {
        self.table[c * self.ncols + col]
    }

    #[inline]
    fn set(&mut self, c: usize, col: usize, v: u32) {
        self.table[c * self.ncols + col] = v;
    }

    #[inline]
    fn is_live(&self, c: usize) -> bool {
        self.parent[c] as usize == c
    }

    fn new_row(&mut self) -> usize {
        let c = self.rows;
        self.table.extend(std::iter::repeat_n(NONE, self.ncols));
        self.parent.push(c as u32);
        self.rows += 1;
        self.live += 1;
        self.total_defined += 1;
        self.max_live = self.max_live.max(self.live);
        c
    }

    fn define(&mut self, c: usize, col: usize) -> Option<usize> {
        if self.rows >= self.limits.max_cosets {
            return None;
        }
        let d = self.new_row();
        self.set(c, col, d as u32);
        self.set(d, col ^ 1, c as u32);
        self.push_deduction(c, col);
        Some(d)
    }

    fn push_deduction(&mut self, c: usize, col: usize) {
        if self.limits.strategy != Strategy::Felsch {
            return;
        }
        if self.deductions.len() >= self.limits.max_deductions {
            self.deductions_overflowed = true;
        } else {
            self.deductions.push((c as u32, col as u32));
        }
    }

    fn rep(&mut self, c: usize) -> usize {
        let mut r = c;
        while self.parent[r] as usize != r {
            r = self.parent[r] as usize;
        }
        let mut k = c;
        while self.parent[k] as usize != r {
            let next = self.parent[k] as usize;
            self.parent[k] = r as u32;
            k = next;
        }
        r
    }

    fn merge(&mut self, a: usize, b: usize) {
        let (a, b) = (self.rep(a), self.rep(b));
        if a != b {
            let (lo, hi) = (a.min(b), a.max(b));
            self.parent[hi] = lo as u32;
            self.live -= 1;
            self.queue.push(hi as u32);
        }
    }

    fn coincidence(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        self.queue.clear();
        self.merge(a, b);
        let mut i = 0;
        while i < self.queue.len() {
            let g = self.queue[i] as usize;
            i += 1;
            for col in 0..self.ncols {
                let d = self.get(g, col);
                if d == NONE {
                    continue;
                }
                let d = d as usize;
                self.set(g, col, NONE);
                if self.get(d, col ^ 1) as usize == g {
                    self.set(d, col ^ 1, NONE);
                }
                let mu = self.rep(g);
                let nu = self.rep(d);
                let a = self.get(mu, col);
                if a != NONE {
                    self.merge(nu, a as usize);
                } else {
                    let b = self.get(nu, col ^ 1);
                    if b != NONE {
                        self.merge(mu, b as usize);
                    } else {
                        self.set(mu, col, nu as u32);
                        self.set(nu, col ^ 1, mu as u32);
                        self.push_deduction(mu, col);
                    }
                }
            }
        }
        self.queue.clear();
    }

    /// Scans `w` from `c`, defining cosets if `fill`. Returns false when the
    /// table is full.
    fn scan(&mut self, c: usize, w: &[usize], fill: bool) -> bool {
        let mut f = c;
        let mut b = c;
        let mut i = 0usize;
        let mut j = w.len();
        loop {
            while i < j {
                let v = self.get(f, w[i]);
                if v == NONE {
                    break;
                }
                f = v as usize;
                i += 1;
            }
            if i == j {
                if f != b {
                    self.coincidence(f, b);
                }
                return true;
            }
            while j > i {
                let v = self.get(b, w[j - 1] ^ 1);
                if v == NONE {
                    break;
                }
                b = v as usize;
                j -= 1;
            }
            if j == i {
                self.coincidence(f, b);
                return true;
            }
            if j == i + 1 {
                let x = w[i];
                self.set(f, x, b as u32);
                self.set(b, x ^ 1, f as u32);
                self.push_deduction(f, x);
                return true;
            }
            if !fill {
                return true;
            }
            if self.define(f, w[i]).is_none() {
                return false;
            }
        }
    }

    fn process_deductions(&mut self) {
        while let Some((c, col)) = self.deductions.pop() {
            let (c, col) = (c as usize, col as usize);
            if !self.is_live(c) {
                continue;
            }
            let n = self.rotations[col].len();
            for k in 0..n {
                if !self.is_live(c) {
                    break;
                }
                let w = std::mem::take(&mut self.rotations[col][k]);
                self.scan(c, &w, false);
                self.rotations[col][k] = w;
            }
            let d = self.get(c, col);
            if d == NONE {
                continue;
            }
            let d = self.rep(d as usize);
            let n = self.rotations[col ^ 1].len();
            for k in 0..n {
                if !self.is_live(d) {
                    break;
                }
                let w = std::mem::take(&mut self.rotations[col ^ 1][k]);
                self.scan(d, &w, false);
                self.rotations[col ^ 1][k] = w;
            }
        }
    }

    /// One pass scanning all relators at all live cosets without defining.
    fn lookahead(&mut self) {
        let rels = std::mem::take(&mut self.relators);
        for c in 0..self.rows {
            for r in &rels {
                if !self.is_live(c) {
                    break;
                }
                self.scan(c, r, false);
            }
        }
        self.relators = rels;
        self.deductions.clear();
        self.deductions_overflowed = false;
    }

    /// Renumbers live cosets consecutively, keeping their order.
    fn compact(&mut self) {
        if self.live == self.rows {
            return;
        }
        let mut newid = vec![NONE; self.rows];
        let mut k = 0u32;
        for c in 0..self.rows {
            if self.is_live(c) {
                newid[c] = k;
                k += 1;
            }
        }
        let nc = self.ncols;
        let mut t = Vec::with_capacity(k as usize * nc);
        for c in 0..self.rows {
            if newid[c] == NONE {
                continue;
            }
            for col in 0..nc {
                let v = self.table[c * nc + col];
                t.push(if v == NONE { NONE } else { newid[v as usize] });
            }
        }
        // Cursor moves to the first live coset at or after it.
        let mut cur = self.cursor;
        while cur < self.rows && newid[cur] == NONE {
            cur += 1;
        }
        self.cursor = if cur < self.rows { newid[cur] as usize } else { k as usize };
        self.deductions = self
            .deductions
            .iter()
            .filter(|&&(c, _)| newid[c as usize] != NONE)
            .map(|&(c, col)| (newid[c as usize], col))
            .collect();
        self.table = t;
        self.rows = k as usize;
        self.live = k as usize;
        self.parent = (0..k).collect();
    }

    fn restart_subgroup(&mut self) -> bool {
        let sub = std::mem::take(&mut self.subgroup);
        let mut ok = true;
        for w in &sub {
            if !self.scan(0, w, true) {
                ok = false;
                break;
            }
        }
        self.subgroup = sub;
        ok
    }

    fn step_hlt(&mut self) -> Step {
        let rels = std::mem::take(&mut self.relators);
        let result = loop {
            if self.cursor >= self.rows {
                break Step::Done;
            }
            let c = self.cursor;
            if self.is_live(c) {
                let mut full = false;
                for r in &rels {
                    if !self.is_live(c) {
                        break;
                    }
                    if !self.scan(c, r, true) {
                        full = true;
                        break;
                    }
                }
                if full {
                    break Step::Full;
                }
                if self.is_live(c) {
                    for col in 0..self.ncols {
                        if self.get(c, col) == NONE && self.define(c, col).is_none() {
                            full = true;
                            break;
                        }
                    }
                }
                if full {
                    break Step::Full;
                }
            }
            self.cursor += 1;
        };
        self.relators = rels;
        result
    }

    fn step_felsch(&mut self) -> Step {
        loop {
            self.process_deductions();
            if self.deductions_overflowed {
                self.lookahead();
            }
            while self.cursor < self.rows {
                let c = self.cursor;
                if self.is_live(c) {
                    if let Some(col) = (0..self.ncols).find(|&col| self.get(c, col) == NONE) {
                        if self.define(c, col).is_none() {
                            return Step::Full;
                        }
                        break;
                    }
                }
                self.cursor += 1;
            }
            if self.cursor >= self.rows && self.deductions.is_empty() {
                return Step::Done;
            }
        }
    }

    /// Runs to completion or until the coset limit is hit; can be called again
    /// after raising the limit.
    pub fn run(&mut self) -> Result<CosetTable> {
        if !self.started {
            if !self.restart_subgroup() {
                return Err(self.out_of_space());
            }
            self.started = true;
        }
        loop {
            let step = match self.limits.strategy {
                Strategy::Hlt => self.step_hlt(),
                Strategy::Felsch => self.step_felsch(),
            };
            match step {
                Step::Done => {
                    if self.deductions_overflowed || !self.closed_everywhere() {
                        self.lookahead();
                        self.cursor = 0;
                        continue;
                    }
                    return Ok(self.finish());
                }
                Step::Full => {
                    let before = self.live;
                    let work = self.rows.saturating_mul(self.relators.iter().map(|r| r.len()).sum::<usize>());
                    if work > LOOKAHEAD_WORK {
                        return Err(self.out_of_space());
                    }
                    self.lookahead();
                    self.compact();
                    // Lookahead that recovers almost nothing would only thrash.
                    if before - self.live <= self.limits.max_cosets / 8 && self.rows >= self.limits.max_cosets {
                        return Err(self.out_of_space());
                    }
                }
            }
        }
    }

    fn out_of_space(&self) -> Error {
        Error::OutOfSpace {
            live: self.live,
            limit: self.limits.max_cosets,
        }
    }

    fn closed_everywhere(&mut self) -> bool {
        for c in 0..self.rows {
            if !self.is_live(c) {
                continue;
            }
            for col in 0..self.ncols {
                if self.get(c, col) == NONE {
                    return false;
                }
            }
        }
        let rels = std::mem::take(&mut self.relators);
        let mut ok = true;
        'outer: for c in 0..self.rows {
            if !self.is_live(c) {
                continue;
            }
            for r in &rels {
                let e = r.iter().fold(c, |d, &l| self.get(d, l) as usize);
                if e != c {
                    ok = false;
                    break 'outer;
                }
            }
        }
        self.relators = rels;
        ok
    }

    /// Compacts and renumbers in breadth-first order from coset 0.
    fn finish(&mut self) -> CosetTable {
        self.compact();
        standardize(self.ngens, self.rows, &self.table)
    }
}

fn invert_letters(w: &[usize]) -> Vec<usize> {
    w.iter().rev().map(|&l| l ^ 1).collect()
}

pub fn coset_enumerate(pres: &Presentation, subgroup: &[Word], limits: EnumLimits) -> Result<CosetTable> {
    Enumerator::new(pres, subgroup, limits).run()
}

pub fn order(pres: &Presentation) -> Result<usize> {
    order_with(pres, EnumLimits::default())
}

pub fn order_with(pres: &Presentation, limits: EnumLimits) -> Result<usize> {
    Ok(regular_table(pres, limits)?.index)
}

/// Regular action; always faithful.
pub fn regular_action(pres: &Presentation, limits: EnumLimits) -> Result<PermGroupGens> {
    let t = regular_table(pres, limits)?;
    let mut g = t.permutations();
    g.faithful = true;
    Ok(g)
}

/// Coset table of the trivial subgroup.
///
/// The cosets of the cyclic subgroup `H = ⟨g_0⟩` are enumerated first (far fewer
/// intermediate cosets than a direct regular enumeration). With a transversal
/// `t_c` taken from the breadth-first tree, every `t_c s t_{cs}^{-1}` lies in `H`
/// and equals `g_0^{e(c,s)}`. Tracing each relator from each coset gives linear
/// equations for the `e(c,s)` modulo `|H|`, which determine both `|H|` and the
/// regular action on the pairs `g_0^k t_c`. The result is checked against every
/// relator at every element before it is returned.
pub fn regular_table(pres: &Presentation, limits: EnumLimits) -> Result<CosetTable> {
    if pres.ngens() == 0 {
        return Err(Error::InvalidParams("presentation without generators".into()));
    }
    // The two strategies fail on different presentations, so the second is
    // tried before giving up.
    let h = coset_enumerate(pres, &[Word::gen(0)], limits).or_else(|e| match e {
        Error::OutOfSpace { .. } => {
            let other = match limits.strategy {
                Strategy::Hlt => Strategy::Felsch,
                Strategy::Felsch => Strategy::Hlt,
            };
            coset_enumerate(pres, &[Word::gen(0)], EnumLimits { strategy: other, ..limits })
        }
        e => Err(e),
    })?;
    let (vals, modulus) = crate::lift::schreier_exponents(pres, &h)?;
    let n = h.index.checked_mul(modulus as usize).filter(|&n| n <= limits.max_cosets).ok_or(
        Error::OutOfSpace {
            live: h.index,
            limit: limits.max_cosets,
        },
    )?;
    let m = modulus as usize;
    let nc = h.ncols();
    let mut raw = vec![0u32; n * nc];
    for c in 0..h.index {
        for k in 0..m {
            let id = c * m + k;
            for col in 0..nc {
                let d = h.act(c, col);
                let e = (k as i64 + vals[c * nc + col]).rem_euclid(modulus) as usize;
                raw[id * nc + col] = (d * m + e) as u32;
            }
        }
    }
    let t = standardize(h.ngens, n, &raw);
    if !t.is_valid_for(pres, &[]) {
        return Err(Error::Relation("lifted regular table violates a relator".into()));
    }
    Ok(t)
}

/// Renumbers a closed table breadth-first from row 0.
fn standardize(ngens: usize, n: usize, raw: &[u32]) -> CosetTable {
    let nc = 2 * ngens;
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
    let mut table = Vec::with_capacity(order.len() * nc);
    for &c in &order {
        for col in 0..nc {
            table.push(newid[raw[c * nc + col] as usize]);
        }
    }
    CosetTable {
        ngens,
        index: order.len(),
        table,
    }
}

/// Action on the cosets of `⟨subgroup⟩`; falls back to the regular action if that
/// action is not faithful.
pub fn faithful_action(pres: &Presentation, subgroup: &Word, limits: EnumLimits) -> Result<PermGroupGens> {
    let n = order_with(pres, limits)?;
    let t = coset_enumerate(pres, std::slice::from_ref(subgroup), limits)?;
    let mut g = t.permutations();
    if g.closure_size(n) == Some(n) {
        g.faithful = true;
        Ok(g)
    } else {
        regular_action(pres, limits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{Family, FamilyParams};
    use crate::presentations::{macdonald_presentation, presentation};

    fn felsch() -> EnumLimits {
        EnumLimits {
            strategy: Strategy::Felsch,
            ..EnumLimits::default()
        }
    }

    #[test]
    fn small_groups() {
        // S3 = <x, y | x^2, y^3, (xy)^2>
        let s3 = Presentation::parse("x, y | x^2, y^3, (x y)^2").unwrap();
        assert_eq!(order(&s3).unwrap(), 6);
        assert_eq!(order_with(&s3, felsch()).unwrap(), 6);
        let t = coset_enumerate(&s3, &[Word::gen(0)], EnumLimits::default()).unwrap();
        assert_eq!(t.index, 3);
        assert!(t.is_valid_for(&s3, &[Word::gen(0)]));
        let triv = Presentation::parse("x, y | x, y").unwrap();
        assert_eq!(coset_enumerate(&triv, &[Word::gen(0), Word::gen(1)], EnumLimits::default()).unwrap().index, 1);
    }

    #[test]
    fn j2_3_and_trivial_macdonald() {
        let p = presentation(&FamilyParams::new(Family::J2, 2, 1, 1).unwrap()).unwrap();
        assert_eq!(order(&p).unwrap(), 16);
        assert_eq!(order_with(&p, felsch()).unwrap(), 16);
        assert_eq!(order(&macdonald_presentation(0).unwrap()).unwrap(), 1);
        assert_eq!(order(&macdonald_presentation(2).unwrap()).unwrap(), 1);
        assert_eq!(order(&macdonald_presentation(3).unwrap()).unwrap(), 16);
    }

    #[test]
    fn out_of_space_is_resumable() {
        let p = presentation(&FamilyParams::new(Family::J2, 2, 2, 1).unwrap()).unwrap();
        let mut e = Enumerator::new(&p, &[], EnumLimits { max_cosets: 200, ..EnumLimits::default() });
        assert!(matches!(e.run(), Err(Error::OutOfSpace { .. })));
        e.set_max_cosets(1 << 16);
        let t = e.run().unwrap();
        assert_eq!(t.index, 2048);
        assert!(t.is_valid_for(&p, &[]));
    }

    #[test]
    fn faithful_over_subgroup() {
        let p = presentation(&FamilyParams::new(Family::J2, 2, 2, 1).unwrap()).unwrap();
        let g = faithful_action(&p, &Word::gen(0), EnumLimits::default()).unwrap();
        assert!(g.faithful && g.is_valid());
        assert_eq!(g.closure_size(1 << 12), Some(2048));
    }
}
