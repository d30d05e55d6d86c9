//! Homomorphism checks, the explicit isomorphisms between family members, and
//! pruned isomorphism search.
//!
//! Non-isomorphism is only ever concluded from an exhausted search. Element
//! orders, class sizes and the orders of products and commutators of the
//! generator images are used to prune candidates, never as verdicts.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::collect::{Collector, ExpTriple, NfIndex};
use crate::error::{Error, Result};
use crate::group::{DenseGroup, Elem, Subgroup};
use crate::params::{find_f, find_t, rem, Case, Family, FamilyParams};
use crate::presentations::Presentation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checks {
    pub relations_hold: bool,
    pub generates: bool,
    pub orders_match: bool,
    pub bijective: bool,
}

/// A generator image, as a normal form when a collector is available.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Image {
    Nf(ExpTriple),
    Id(Elem),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsoCertificate {
    pub source: String,
    pub target: String,
    pub img_x: Image,
    pub img_y: Image,
    /// Images of further generators (dense searches only).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub img_rest: Vec<Image>,
    pub checks: Checks,
    /// Seconds.
    pub elapsed: f64,
    #[serde(skip)]
    pub images: Vec<Elem>,
}

/// Why a candidate map is not an isomorphism.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HomFailure {
    Arity { expected: usize, got: usize },
    RelatorViolated { index: usize, relator: String },
    NotGenerating { closure_at_least: usize, order: usize },
    OrderMismatch { source: usize, target: usize },
}

impl std::fmt::Display for HomFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            HomFailure::Arity { expected, got } => write!(f, "{got} images for {expected} generators"),
            HomFailure::RelatorViolated { relator, .. } => write!(f, "relator {relator} is not preserved"),
            HomFailure::NotGenerating { closure_at_least, order } => {
                write!(f, "images generate a subgroup of order {closure_at_least} < {order}")
            }
            HomFailure::OrderMismatch { source, target } => write!(f, "orders differ: {source} vs {target}"),
        }
    }
}

impl From<HomFailure> for Error {
    fn from(h: HomFailure) -> Error {
        Error::Relation(h.to_string())
    }
}

/// True when `images` generate `g`; stops as soon as the closure passes half
/// the order.
pub fn generates(g: &DenseGroup, images: &[Elem]) -> (bool, usize) {
    let n = g.order();
    let words: Vec<Vec<u8>> = images.iter().map(|&s| g.word_letters(s)).collect();
    let mut mask = vec![false; n];
    mask[0] = true;
    let mut list = vec![0 as Elem];
    let mut i = 0;
    while i < list.len() {
        if 2 * list.len() > n {
            return (true, n);
        }
        let h = list[i];
        i += 1;
        for w in &words {
            let k = g.apply(h, w);
            if !mask[k as usize] {
                mask[k as usize] = true;
                list.push(k);
            }
        }
    }
    (list.len() == n, list.len())
}

fn relator_order(pres: &Presentation) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..pres.relators.len()).collect();
    idx.sort_by_key(|&i| (pres.relators[i].syllables().len(), pres.relators[i].len()));
    idx
}

fn first_violated(pres: &Presentation, order: &[usize], target: &DenseGroup, images: &[Elem]) -> Option<usize> {
    order.iter().copied().find(|&i| target.eval(&pres.relators[i], images) != 0)
}

/// Checks that the generator images extend to an isomorphism from the group
/// of `pres` (of order `source_order`) onto `target`.
pub fn check_hom(
    pres: &Presentation,
    source_order: usize,
    target: &DenseGroup,
    images: &[Elem],
) -> std::result::Result<Checks, HomFailure> {
    if images.len() != pres.ngens() {
        return Err(HomFailure::Arity {
            expected: pres.ngens(),
            got: images.len(),
        });
    }
    if let Some(i) = first_violated(pres, &relator_order(pres), target, images) {
        return Err(HomFailure::RelatorViolated {
            index: i,
            relator: pres.relators[i].display_with(&pres.names),
        });
    }
    let (gen, size) = generates(target, images);
    if !gen {
        return Err(HomFailure::NotGenerating {
            closure_at_least: size,
            order: target.order(),
        });
    }
    if source_order != target.order() {
        return Err(HomFailure::OrderMismatch {
            source: source_order,
            target: target.order(),
        });
    }
    Ok(Checks {
        relations_hold: true,
        generates: true,
        orders_match: true,
        bijective: true,
    })
}

/// Optional normal-form view of the target for reporting images.
pub type NfView<'a> = Option<(&'a Collector, &'a NfIndex)>;

fn image_of(nf: NfView, g: Elem) -> Image {
    match nf {
        Some((c, idx)) => Image::Nf(idx.nf(c, g)),
        None => Image::Id(g),
    }
}

fn make_certificate(source: &str, target: &str, images: &[Elem], checks: Checks, nf: NfView, start: Instant) -> IsoCertificate {
    IsoCertificate {
        source: source.to_string(),
        target: target.to_string(),
        img_x: image_of(nf, images[0]),
        img_y: image_of(nf, images.get(1).copied().unwrap_or(0)),
        img_rest: images.iter().skip(2).map(|&g| image_of(nf, g)).collect(),
        checks,
        elapsed: start.elapsed().as_secs_f64(),
        images: images.to_vec(),
    }
}

/// Runs `check_hom` and wraps a success as a certificate.
pub fn certify(
    source_label: &str,
    target_label: &str,
    pres: &Presentation,
    source_order: usize,
    target: &DenseGroup,
    images: &[Elem],
    nf: NfView,
) -> std::result::Result<IsoCertificate, HomFailure> {
    let start = Instant::now();
    let checks = check_hom(pres, source_order, target, images)?;
    Ok(make_certificate(source_label, target_label, images, checks, nf, start))
}

/// The explicit maps between family members, as images of the source
/// generators in terms of the target generators `A`, `B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "map", rename_all = "snake_case")]
pub enum MapKind {
    /// `X ↦ A, Y ↦ B^f`.
    Iso { f: i64 },
    /// `x ↦ a, y ↦ b^t` between K_1 groups.
    Cta { t: i64 },
    /// `x ↦ a, y ↦ b^t` between K_2 groups.
    Tas { t: i64 },
    /// `X ↦ A^i, Y ↦ B^j`.
    Xa { i: i64, j: i64 },
    /// `X ↦ (A B^r)^i, Y ↦ B^j`.
    Xar { i: i64, j: i64 },
    /// `X ↦ A^(1+s+2si) B^(2sj), Y ↦ A^s B A^(2sa) B^(2sb)`.
    As { i: i64, j: i64, a: i64, b: i64 },
}

/// Images of the source generators under `kind` in `target`.
pub fn map_images(kind: MapKind, target: &DenseGroup, s: i64, r: i64) -> [Elem; 2] {
    let (a, b) = (target.gen(0), target.gen(1));
    let p = |g: Elem, e: i64| target.pow(g, e);
    match kind {
        MapKind::Iso { f } => [a, p(b, f)],
        MapKind::Cta { t } | MapKind::Tas { t } => [a, p(b, t)],
        MapKind::Xa { i, j } => [p(a, i), p(b, j)],
        MapKind::Xar { i, j } => [p(target.mul(a, p(b, r)), i), p(b, j)],
        MapKind::As { i, j, a: ea, b: eb } => {
            let x = target.mul(p(a, 1 + s + 2 * s * i), p(b, 2 * s * j));
            let y = [p(a, s), b, p(a, 2 * s * ea), p(b, 2 * s * eb)]
                .into_iter()
                .fold(0, |acc, g| target.mul(acc, g));
            [x, y]
        }
    }
}

fn case2_sr(params: &FamilyParams) -> (i64, i64) {
    params.case2().map(|c| (c.s, c.r.unwrap_or(0))).unwrap_or((1, 0))
}

/// Solutions `(i, j, a, b)` in `[0, s)^4` of the congruences that make the
/// map (as) a homomorphism, for `α' ≡ α mod 2^(2m-1)`, `α' ≢ α mod 2^(2m)`.
pub fn necj2_solutions(params: &FamilyParams, ell_prime: i64) -> Result<Vec<[i64; 4]>> {
    let c = params
        .case2()
        .ok_or_else(|| Error::InvalidParams("needs Case 2 with m >= 2".into()))?;
    let (s, r) = (c.s, c.r.unwrap_or(0));
    if s < 2 {
        return Err(Error::InvalidParams("needs m >= 2".into()));
    }
    let ell = params.ell;
    let d = ell_prime - ell;
    if rem(d, s) != 0 || rem(d / s, 2) != 1 {
        return Err(Error::InvalidParams(format!(
            "need ell' = ell + q s with q odd (ell={ell}, ell'={ell_prime}, s={s})"
        )));
    }
    let q = d / s;
    let mut out = Vec::new();
    for i in 0..s {
        for j in 0..s {
            for a in 0..s {
                for b in 0..s {
                    let p6 = rem(ell * (i + b + 2 * j) - (-ell + r + (q + ell) / 2), s) == 0;
                    let p8 = rem(ell * (i + b + 2 * a) - (q - 3 * ell) / 2, s) == 0;
                    let p9 = rem(2 * ell * (j - a) - (r + ell), s) == 0;
                    if p6 && p8 && p9 {
                        out.push([i, j, a, b]);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// For the H_2 maps with `m >= 3`: candidate exponents satisfying the residue
/// conditions under which (XA), resp. (XAr), is an isomorphism, smallest first.
pub fn h2_map_candidates(params: &FamilyParams, ell_prime: i64) -> Result<Vec<MapKind>> {
    let c = params
        .case2()
        .ok_or_else(|| Error::InvalidParams("needs Case 2".into()))?;
    let (s, r) = (c.s, c.r.unwrap_or(0));
    if params.m < 3 {
        return Err(Error::InvalidParams("the H_2 maps need m >= 3".into()));
    }
    let ord = 2 * c.u;
    let ell = params.ell;
    let mut out = Vec::new();
    if rem(ell_prime - ell, s) == 0 {
        for i in (1..ord).step_by(2 * s as usize) {
            for j in (1..ord).step_by(2 * s as usize) {
                out.push(MapKind::Xa { i, j });
            }
        }
    } else if rem(ell_prime - ell, r) == 0 {
        for i in (1..ord).step_by(2 * s as usize) {
            for k in (1..ord).step_by(4) {
                let j = 1 + k * r;
                if j < ord {
                    out.push(MapKind::Xar { i, j });
                }
            }
        }
    }
    Ok(out)
}

/// The map the constructive arguments give from the group with parameter
/// `ell_prime` to the group of `target_params`; the first candidate that
/// passes `check_hom` is returned.
pub fn explicit_sufficiency_map(
    target_params: &FamilyParams,
    ell_prime: i64,
    source_pres: &Presentation,
    source_order: usize,
    target: &DenseGroup,
    nf: NfView,
) -> Result<(MapKind, IsoCertificate)> {
    let start = Instant::now();
    let src = target_params.with_ell(ell_prime)?;
    let (s, r) = case2_sr(target_params);
    let pm = target_params.pm();
    let try_all = |cands: Vec<MapKind>| -> Result<(MapKind, IsoCertificate)> {
        let mut last = None;
        for kind in cands {
            let images = map_images(kind, target, s, r);
            match check_hom(source_pres, source_order, target, &images) {
                Ok(checks) => {
                    let cert = make_certificate(&src.label(), &target_params.label(), &images, checks, nf, start);
                    return Ok((kind, cert));
                }
                Err(e) => last = Some(e),
            }
        }
        Err(match last {
            Some(e) => e.into(),
            None => Error::NoExplicitMap(format!("{} -> {}", src.label(), target_params.label())),
        })
    };
    let ell = target_params.ell;
    use Family::*;
    match target_params.family {
        J1 | J2 | J3 | H1 => {
            let congruent = target_params.case == Some(Case::Case3) || rem(ell_prime - ell, pm) == 0;
            if congruent {
                let f = find_f(target_params, ell_prime)?;
                let f: i64 = f.try_into().map_err(|_| Error::InvalidParams("f too large".into()))?;
                return try_all(vec![MapKind::Iso { f }]);
            }
            if target_params.family == J2 && target_params.m == 2 {
                let sols = necj2_solutions(target_params, ell_prime)?;
                return try_all(sols.into_iter().map(|[i, j, a, b]| MapKind::As { i, j, a, b }).collect());
            }
            Err(Error::NoExplicitMap(format!("{} -> {}", src.label(), target_params.label())))
        }
        K1 => {
            let t = find_t(target_params, src.alpha)?;
            try_all(vec![MapKind::Cta { t }])
        }
        K2 => {
            let t = find_t(target_params, src.alpha)?;
            try_all(vec![MapKind::Tas { t }])
        }
        H2 if target_params.m >= 3 => try_all(h2_map_candidates(target_params, ell_prime)?),
        H2 if rem(ell_prime - ell, pm) == 0 => {
            let f = find_f(target_params, ell_prime)?;
            let f: i64 = f.try_into().map_err(|_| Error::InvalidParams("f too large".into()))?;
            try_all(vec![MapKind::Iso { f }])
        }
        _ => Err(Error::NoExplicitMap(format!("{} -> {}", src.label(), target_params.label()))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub time_limit: Duration,
    pub max_candidates: u64,
    pub workers: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            time_limit: Duration::from_secs(20 * 60),
            max_candidates: u64::MAX,
            workers: rayon::current_num_threads(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum SearchOutcome {
    Found { certificate: IsoCertificate, candidates: u64 },
    /// Every candidate was rejected: the groups are not isomorphic.
    Exhausted { candidates: u64 },
    /// The budget ran out first; nothing is concluded.
    Timeout { candidates: u64 },
}

impl SearchOutcome {
    pub fn certificate(&self) -> Option<&IsoCertificate> {
        match self {
            SearchOutcome::Found { certificate, .. } => Some(certificate),
            _ => None,
        }
    }

    pub fn is_exhausted(&self) -> bool {
        matches!(self, SearchOutcome::Exhausted { .. })
    }
}

enum Block {
    Found(Vec<Elem>),
    Timeout,
}

struct Meter {
    start: Instant,
    budget: SearchBudget,
    count: AtomicU64,
    stop: AtomicBool,
}

impl Meter {
    fn new(budget: SearchBudget) -> Meter {
        Meter {
            start: Instant::now(),
            budget,
            count: AtomicU64::new(0),
            stop: AtomicBool::new(false),
        }
    }

    /// Adds `k` candidates; false once the budget is spent.
    fn tick(&self, k: u64) -> bool {
        let c = self.count.fetch_add(k, Ordering::Relaxed) + k;
        if c > self.budget.max_candidates || self.start.elapsed() > self.budget.time_limit {
            self.stop.store(true, Ordering::Relaxed);
        }
        !self.stop.load(Ordering::Relaxed)
    }

    fn total(&self) -> u64 {
        self.count.load(Ordering::Relaxed)
    }
}

fn in_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> T {
    match rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

/// Invariants of a generator tuple used for pruning.
/// Source, target, candidate pools, meter, pair index and wanted profile.
type SearchCtx<'a> = (
    &'a DenseGroup,
    &'a DenseGroup,
    &'a Vec<Vec<Elem>>,
    &'a Meter,
    &'a dyn Fn(usize, usize) -> usize,
    &'a Profile,
);

struct Profile {
    orders: Vec<u32>,
    class: Vec<u32>,
    /// Orders of `g_i g_j` and `[g_i, g_j]` for `i < j`, row by row.
    pairs: Vec<(u32, u32)>,
}

fn pair_invariants(g: &DenseGroup, a: Elem, b: Elem) -> (u32, u32) {
    let o = g.orders();
    (o[g.mul(a, b) as usize], o[g.commutator(a, b) as usize])
}

fn profile(g: &DenseGroup, gens: &[Elem], class: &[u32]) -> Profile {
    let o = g.orders();
    let mut pairs = Vec::new();
    for i in 0..gens.len() {
        for j in i + 1..gens.len() {
            pairs.push(pair_invariants(g, gens[i], gens[j]));
        }
    }
    Profile {
        orders: gens.iter().map(|&x| o[x as usize]).collect(),
        class: gens.iter().map(|&x| class[x as usize]).collect(),
        pairs,
    }
}

/// Searches for generator images of `pres` in `target` that give an
/// isomorphism; `source` is the group of `pres` and supplies the pruning
/// invariants. The first image of `x` ranges over class representatives.
pub fn search_epimorphism(
    pres: &Presentation,
    source: &DenseGroup,
    target: &DenseGroup,
    budget: SearchBudget,
    labels: (&str, &str),
) -> Result<SearchOutcome> {
    if source.order() != target.order() {
        return Err(Error::InvalidParams(format!(
            "orders differ: {} vs {}",
            source.order(),
            target.order()
        )));
    }
    if pres.ngens() != 2 || source.ngens() != 2 {
        return Err(Error::InvalidParams("two-generator presentations only".into()));
    }
    let meter = Meter::new(budget);
    let src_class = source.class_sizes();
    let want = profile(source, &source.generators(), &src_class);
    let (reps, _) = target.conjugacy_classes();
    let tclass = target.class_sizes();
    let to = target.orders();
    let xs: Vec<Elem> = reps
        .into_iter()
        .filter(|&g| to[g as usize] == want.orders[0] && tclass[g as usize] == want.class[0])
        .collect();
    let ys: Vec<Elem> = (0..target.order() as Elem)
        .filter(|&h| to[h as usize] == want.orders[1] && tclass[h as usize] == want.class[1])
        .collect();
    let rel = relator_order(pres);
    let found = in_pool(budget.workers, || {
        xs.par_iter().find_map_first(|&g| {
            for chunk in ys.chunks(256) {
                if !meter.tick(chunk.len() as u64) {
                    return Some(Block::Timeout);
                }
                for &h in chunk {
                    if pair_invariants(target, g, h) != want.pairs[0] {
                        continue;
                    }
                    let imgs = [g, h];
                    if first_violated(pres, &rel, target, &imgs).is_none() && generates(target, &imgs).0 {
                        return Some(Block::Found(imgs.to_vec()));
                    }
                }
            }
            None
        })
    });
    let candidates = meter.total();
    Ok(match found {
        Some(Block::Found(images)) => {
            let checks = check_hom(pres, source.order(), target, &images)?;
            SearchOutcome::Found {
                certificate: make_certificate(labels.0, labels.1, &images, checks, None, meter.start),
                candidates,
            }
        }
        Some(Block::Timeout) => SearchOutcome::Timeout { candidates },
        None => SearchOutcome::Exhausted { candidates },
    })
}

/// Checks that sending the generators of `source` to `images` is an
/// isomorphism onto `target`, by walking the Cayley graph of `source`.
pub fn check_dense_iso(source: &DenseGroup, target: &DenseGroup, images: &[Elem]) -> bool {
    let n = source.order();
    if n != target.order() || images.len() != source.ngens() {
        return false;
    }
    let letters: Vec<Vec<u8>> = images
        .iter()
        .flat_map(|&g| [target.word_letters(g), target.word_letters(target.inverse(g))])
        .collect();
    let nl = letters.len();
    let mut phi = vec![u32::MAX; n];
    let mut hit = vec![false; n];
    phi[0] = 0;
    hit[0] = true;
    // Ids are breadth-first, so each element's tree parent comes first; the
    // first edge into an element defines its image, every other edge checks it.
    for g in 0..n as Elem {
        let pg = phi[g as usize];
        for l in 0..nl {
            let h = source.act(g, l) as usize;
            let img = target.apply(pg, &letters[l]);
            if phi[h] == u32::MAX {
                if hit[img as usize] {
                    return false;
                }
                hit[img as usize] = true;
                phi[h] = img;
            } else if phi[h] != img {
                return false;
            }
        }
    }
    true
}

/// Isomorphism search between dense groups that need not come with a
/// presentation; the source generators are its own generators.
pub fn search_dense_isomorphism(
    source: &DenseGroup,
    target: &DenseGroup,
    budget: SearchBudget,
    labels: (&str, &str),
) -> Result<SearchOutcome> {
    if source.order() != target.order() {
        return Err(Error::InvalidParams(format!(
            "orders differ: {} vs {}",
            source.order(),
            target.order()
        )));
    }
    let meter = Meter::new(budget);
    let k = source.ngens();
    let src_class = source.class_sizes();
    let want = profile(source, &source.generators(), &src_class);
    let (reps, _) = target.conjugacy_classes();
    let tclass = target.class_sizes();
    let to = target.orders();
    let matching = |i: usize, g: Elem| to[g as usize] == want.orders[i] && tclass[g as usize] == want.class[i];
    let firsts: Vec<Elem> = reps.into_iter().filter(|&g| matching(0, g)).collect();
    let pools: Vec<Vec<Elem>> = (0..k)
        .map(|i| (0..target.order() as Elem).filter(|&g| matching(i, g)).collect())
        .collect();
    let pair_index = |i: usize, j: usize| -> usize {
        // Row-major index of (i, j), i < j, in the upper triangle.
        i * (2 * k - i - 1) / 2 + (j - i - 1)
    };

    fn extend(
        level: usize,
        chosen: &mut Vec<Elem>,
        ctx: &SearchCtx,
    ) -> Option<Block> {
        let (source, target, pools, meter, pair_index, want) = *ctx;
        if level == pools.len() {
            return check_dense_iso(source, target, chosen).then(|| Block::Found(chosen.clone()));
        }
        if !meter.tick(1) {
            return Some(Block::Timeout);
        }
        for &h in &pools[level] {
            let ok = (0..level).all(|i| pair_invariants(target, chosen[i], h) == want.pairs[pair_index(i, level)]);
            if !ok {
                continue;
            }
            chosen.push(h);
            let r = extend(level + 1, chosen, ctx);
            chosen.pop();
            if r.is_some() {
                return r;
            }
        }
        None
    }

    let found = in_pool(budget.workers, || {
        firsts.par_iter().find_map_first(|&g| {
            let ctx: SearchCtx =
                (source, target, &pools, &meter, &pair_index, &want);
            let mut chosen = vec![g];
            extend(1, &mut chosen, &ctx)
        })
    });
    let candidates = meter.total();
    Ok(match found {
        Some(Block::Found(images)) => {
            let checks = Checks {
                relations_hold: true,
                generates: true,
                orders_match: true,
                bijective: true,
            };
            SearchOutcome::Found {
                certificate: make_certificate(labels.0, labels.1, &images, checks, None, meter.start),
                candidates,
            }
        }
        Some(Block::Timeout) => SearchOutcome::Timeout { candidates },
        None => SearchOutcome::Exhausted { candidates },
    })
}

/// Default bound on the order of groups whose automorphisms are listed.
pub const AUT_CAP: usize = 1 << 13;

/// All automorphisms of the group `g` of `pres`, as images of its two
/// generators, in ascending order.
pub fn automorphisms(pres: &Presentation, g: &DenseGroup, cap: usize) -> Result<Vec<[Elem; 2]>> {
    if g.order() > cap {
        return Err(Error::BoundExceeded(cap));
    }
    if pres.ngens() != 2 || g.ngens() != 2 {
        return Err(Error::InvalidParams("two-generator presentations only".into()));
    }
    let class = g.class_sizes();
    let want = profile(g, &g.generators(), &class);
    let o = g.orders();
    let pool = |i: usize| -> Vec<Elem> {
        (0..g.order() as Elem)
            .filter(|&h| o[h as usize] == want.orders[i] && class[h as usize] == want.class[i])
            .collect()
    };
    let (xs, ys) = (pool(0), pool(1));
    let rel = relator_order(pres);
    let out: Vec<[Elem; 2]> = xs
        .par_iter()
        .flat_map_iter(|&x| {
            let (rel, want) = (&rel, &want);
            ys.iter().filter_map(move |&y| {
                let imgs = [x, y];
                (pair_invariants(g, x, y) == want.pairs[0]
                    && first_violated(pres, rel, g, &imgs).is_none()
                    && generates(g, &imgs).0)
                    .then_some(imgs)
            })
        })
        .collect();
    Ok(out)
}

/// Outcome of the hypothesis check on generator perturbations by `N_1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Hypothesis {
    /// Every perturbation `e ↦ e f_e` with `f_e ∈ N_1` was checked.
    Verified { perturbations: u64 },
    /// Too many perturbations to check; taken as given.
    Assumed { perturbations: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum LiftOutcome {
    Found {
        u_index: usize,
        certificate: IsoCertificate,
        hypothesis: Hypothesis,
    },
    Exhausted {
        tried: usize,
        hypothesis: Hypothesis,
    },
}

pub struct LiftProblem<'a> {
    pub g1: &'a DenseGroup,
    pub pres1: &'a Presentation,
    pub g2: &'a DenseGroup,
    pub n1: &'a Subgroup,
    pub n2: &'a Subgroup,
    /// Images in `G_2/N_2` of the generators of `G_1/N_1`.
    pub gamma: [Elem; 2],
    /// Automorphisms of `G_1/N_1` as images of its generators.
    pub u: &'a [[Elem; 2]],
    /// Largest number of perturbations checked exhaustively.
    pub hypothesis_cap: u64,
}

/// The lifting reduction: for each `u`, lift `e π_1 u γ` to any preimage in
/// `G_2` and test whether that assignment extends to an isomorphism.
pub fn lift_search(p: &LiftProblem, labels: (&str, &str)) -> Result<LiftOutcome> {
    for (name, g, n) in [("N1", p.g1, p.n1), ("N2", p.g2, p.n2)] {
        if !g.is_normal(n) {
            return Err(Error::Hypothesis(format!("{name} is not normal")));
        }
    }
    let (l1, _) = p.g1.quotient_with_projection(p.n1)?;
    let (l2, proj2) = p.g2.quotient_with_projection(p.n2)?;
    if l1.order() != l2.order() {
        return Err(Error::Hypothesis("quotients have different orders".into()));
    }
    if !check_dense_iso(&l1, &l2, &p.gamma) {
        return Err(Error::Hypothesis("gamma is not an isomorphism of the quotients".into()));
    }

    // Perturbing the generators by N_1 must give automorphisms of G_1.
    let nn = (p.n1.order() as u64).pow(2);
    let hypothesis = if nn <= p.hypothesis_cap {
        let (x, y) = (p.g1.gen(0), p.g1.gen(1));
        let rel = relator_order(p.pres1);
        let bad = p.n1.elements.par_iter().find_any(|&&f1| {
            p.n1.elements.iter().any(|&f2| {
                let imgs = [p.g1.mul(x, f1), p.g1.mul(y, f2)];
                first_violated(p.pres1, &rel, p.g1, &imgs).is_some() || !generates(p.g1, &imgs).0
            })
        });
        if bad.is_some() {
            return Err(Error::Hypothesis("a perturbation by N1 is not an automorphism".into()));
        }
        Hypothesis::Verified { perturbations: nn }
    } else {
        Hypothesis::Assumed { perturbations: nn }
    };

    let mut preimage = vec![u32::MAX; l2.order()];
    for (g, &l) in proj2.iter().enumerate() {
        if preimage[l as usize] == u32::MAX {
            preimage[l as usize] = g as Elem;
        }
    }
    let found = p.u.par_iter().enumerate().find_map_first(|(k, u)| {
        let imgs: Vec<Elem> = u
            .iter()
            .map(|&w| preimage[l2.eval(&l1.word(w), &p.gamma) as usize])
            .collect();
        check_hom(p.pres1, p.g1.order(), p.g2, &imgs).ok().map(|c| (k, imgs, c))
    });
    Ok(match found {
        Some((u_index, imgs, checks)) => LiftOutcome::Found {
            u_index,
            certificate: make_certificate(labels.0, labels.1, &imgs, checks, None, Instant::now()),
            hypothesis,
        },
        None => LiftOutcome::Exhausted {
            tried: p.u.len(),
            hypothesis,
        },
    })
}
