//! Lifting a coset table of a cyclic subgroup `H = ⟨g_0⟩` to the regular action.
//!
//! For the breadth-first transversal `t_c`, each `t_c s t_{cs}^{-1}` lies in `H`,
//! say `g_0^{e(c,s)}`. Because `H` is cyclic (hence abelian), tracing a relator
//! from coset `c` gives a linear relation between the `e(c,s)` modulo `|H|`. The
//! Reidemeister–Schreier theorem says these relations, together with
//! `e = 0` on tree edges, present `H`; since `H` is cyclic and generated by the
//! variable at the loop `0·g_0 = 0`, solving the system with that variable set
//! to 1 determines `|H|` as the largest modulus for which the system is
//! consistent, and every `e(c,s)`.

use crate::enumerate::CosetTable;
use crate::error::{Error, Result};
use crate::presentations::Presentation;

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn mod_inverse(a: i64, m: i64) -> Option<i64> {
    let (mut old_r, mut r) = (a.rem_euclid(m), m);
    let (mut old_s, mut s) = (1i64, 0i64);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    (old_r == 1).then(|| old_s.rem_euclid(m))
}

fn prime_power_factors(mut n: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            let mut q = 1;
            while n % d == 0 {
                n /= d;
                q *= d;
            }
            out.push((d, q));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, n));
    }
    out
}

/// `Σ coeff·var + constant ≡ 0`.
#[derive(Clone, Debug)]
struct Equation {
    terms: Vec<(u32, i64)>,
    constant: i64,
}

/// Sparse elimination modulo `q`, pivoting on unit coefficients in the sparsest
/// equation first. Unknowns are `0..nvars`; `fixed` holds known values.
enum Solve {
    Solved(Vec<i64>),
    /// A relation `c ≡ 0` with `c ≢ 0 (mod q)` was derived.
    Contradiction(i64),
    Stuck,
}

fn solve_mod(eqs: &[Equation], nvars: usize, q: i64) -> Solve {
    // q == 0 solves over the integers with ±1 pivots.
    let red = |x: i64| if q == 0 { x } else { x.rem_euclid(q) };
    let inverse = |a: i64| if q == 0 { (a.abs() == 1).then_some(a) } else { mod_inverse(a, q) };
    let mut eqs: Vec<Option<Equation>> = eqs
        .iter()
        .map(|e| {
            let mut terms: Vec<(u32, i64)> = e.terms.iter().map(|&(v, a)| (v, red(a))).filter(|&(_, a)| a != 0).collect();
            terms.sort_unstable();
            Some(Equation {
                terms,
                constant: red(e.constant),
            })
        })
        .collect();
    let mut occurs: Vec<Vec<u32>> = vec![Vec::new(); nvars];
    for (k, e) in eqs.iter().enumerate() {
        for &(v, _) in &e.as_ref().unwrap().terms {
            occurs[v as usize].push(k as u32);
        }
    }
    // Buckets by number of terms; stale entries are skipped.
    let maxlen = eqs.iter().map(|e| e.as_ref().unwrap().terms.len()).max().unwrap_or(0);
    let mut buckets: Vec<Vec<u32>> = vec![Vec::new(); maxlen + 1];
    for (k, e) in eqs.iter().enumerate() {
        buckets[e.as_ref().unwrap().terms.len()].push(k as u32);
    }
    let mut eliminated: Vec<(u32, Equation)> = Vec::new();
    let mut solved = vec![false; nvars];
    let mut hard: Vec<u32> = Vec::new();
    let mut len = 0usize;
    loop {
        while len < buckets.len() && buckets[len].is_empty() {
            len += 1;
        }
        if len >= buckets.len() {
            break;
        }
        let k = buckets[len].pop().unwrap() as usize;
        let Some(e) = eqs[k].as_ref() else { continue };
        if e.terms.len() != len {
            continue;
        }
        if len == 0 {
            if e.constant != 0 {
                return Solve::Contradiction(e.constant);
            }
            eqs[k] = None;
            continue;
        }
        // Unit pivot with the fewest occurrences.
        let pivot = e
            .terms
            .iter()
            .filter(|&&(_, a)| inverse(a).is_some())
            .min_by_key(|&&(v, _)| occurs[v as usize].len())
            .copied();
        let Some((pv, pa)) = pivot else {
            hard.push(k as u32);
            continue;
        };
        let e = eqs[k].take().unwrap();
        let inv = inverse(pa).unwrap();
        let occ = std::mem::take(&mut occurs[pv as usize]);
        for &j in &occ {
            let j = j as usize;
            let Some(f) = eqs[j].as_mut() else { continue };
            let Ok(pos) = f.terms.binary_search_by_key(&pv, |&(v, _)| v) else { continue };
            let b = f.terms[pos].1;
            let factor = red(b * inv);
            // f -= factor * e
            let mut merged: Vec<(u32, i64)> = Vec::with_capacity(f.terms.len() + e.terms.len());
            let (mut i1, mut i2) = (0, 0);
            while i1 < f.terms.len() || i2 < e.terms.len() {
                let take_f = i2 >= e.terms.len() || (i1 < f.terms.len() && f.terms[i1].0 < e.terms[i2].0);
                let take_e = i1 >= f.terms.len() || (i2 < e.terms.len() && e.terms[i2].0 < f.terms[i1].0);
                if take_f {
                    merged.push(f.terms[i1]);
                    i1 += 1;
                } else if take_e {
                    let (v, a) = e.terms[i2];
                    let c = red(-factor * a);
                    if c != 0 {
                        merged.push((v, c));
                        occurs[v as usize].push(j as u32);
                    }
                    i2 += 1;
                } else {
                    let (v, a) = f.terms[i1];
                    let c = red(a - factor * e.terms[i2].1);
                    if c != 0 {
                        merged.push((v, c));
                    }
                    i1 += 1;
                    i2 += 1;
                }
            }
            f.terms = merged;
            f.constant = red(f.constant - factor * e.constant);
            let l = f.terms.len();
            if l >= buckets.len() {
                buckets.resize(l + 1, Vec::new());
            }
            buckets[l].push(j as u32);
            if l < len {
                len = l;
            }
        }
        solved[pv as usize] = true;
        eliminated.push((pv, e));
    }
    for &k in &hard {
        if let Some(e) = eqs[k as usize].as_ref() {
            if !e.terms.is_empty() {
                return Solve::Stuck;
            }
            if e.constant != 0 {
                return Solve::Contradiction(e.constant);
            }
        }
    }
    if solved.iter().any(|&s| !s) {
        return Solve::Stuck;
    }
    let mut val = vec![0i64; nvars];
    for (pv, e) in eliminated.iter().rev() {
        let mut s = e.constant;
        let mut pa = 0;
        for &(v, a) in &e.terms {
            if v == *pv {
                pa = a;
            } else {
                s = red(s + a * val[v as usize]);
            }
        }
        val[*pv as usize] = red(-s * inverse(pa).unwrap());
    }
    Solve::Solved(val)
}

/// Returns `e(c, col)` for all cosets and columns, and `|H|`.
pub(crate) fn schreier_exponents(pres: &Presentation, h: &CosetTable) -> Result<(Vec<i64>, i64)> {
    let n = h.index;
    let nc = h.ncols();
    if h.act(0, 0) != 0 {
        return Err(Error::Relation("first generator does not fix the subgroup coset".into()));
    }
    // Variables live on positive columns; an inverse column refers to the
    // positive column of the neighbouring coset with opposite sign.
    let var = |c: usize, col: usize| -> (usize, i64) {
        if col.is_multiple_of(2) {
            (c * nc + col, 1)
        } else {
            (h.act(c, col) * nc + (col ^ 1), -1)
        }
    };
    // Tree edges have exponent 0; the loop at coset 0 under g_0 has exponent 1.
    let mut fixed: Vec<Option<i64>> = vec![None; n * nc];
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut order = vec![0usize];
    let mut i = 0;
    while i < order.len() {
        let c = order[i];
        i += 1;
        for col in 0..nc {
            let d = h.act(c, col);
            if !seen[d] {
                seen[d] = true;
                order.push(d);
                fixed[var(c, col).0] = Some(0);
            }
        }
    }
    fixed[0] = Some(1);
    // Compact numbering of the free variables.
    let mut index = vec![u32::MAX; n * nc];
    let mut nvars = 0usize;
    for c in 0..n {
        for col in (0..nc).step_by(2) {
            let v = c * nc + col;
            if fixed[v].is_none() {
                index[v] = nvars as u32;
                nvars += 1;
            }
        }
    }
    let rels: Vec<Vec<usize>> = pres.relators.iter().map(|w| w.letters()).collect();
    let mut eqs: Vec<Equation> = Vec::with_capacity(n * rels.len());
    for c in 0..n {
        for r in &rels {
            let mut d = c;
            let mut terms: Vec<(u32, i64)> = Vec::new();
            let mut constant = 0i64;
            for &l in r {
                let (v, a) = var(d, l);
                match fixed[v] {
                    Some(x) => constant += a * x,
                    None => terms.push((index[v], a)),
                }
                d = h.act(d, l);
            }
            terms.sort_unstable();
            let mut merged: Vec<(u32, i64)> = Vec::with_capacity(terms.len());
            for (v, a) in terms {
                match merged.last_mut() {
                    Some(last) if last.0 == v => last.1 += a,
                    _ => merged.push((v, a)),
                }
            }
            merged.retain(|&(_, a)| a != 0);
            eqs.push(Equation { terms: merged, constant });
        }
    }
    // A modulus: any constant-only equation bounds |H|.
    let mut modulus = eqs
        .iter()
        .filter(|e| e.terms.is_empty())
        .fold(0i64, |m, e| gcd(m, e.constant));
    if modulus == 0 {
        modulus = match solve_mod(&eqs, nvars, 0) {
            Solve::Contradiction(c) => c.abs(),
            _ => {
                return Err(Error::Relation(
                    "the order of the first generator is not determined by the coset table of its cyclic subgroup".into(),
                ))
            }
        };
    }
    let mut parts: Vec<(i64, Vec<i64>)> = Vec::new();
    for (p, mut q) in prime_power_factors(modulus) {
        loop {
            if q == 1 {
                parts.push((1, vec![0; nvars]));
                break;
            }
            match solve_mod(&eqs, nvars, q) {
                Solve::Solved(v) => {
                    // Consistency of every equation, which may still shrink q.
                    let bad = eqs.iter().find_map(|e| {
                        let s = e
                            .terms
                            .iter()
                            .fold(e.constant, |s, &(v2, a)| s + a * v[v2 as usize] % q)
                            .rem_euclid(q);
                        (s != 0).then_some(s)
                    });
                    match bad {
                        None => {
                            parts.push((q, v));
                            break;
                        }
                        Some(s) => q = gcd(q, s),
                    }
                }
                Solve::Contradiction(c) => q = gcd(q, c),
                Solve::Stuck => {
                    return Err(Error::Relation(format!(
                        "exponent system modulo {q} (p = {p}) has no unit pivot"
                    )))
                }
            }
        }
    }
    // Chinese remainder over the prime-power parts.
    modulus = parts.iter().map(|(q, _)| q).product();
    let mut values = vec![0i64; nvars];
    let mut acc = 1i64;
    for (q, v) in &parts {
        if *q == 1 {
            continue;
        }
        // x ≡ values (mod acc), x ≡ v (mod q)
        let inv = mod_inverse(acc % q, *q).unwrap_or(0);
        for (x, &y) in values.iter_mut().zip(v) {
            let t = ((y - *x).rem_euclid(*q) as i128 * inv as i128).rem_euclid(*q as i128) as i64;
            *x += acc * t;
        }
        acc *= q;
    }
    let mut full = vec![0i64; n * nc];
    for c in 0..n {
        for col in 0..nc {
            let (v, sign) = var(c, col);
            let x = match fixed[v] {
                Some(x) => x,
                None => values[index[v] as usize],
            };
            full[c * nc + col] = (sign * x).rem_euclid(modulus.max(1));
        }
    }
    Ok((full, modulus))
}
