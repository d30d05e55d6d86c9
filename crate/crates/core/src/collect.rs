//! Normal-form arithmetic `A^a B^b C^c` with `C = [A,B]`.
//!
//! The rules `C A^k C^-1 = A^(k β)` (β the inverse of α modulo ord A) and
//! `C^w B^j C^-w = B^(j α^w)` come straight from the defining relations.
//! What the relations do not give in closed form is read off a dense oracle:
//! the exponent ranges, the fusions `B^b_mod = A^fb`, `C^c_mod = A^fc`, and the
//! table of `A^-k B^b A^k` in normal form. Everything derived is then checked
//! against the oracle before the collector is returned.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{DenseGroup, Elem};
use crate::params::{rem, FamilyParams};
use crate::presentations::Word;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ExpTriple {
    pub a: u32,
    pub b: u32,
    pub c: u32,
}

impl ExpTriple {
    pub const IDENTITY: ExpTriple = ExpTriple { a: 0, b: 0, c: 0 };

    pub fn new(a: u32, b: u32, c: u32) -> Self {
        ExpTriple { a, b, c }
    }
}

#[derive(Debug, Clone)]
pub struct Collector {
    pub params: FamilyParams,
    pub ord_a: u64,
    pub ord_b: u64,
    pub ord_c: u64,
    pub a_mod: u64,
    pub b_mod: u64,
    pub c_mod: u64,
    /// `B^b_mod = A^fb`.
    pub fb: u64,
    /// `C^c_mod = A^fc`, central.
    pub fc: u64,
    /// `beta_pow[c] = β^c mod ord A` for `c < c_mod`.
    beta_pow: Vec<u64>,
    /// `alpha_pow[w] = α^w mod ord B` for `w < 2 c_mod`.
    alpha_pow: Vec<u64>,
    /// `conj_b[b * a_mod + k] = nf(A^-k B^b A^k)`.
    conj_b: Vec<ExpTriple>,
}

/// Element ids of every normal form and the inverse map.
#[derive(Debug, Clone)]
pub struct NfIndex {
    elem_of: Vec<Elem>,
    packed_of: Vec<u32>,
}

impl NfIndex {
    pub fn elem(&self, c: &Collector, t: ExpTriple) -> Elem {
        self.elem_of[c.pack(t) as usize]
    }

    pub fn nf(&self, c: &Collector, g: Elem) -> ExpTriple {
        c.unpack(self.packed_of[g as usize])
    }
}

fn smallest_power_in(g: &DenseGroup, x: Elem, mask: &[bool]) -> u64 {
    let mut y = x;
    let mut k = 1;
    while !mask[y as usize] {
        y = g.mul(y, x);
        k += 1;
    }
    k
}

fn pow_mod(b: u64, mut e: u64, n: u64) -> u64 {
    let (mut acc, mut b) = (1 % n, b % n);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % n;
        }
        b = b * b % n;
        e >>= 1;
    }
    acc
}

fn mod_inverse(a: u64, n: u64) -> Option<u64> {
    let (mut r0, mut r1) = (n as i64, (a % n) as i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    (r0 == 1).then(|| rem(t0, n as i64) as u64)
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::Relation(format!("collector: {}", msg.into()))
}

impl Collector {
    /// Derives the collector from `oracle`, whose generators 0 and 1 are A and
    /// B, and checks bijectivity of the normal form exhaustively.
    pub fn derive(params: &FamilyParams, oracle: &DenseGroup) -> Result<(Collector, NfIndex)> {
        if oracle.ngens() != 2 {
            return Err(invalid("needs a two-generator oracle"));
        }
        let n = oracle.order() as u64;
        let (a, b) = (oracle.gen(0), oracle.gen(1));
        let c = oracle.commutator(a, b);
        let ord_a = oracle.element_order(a);
        let ord_b = oracle.element_order(b);
        let ord_c = oracle.element_order(c);

        let mut apow = vec![0 as Elem; ord_a as usize];
        let mut in_a = vec![false; n as usize];
        let mut log_a = vec![u32::MAX; n as usize];
        let mut x = 0;
        for (k, slot) in apow.iter_mut().enumerate() {
            *slot = x;
            in_a[x as usize] = true;
            log_a[x as usize] = k as u32;
            x = oracle.mul(x, a);
        }
        let a_mod = ord_a;
        let b_mod = smallest_power_in(oracle, b, &in_a);
        let c_mod = smallest_power_in(oracle, c, &in_a);
        if a_mod * b_mod * c_mod != n {
            return Err(invalid(format!("ranges {a_mod}x{b_mod}x{c_mod} do not multiply to {n}")));
        }
        let fb = log_a[oracle.pow(b, b_mod as i64) as usize] as u64;
        let fc_elem = oracle.pow(c, c_mod as i64);
        let fc = log_a[fc_elem as usize] as u64;
        if oracle.mul(fc_elem, b) != oracle.mul(b, fc_elem) {
            return Err(invalid("C^c_mod is not central"));
        }

        let alpha = params.alpha;
        let alpha_a = rem(alpha, ord_a as i64) as u64;
        let beta_a = mod_inverse(alpha_a, ord_a).ok_or_else(|| invalid("α not invertible mod ord A"))?;
        let alpha_b = rem(alpha, ord_b as i64) as u64;
        // Exact rules, checked once.
        let cinv = oracle.inverse(c);
        if oracle.mul(oracle.mul(c, a), cinv) != apow[beta_a as usize] {
            return Err(invalid("C A C^-1 != A^β"));
        }
        if oracle.mul(oracle.mul(c, b), cinv) != oracle.pow(b, alpha_b as i64) {
            return Err(invalid("C B C^-1 != B^α"));
        }

        let mut bpow = vec![0 as Elem; b_mod as usize];
        let mut cpow = vec![0 as Elem; c_mod as usize];
        for k in 1..b_mod as usize {
            bpow[k] = oracle.mul(bpow[k - 1], b);
        }
        for k in 1..c_mod as usize {
            cpow[k] = oracle.mul(cpow[k - 1], c);
        }

        let total = n as usize;
        let mut elem_of = vec![0 as Elem; total];
        let mut packed_of = vec![u32::MAX; total];
        for (ia, &ea) in apow.iter().enumerate() {
            for (ib, &eb) in bpow.iter().enumerate() {
                let ab = oracle.mul(ea, eb);
                for (ic, &ec) in cpow.iter().enumerate() {
                    let g = oracle.mul(ab, ec);
                    let packed = ((ia as u64 * b_mod + ib as u64) * c_mod + ic as u64) as u32;
                    if packed_of[g as usize] != u32::MAX {
                        return Err(invalid("normal form is not unique"));
                    }
                    packed_of[g as usize] = packed;
                    elem_of[packed as usize] = g;
                }
            }
        }
        let unpack = |p: u32| {
            let p = p as u64;
            ExpTriple::new((p / (b_mod * c_mod)) as u32, (p / c_mod % b_mod) as u32, (p % c_mod) as u32)
        };

        let mut conj_b = Vec::with_capacity((b_mod * a_mod) as usize);
        for &eb in &bpow {
            for &ek in &apow {
                let g = oracle.mul(oracle.mul(oracle.inverse(ek), eb), ek);
                conj_b.push(unpack(packed_of[g as usize]));
            }
        }

        let beta_pow = (0..c_mod).map(|k| pow_mod(beta_a, k, ord_a)).collect();
        let alpha_pow = (0..2 * c_mod).map(|k| pow_mod(alpha_b, k, ord_b)).collect();
        let col = Collector {
            params: params.clone(),
            ord_a,
            ord_b,
            ord_c,
            a_mod,
            b_mod,
            c_mod,
            fb,
            fc,
            beta_pow,
            alpha_pow,
            conj_b,
        };
        // B^A = B C^-1.
        let ba = unpack(packed_of[oracle.mul(b, cinv) as usize]);
        if col.conj_b[a_mod as usize + 1] != ba {
            return Err(invalid("B^A != B C^-1"));
        }
        Ok((col, NfIndex { elem_of, packed_of }))
    }

    pub fn order(&self) -> u64 {
        self.a_mod * self.b_mod * self.c_mod
    }

    pub fn pack(&self, t: ExpTriple) -> u32 {
        ((t.a as u64 * self.b_mod + t.b as u64) * self.c_mod + t.c as u64) as u32
    }

    pub fn unpack(&self, p: u32) -> ExpTriple {
        let p = p as u64;
        ExpTriple::new(
            (p / (self.b_mod * self.c_mod)) as u32,
            (p / self.c_mod % self.b_mod) as u32,
            (p % self.c_mod) as u32,
        )
    }

    pub fn in_range(&self, t: ExpTriple) -> bool {
        (t.a as u64) < self.a_mod && (t.b as u64) < self.b_mod && (t.c as u64) < self.c_mod
    }

    /// Normal form of `A^e`, `B^e` or `C^e` for generator 0, 1, 2.
    pub fn gen_pow(&self, g: usize, e: i64) -> ExpTriple {
        match g {
            0 => ExpTriple::new(rem(e, self.ord_a as i64) as u32, 0, 0),
            1 => {
                let e = rem(e, self.ord_b as i64) as u64;
                let a = self.fb * (e / self.b_mod) % self.a_mod;
                ExpTriple::new(a as u32, (e % self.b_mod) as u32, 0)
            }
            2 => {
                let e = rem(e, self.ord_c as i64) as u64;
                let a = self.fc * (e / self.c_mod) % self.a_mod;
                ExpTriple::new(a as u32, 0, (e % self.c_mod) as u32)
            }
            _ => panic!("generator {g} out of range"),
        }
    }

    pub fn nf_mul(&self, s: ExpTriple, t: ExpTriple) -> ExpTriple {
        let am = self.a_mod;
        // A^a1 B^b1 C^c1 A^a2 = A^a1 B^b1 A^k C^c1.
        let k = t.a as u64 * self.beta_pow[s.c as usize] % am;
        // B^b1 A^k = A^k (A^-k B^b1 A^k).
        let x = self.conj_b[(s.b as u64 * am + k) as usize];
        let mut a = s.a as u64 + k + x.a as u64;
        let w = x.c as u64 + s.c as u64;
        // C^w B^b2 = B^(b2 α^w) C^w.
        let eb = x.b as u64 + t.b as u64 * self.alpha_pow[w as usize] % self.ord_b;
        a += self.fb * (eb / self.b_mod);
        let ec = w + t.c as u64;
        a += self.fc * (ec / self.c_mod);
        ExpTriple::new((a % am) as u32, (eb % self.b_mod) as u32, (ec % self.c_mod) as u32)
    }

    pub fn nf_inv(&self, t: ExpTriple) -> ExpTriple {
        let ci = self.gen_pow(2, -(t.c as i64));
        let bi = self.gen_pow(1, -(t.b as i64));
        let ai = self.gen_pow(0, -(t.a as i64));
        self.nf_mul(self.nf_mul(ci, bi), ai)
    }

    pub fn nf_pow(&self, t: ExpTriple, k: i64) -> ExpTriple {
        let mut base = if k < 0 { self.nf_inv(t) } else { t };
        let mut e = k.unsigned_abs();
        let mut acc = ExpTriple::IDENTITY;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.nf_mul(acc, base);
            }
            base = self.nf_mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// `[s,t] = s^-1 t^-1 s t`.
    pub fn nf_comm(&self, s: ExpTriple, t: ExpTriple) -> ExpTriple {
        let st = self.nf_mul(s, t);
        let ts = self.nf_mul(t, s);
        self.nf_mul(self.nf_inv(ts), st)
    }

    pub fn nf_conj(&self, s: ExpTriple, t: ExpTriple) -> ExpTriple {
        self.nf_mul(self.nf_mul(self.nf_inv(t), s), t)
    }

    pub fn elem_order(&self, t: ExpTriple) -> u64 {
        let mut x = t;
        let mut k = 1;
        while x != ExpTriple::IDENTITY {
            x = self.nf_mul(x, t);
            k += 1;
        }
        k
    }

    /// Left-to-right evaluation of a word over A, B, C (generators 0, 1, 2).
    pub fn eval_word_nf(&self, w: &Word) -> ExpTriple {
        w.syllables()
            .iter()
            .fold(ExpTriple::IDENTITY, |acc, &(g, e)| self.nf_mul(acc, self.gen_pow(g, e)))
    }

    /// Evaluates a word with triples substituted for its generators.
    pub fn eval_with(&self, w: &Word, images: &[ExpTriple]) -> ExpTriple {
        w.syllables()
            .iter()
            .fold(ExpTriple::IDENTITY, |acc, &(g, e)| self.nf_mul(acc, self.nf_pow(images[g], e)))
    }

    pub fn random_triple(&self, rng: &mut impl Rng) -> ExpTriple {
        ExpTriple::new(
            rng.gen_range(0..self.a_mod) as u32,
            rng.gen_range(0..self.b_mod) as u32,
            rng.gen_range(0..self.c_mod) as u32,
        )
    }

    /// Compares `samples` random products with the oracle; returns the number
    /// of mismatches.
    pub fn validate_products(&self, oracle: &DenseGroup, index: &NfIndex, samples: usize, seed: u64) -> usize {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut bad = 0;
        for _ in 0..samples {
            let s = self.random_triple(&mut rng);
            let t = self.random_triple(&mut rng);
            let want = oracle.mul(index.elem(self, s), index.elem(self, t));
            if index.elem(self, self.nf_mul(s, t)) != want {
                bad += 1;
            }
        }
        bad
    }

    /// Exhaustive check of `nf_mul` against the oracle over all pairs.
    pub fn validate_exhaustive(&self, oracle: &DenseGroup, index: &NfIndex) -> usize {
        use rayon::prelude::*;
        let n = self.order() as u32;
        (0..n)
            .into_par_iter()
            .map(|p| {
                let s = self.unpack(p);
                let gs = index.elem(self, s);
                (0..n)
                    .filter(|&q| {
                        let t = self.unpack(q);
                        index.elem(self, self.nf_mul(s, t)) != oracle.mul(gs, index.elem(self, t))
                    })
                    .count()
            })
            .sum()
    }
}

/// Derives the collector and validates it: exhaustively when the group has at
/// most `2^11` elements, else on `samples` random products.
pub fn derive_collector(params: &FamilyParams, oracle: &DenseGroup, samples: usize) -> Result<(Collector, NfIndex)> {
    let (col, index) = Collector::derive(params, oracle)?;
    let bad = if col.order() <= 1 << 11 {
        col.validate_exhaustive(oracle, &index)
    } else {
        col.validate_products(oracle, &index, samples, 0x6d63_6477)
    };
    if bad > 0 {
        return Err(invalid(format!("{bad} products disagree with the oracle")));
    }
    Ok((col, index))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{construct, BuildConfig};
    use crate::params::Family;

    #[test]
    fn j2_5_collector() {
        let p = FamilyParams::new(Family::J2, 2, 2, 1).unwrap();
        let g = construct(&p, &BuildConfig::default()).unwrap().group;
        let (col, idx) = derive_collector(&p, &g, 0).unwrap();
        assert_eq!(col.order(), 2048);
        assert_eq!(col.gen_pow(1, 8), ExpTriple::new(24, 0, 0));
        let a = col.gen_pow(0, 1);
        let b = col.gen_pow(1, 1);
        assert_eq!(col.nf_comm(a, b), col.gen_pow(2, 1));
        assert_eq!(col.elem_order(a), 32);
        assert_eq!(idx.nf(&col, 0), ExpTriple::IDENTITY);
    }
}
