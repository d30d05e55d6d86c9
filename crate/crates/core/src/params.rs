//! Parameters of the families, case classification and the congruence predicates
//! used by the isomorphism criteria.
//!
//! Everything that could overflow is done in `BigInt`; the helpers returning `i64`
//! are only used for exponents that are known to be tiny (group orders below 2^32).

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    J1,
    J2,
    J3,
    H1,
    H2,
    H3,
    K1,
    K2,
    K3,
    G,
}

impl Family {
    pub const ALL: [Family; 10] = [
        Family::J1,
        Family::J2,
        Family::J3,
        Family::H1,
        Family::H2,
        Family::H3,
        Family::K1,
        Family::K2,
        Family::K3,
        Family::G,
    ];

    /// The case a family belongs to, `None` for Macdonald groups.
    pub fn case(self) -> Option<Case> {
        use Family::*;
        match self {
            J1 | H1 | K1 => Some(Case::Case1),
            J2 | H2 | K2 => Some(Case::Case2),
            J3 | H3 | K3 => Some(Case::Case3),
            G => None,
        }
    }

    /// 0 for J, 1 for H (quotient by the centre), 2 for K (quotient by Z2).
    pub fn quotient_depth(self) -> usize {
        use Family::*;
        match self {
            J1 | J2 | J3 | G => 0,
            H1 | H2 | H3 => 1,
            K1 | K2 | K3 => 2,
        }
    }

    /// The J family a quotient family comes from.
    pub fn parent(self) -> Family {
        match self.case() {
            Some(Case::Case1) => Family::J1,
            Some(Case::Case2) => Family::J2,
            Some(Case::Case3) => Family::J3,
            None => Family::G,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .iter()
            .copied()
            .find(|f| f.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParams(format!("unknown family {s}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Case {
    Case1,
    Case2,
    Case3,
}

/// s = 2^{m-1}, u = s^2, r = s/2 (m >= 2), rbar = r/2 (m >= 3).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Case2Constants {
    pub s: i64,
    pub u: i64,
    pub r: Option<i64>,
    pub rbar: Option<i64>,
}

impl Case2Constants {
    pub fn new(m: u32) -> Self {
        let s = 1i64 << (m - 1);
        Case2Constants {
            s,
            u: s * s,
            r: (m >= 2).then_some(s / 2),
            rbar: (m >= 3).then_some(s / 4),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FamilyParams {
    pub family: Family,
    pub p: u64,
    pub m: u32,
    pub ell: i64,
    pub beta: Option<i64>,
    pub alpha: i64,
    pub case: Option<Case>,
}

impl FamilyParams {
    pub fn new(family: Family, p: u64, m: u32, ell: i64) -> Result<Self> {
        if family == Family::G {
            return Err(Error::InvalidParams(
                "use FamilyParams::macdonald for family G".into(),
            ));
        }
        let case = classify(p, m, ell)?;
        if Some(case) != family.case() {
            return Err(Error::InvalidParams(format!(
                "{family} needs {:?}, parameters (p={p}, m={m}, ell={ell}) are {case:?}",
                family.case().unwrap()
            )));
        }
        let pm = p
            .checked_pow(m)
            .and_then(|v| i64::try_from(v).ok())
            .ok_or_else(|| Error::InvalidParams("p^m too large".into()))?;
        let alpha = pm
            .checked_mul(ell)
            .and_then(|v| v.checked_add(1))
            .ok_or_else(|| Error::InvalidParams("alpha overflows i64".into()))?;
        Ok(FamilyParams {
            family,
            p,
            m,
            ell,
            beta: None,
            alpha,
            case: Some(case),
        })
    }

    pub fn macdonald(beta: i64) -> Self {
        FamilyParams {
            family: Family::G,
            p: 0,
            m: 0,
            ell: 0,
            beta: Some(beta),
            alpha: beta,
            case: None,
        }
    }

    /// Same (family, p, m) with another ℓ.
    pub fn with_ell(&self, ell: i64) -> Result<Self> {
        FamilyParams::new(self.family, self.p, self.m, ell)
    }

    /// Same (p, m, ℓ) in another family of the same case.
    pub fn with_family(&self, family: Family) -> Result<Self> {
        FamilyParams::new(family, self.p, self.m, self.ell)
    }

    pub fn case2(&self) -> Option<Case2Constants> {
        (self.case == Some(Case::Case2)).then(|| Case2Constants::new(self.m))
    }

    pub fn pm(&self) -> i64 {
        (self.p as i64).pow(self.m)
    }

    /// Exponent of the power relators of the presentation of this family.
    pub fn power_exponent(&self) -> Option<i64> {
        let p = self.p as i64;
        let m = self.m;
        use Family::*;
        Some(match self.family {
            J1 => p.pow(3 * m),
            J2 => 1 << (3 * m - 1),
            J3 => 81,
            H1 | K1 => p.pow(2 * m),
            H2 | K2 => 1 << (2 * m - 1),
            H3 | K3 | G => return None,
        })
    }

    /// Representative of ℓ modulo the period after which the presentation repeats.
    pub fn normalized_ell(&self) -> i64 {
        let p = self.p as i64;
        let m = self.m;
        use Family::*;
        let modulus = match self.family {
            J1 => p.pow(2 * m),
            H1 | K1 => p.pow(m),
            J2 => 1 << (2 * m - 1),
            H2 | K2 => 1 << (m - 1),
            J3 | H3 | K3 => 27,
            G => return self.beta.unwrap_or(self.alpha),
        };
        self.ell.rem_euclid(modulus)
    }

    pub fn label(&self) -> String {
        match self.family {
            Family::G => format!("G({})", self.alpha),
            f => format!("{f}({}) [p={}, m={}, ell={}]", self.alpha, self.p, self.m, self.ell),
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn classify(p: u64, m: u32, ell: i64) -> Result<Case> {
    if !is_prime(p) {
        return Err(Error::InvalidParams(format!("p={p} is not prime")));
    }
    if m == 0 {
        return Err(Error::InvalidParams("m must be positive".into()));
    }
    if ell.rem_euclid(p as i64) == 0 {
        return Err(Error::InvalidParams(format!("p={p} divides ell={ell}")));
    }
    if p == 2 {
        return Ok(Case::Case2);
    }
    if (p, m) == (3, 1) && ell.rem_euclid(3) == 2 {
        return Ok(Case::Case3);
    }
    Ok(Case::Case1)
}

pub fn expected_order(params: &FamilyParams) -> Result<BigInt> {
    let p = BigInt::from(params.p);
    let m = params.m;
    match params.family {
        Family::J1 => Ok(p.pow(7 * m)),
        Family::J2 => Ok(BigInt::from(2).pow(7 * m - 3)),
        Family::J3 => Ok(BigInt::from(3).pow(10)),
        _ => Err(Error::NoClosedForm("order")),
    }
}

pub fn expected_class(params: &FamilyParams) -> Result<usize> {
    match params.family {
        Family::J1 => Ok(5),
        Family::J2 => Ok(if params.m > 1 { 5 } else { 3 }),
        Family::J3 => Ok(7),
        _ => Err(Error::NoClosedForm("nilpotency class")),
    }
}

pub fn big_pow(base: u64, e: u32) -> BigInt {
    BigInt::from(base).pow(e)
}

/// Non-negative residue.
pub fn modn(a: &BigInt, n: &BigInt) -> BigInt {
    a.mod_floor(n)
}

pub fn pow_mod(base: &BigInt, e: &BigInt, n: &BigInt) -> BigInt {
    let b = modn(base, n);
    b.modpow(e, n)
}

/// Modulus of `α^f ≡ α'` in the sufficiency argument: p^{3m}, 2^{3m-1} or 81.
pub fn j_modulus(params: &FamilyParams) -> Result<BigInt> {
    match params.case {
        Some(Case::Case1) => Ok(big_pow(params.p, 3 * params.m)),
        Some(Case::Case2) => Ok(big_pow(2, 3 * params.m - 1)),
        Some(Case::Case3) => Ok(BigInt::from(81)),
        None => Err(Error::InvalidParams("Macdonald groups have no case".into())),
    }
}

fn check_same_slice(a: &FamilyParams, b: &FamilyParams) -> Result<()> {
    if a.case != b.case || a.p != b.p || a.m != b.m {
        return Err(Error::InvalidParams(format!(
            "mixed parameter slices: {} vs {}",
            a.label(),
            b.label()
        )));
    }
    Ok(())
}

/// Minimal f = 1 + k p^m (f = 1 + 3k in Case 3) with α^f ≡ α'.
pub fn find_f(params: &FamilyParams, ell_prime: i64) -> Result<BigInt> {
    let other = params.with_ell(ell_prime)?;
    check_same_slice(params, &other)?;
    let case = params.case.unwrap();
    let pm = BigInt::from(params.pm());
    if case != Case::Case3 {
        let d = BigInt::from(ell_prime) - BigInt::from(params.ell);
        if !d.mod_floor(&pm).is_zero() {
            return Err(Error::NoSolution(format!(
                "ell'={ell_prime} is not congruent to ell={} mod {pm}",
                params.ell
            )));
        }
    }
    let modulus = j_modulus(params)?;
    let alpha = BigInt::from(params.alpha);
    let target = modn(&BigInt::from(other.alpha), &modulus);
    let mut k = BigInt::zero();
    while k < modulus {
        let f = BigInt::one() + &k * &pm;
        if pow_mod(&alpha, &f, &modulus) == target {
            return Ok(f);
        }
        k += 1;
    }
    Err(Error::NoSolution(format!("no f with alpha^f = alpha' mod {modulus}")))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceReport {
    pub id: String,
    pub modulus: BigInt,
    pub left: BigInt,
    pub right: BigInt,
    pub holds: bool,
}

impl CongruenceReport {
    pub fn new(id: &str, modulus: BigInt, left: BigInt, right: BigInt) -> Self {
        let holds = modn(&(&left - &right), &modulus).is_zero();
        CongruenceReport {
            id: id.to_string(),
            modulus,
            left,
            right,
            holds,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SumCheck {
    /// The exact value of α + 2α² + … + (f−1)α^{f−1}.
    pub sum: BigInt,
    pub primary: CongruenceReport,
    /// Equivalent reduced forms (Case 3 only).
    pub reduced: Vec<CongruenceReport>,
    pub forms_agree: bool,
}

pub fn weighted_power_sum(alpha: &BigInt, f: &BigInt) -> BigInt {
    let mut sum = BigInt::zero();
    let mut pw = BigInt::one();
    let mut i = BigInt::zero();
    while &i + 1 < *f {
        i += 1;
        pw *= alpha;
        sum += &i * &pw;
    }
    sum
}

pub fn check_sum_congruence(params: &FamilyParams, f: &BigInt) -> Result<SumCheck> {
    let alpha = BigInt::from(params.alpha);
    let sum = weighted_power_sum(&alpha, f);
    let (id, modulus) = match params.case {
        Some(Case::Case1) => ("suma", BigInt::from(params.pm())),
        Some(Case::Case2) => ("suma2", big_pow(2, params.m - 1)),
        Some(Case::Case3) => ("suma3", BigInt::from(9)),
        None => return Err(Error::InvalidParams("Macdonald groups have no case".into())),
    };
    let primary = CongruenceReport::new(id, modulus, sum.clone(), BigInt::zero());
    let mut reduced = Vec::new();
    if params.case == Some(Case::Case3) {
        let nine = BigInt::from(9);
        let fm1 = f - 1;
        let tri = &fm1 * f / 2;
        let squares = &fm1 * f * (2 * &fm1 + 1) / 6;
        let s4 = tri + (&alpha - 1) * squares;
        reduced.push(CongruenceReport::new("suma4", nine, s4, BigInt::zero()));
        let three = BigInt::from(3);
        let k = &fm1 / 3;
        let ell = BigInt::from(params.ell);
        let s5 = k * f * (1 + (2 * &fm1 + 1) * ell);
        reduced.push(CongruenceReport::new("suma5", three, s5, BigInt::zero()));
    }
    let forms_agree = reduced.iter().all(|r| r.holds == primary.holds);
    Ok(SumCheck {
        sum,
        primary,
        reduced,
        forms_agree,
    })
}

/// Minimal positive t prime to p with α^t ≡ α' modulo p^{2m} (Case 1) or 2^{2m-1} (Case 2).
pub fn find_t(params: &FamilyParams, alpha_prime: i64) -> Result<i64> {
    let modulus = match params.case {
        Some(Case::Case1) => big_pow(params.p, 2 * params.m),
        Some(Case::Case2) => big_pow(2, 2 * params.m - 1),
        _ => return Err(Error::InvalidParams("find_t needs Case 1 or 2".into())),
    };
    let alpha = BigInt::from(params.alpha);
    let target = modn(&BigInt::from(alpha_prime), &modulus);
    let bound = modulus.to_i64().unwrap_or(i64::MAX);
    let p = params.p as i64;
    let mut pw = modn(&alpha, &modulus);
    for t in 1..=bound {
        if t % p != 0 && pw == target {
            return Ok(t);
        }
        pw = (pw * &alpha).mod_floor(&modulus);
    }
    Err(Error::NoSolution(format!(
        "no t with alpha^t = {alpha_prime} mod {modulus}"
    )))
}

pub fn tri(i: i64) -> i64 {
    i * (i - 1) / 2
}

pub fn tet(n: i64) -> i64 {
    n * (n - 1) * (n - 2) / 6
}

/// 3-adic valuation; `None` for 0.
fn v3(x: i64) -> Option<u32> {
    if x == 0 {
        return None;
    }
    let mut x = x.abs();
    let mut v = 0;
    while x % 3 == 0 {
        x /= 3;
        v += 1;
    }
    Some(v)
}

const MACDONALD_SWAP: [i64; 7] = [-3, -1, 0, 1, 2, 3, 5];

fn macdonald_iso(a: i64, b: i64) -> bool {
    a == b || (b == 2 - a && MACDONALD_SWAP.contains(&a))
}

/// True when |G(β)| = |G(2−β)| is asserted (v_3(β−1) ≠ 1).
pub fn macdonald_orders_equal(beta: i64) -> bool {
    v3(beta - 1) != Some(1)
}

fn congruent(a: i64, b: i64, modulus: &BigInt) -> bool {
    modn(&(BigInt::from(a) - BigInt::from(b)), modulus).is_zero()
}

/// Decision tables of the isomorphism theorems.
pub fn iso_predicate(a: &FamilyParams, b: &FamilyParams) -> Result<bool> {
    if a.family != b.family {
        return Err(Error::InvalidParams(format!(
            "families differ: {} vs {}",
            a.family, b.family
        )));
    }
    if a.family == Family::G {
        return Ok(macdonald_iso(a.alpha, b.alpha));
    }
    check_same_slice(a, b)?;
    let (p, m) = (a.p, a.m);
    use Family::*;
    Ok(match a.family {
        J1 | H1 => {
            if (p, m) == (3, 1) {
                true
            } else {
                congruent(a.alpha, b.alpha, &big_pow(p, 2 * m))
            }
        }
        K1 | K2 | J3 | H3 | K3 => true,
        J2 => m <= 2 || congruent(a.alpha, b.alpha, &big_pow(2, 2 * m)),
        H2 => m <= 3 || congruent(a.alpha, b.alpha, &big_pow(2, 2 * m - 2)),
        G => unreachable!(),
    })
}

/// Number of isomorphism classes the criteria predict for a (family, p, m) slice.
pub fn predicted_class_count(family: Family, p: u64, m: u32) -> Option<u64> {
    let phi = |q: u64, e: u32| if e == 0 { 1 } else { q.pow(e) - q.pow(e - 1) };
    use Family::*;
    match family {
        J1 | H1 if (p, m) == (3, 1) => Some(1),
        J1 | H1 => Some(phi(p, m)),
        J2 if m <= 2 => Some(1),
        J2 => Some(phi(2, m)),
        H2 if m <= 3 => Some(1),
        H2 => Some(phi(2, m - 2)),
        K1 | K2 | J3 | H3 | K3 => Some(1),
        G => None,
    }
}

/// Counts classes of `iso_predicate` by brute force over ℓ residues modulo the
/// period of the presentation.
pub fn count_classes_brute_force(family: Family, p: u64, m: u32) -> Result<usize> {
    let p_i = p as i64;
    let period = match family.case() {
        Some(Case::Case1) => p_i.pow(2 * m),
        Some(Case::Case2) => 1 << (2 * m),
        Some(Case::Case3) => 27,
        None => return Err(Error::InvalidParams("family G has no residue slice".into())),
    };
    let mut params = Vec::new();
    for ell in 1..=period {
        if let Ok(fp) = FamilyParams::new(family, p, m, ell) {
            params.push(fp);
        }
    }
    let mut reps: Vec<FamilyParams> = Vec::new();
    for fp in params {
        let mut found = false;
        for r in &reps {
            if iso_predicate(r, &fp)? {
                found = true;
                break;
            }
        }
        if !found {
            reps.push(fp);
        }
    }
    Ok(reps.len())
}

/// Returns exponent `e` reduced into `[0, n)`.
pub fn rem(e: i64, n: i64) -> i64 {
    e.rem_euclid(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classify_examples() {
        assert_eq!(classify(3, 1, 1).unwrap(), Case::Case1);
        assert_eq!(classify(3, 1, 2).unwrap(), Case::Case3);
        assert_eq!(classify(2, 3, 5).unwrap(), Case::Case2);
        assert_eq!(classify(3, 2, 2).unwrap(), Case::Case1);
        assert!(classify(4, 1, 1).is_err());
        assert!(classify(5, 1, 10).is_err());
        assert!(classify(3, 1, -1).map(|c| c == Case::Case3).unwrap());
    }

    #[test]
    fn closed_forms() {
        let j1 = FamilyParams::new(Family::J1, 3, 1, 1).unwrap();
        assert_eq!(expected_order(&j1).unwrap(), BigInt::from(2187));
        let j2 = FamilyParams::new(Family::J2, 2, 1, 1).unwrap();
        assert_eq!(expected_order(&j2).unwrap(), BigInt::from(16));
        assert_eq!(expected_class(&j2).unwrap(), 3);
        let j3 = FamilyParams::new(Family::J3, 3, 1, 2).unwrap();
        assert_eq!(expected_order(&j3).unwrap(), BigInt::from(59049));
        assert_eq!(expected_class(&j3).unwrap(), 7);
        let j15 = FamilyParams::new(Family::J1, 5, 1, 1).unwrap();
        assert_eq!(expected_class(&j15).unwrap(), 5);
        let h1 = FamilyParams::new(Family::H1, 5, 1, 1).unwrap();
        assert!(expected_order(&h1).is_err());
    }

    #[test]
    fn find_f_examples() {
        let j1 = FamilyParams::new(Family::J1, 5, 1, 1).unwrap();
        assert_eq!(find_f(&j1, 6).unwrap(), BigInt::from(6));
        assert_eq!(find_f(&j1, 1).unwrap(), BigInt::from(1));
        assert!(find_f(&j1, 2).is_err());
        let j3 = FamilyParams::new(Family::J3, 3, 1, 2).unwrap();
        assert_eq!(find_f(&j3, 5).unwrap(), BigInt::from(7));
    }

    #[test]
    fn sum_examples() {
        let j1 = FamilyParams::new(Family::J1, 5, 1, 1).unwrap();
        let r = check_sum_congruence(&j1, &BigInt::from(6)).unwrap();
        assert_eq!(r.sum, BigInt::from(44790));
        assert!(r.primary.holds);
        let r = check_sum_congruence(&j1, &BigInt::from(1)).unwrap();
        assert_eq!(r.sum, BigInt::zero());
        assert!(r.primary.holds);
        let j3 = FamilyParams::new(Family::J3, 3, 1, 2).unwrap();
        let r = check_sum_congruence(&j3, &BigInt::from(7)).unwrap();
        assert_eq!(r.sum, BigInt::from(800667));
        assert!(r.primary.holds && r.forms_agree);
        assert_eq!(r.reduced.len(), 2);
    }

    #[test]
    fn find_t_examples() {
        let k1 = FamilyParams::new(Family::K1, 5, 1, 1).unwrap();
        assert_eq!(find_t(&k1, 31).unwrap(), 1);
        assert_eq!(find_t(&k1, 6).unwrap(), 1);
        assert_eq!(find_t(&k1, 11).unwrap(), 2);
        let k2 = FamilyParams::new(Family::K2, 2, 3, 1).unwrap();
        assert_eq!(find_t(&k2, 25).unwrap(), 3);
    }

    #[test]
    fn predicate_examples() {
        let a = FamilyParams::new(Family::J1, 5, 1, 1).unwrap();
        assert!(iso_predicate(&a, &a.with_ell(6).unwrap()).unwrap());
        assert!(!iso_predicate(&a, &a.with_ell(2).unwrap()).unwrap());
        let b = FamilyParams::new(Family::J2, 2, 2, 1).unwrap();
        assert!(iso_predicate(&b, &b.with_ell(3).unwrap()).unwrap());
        let h = FamilyParams::new(Family::H2, 2, 4, 1).unwrap();
        assert!(!iso_predicate(&h, &h.with_ell(3).unwrap()).unwrap());
        let g3 = FamilyParams::macdonald(3);
        assert!(iso_predicate(&g3, &FamilyParams::macdonald(-1)).unwrap());
        assert!(!iso_predicate(&FamilyParams::macdonald(7), &FamilyParams::macdonald(-5)).unwrap());
        let c = FamilyParams::new(Family::J1, 3, 2, 1).unwrap();
        assert!(iso_predicate(&a, &c).is_err());
    }

    #[test]
    fn tri_tet() {
        assert_eq!(tri(0), 0);
        assert_eq!(tri(5), 10);
        assert_eq!(tet(4), 4);
    }

    #[test]
    fn class_counts_match_prediction() {
        for &(f, p, m) in &[
            (Family::J1, 5, 1),
            (Family::J1, 3, 1),
            (Family::J1, 3, 2),
            (Family::J1, 7, 1),
            (Family::H1, 5, 1),
            (Family::J2, 2, 2),
            (Family::J2, 2, 3),
            (Family::J2, 2, 4),
            (Family::H2, 2, 3),
            (Family::H2, 2, 4),
            (Family::H2, 2, 5),
            (Family::K1, 5, 1),
        ] {
            let n = count_classes_brute_force(f, p, m).unwrap();
            assert_eq!(Some(n as u64), predicted_class_count(f, p, m), "{f} p={p} m={m}");
        }
    }
}
