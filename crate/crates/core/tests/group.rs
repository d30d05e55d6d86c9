use mcdw::construct::{construct, BuildConfig};
use mcdw::group::{DenseGroup, Elem};
use mcdw::params::{Family, FamilyParams};
use mcdw::presentations::Presentation;
use mcdw::enumerate::{regular_action, EnumLimits};
use proptest::prelude::*;
use std::sync::OnceLock;

fn from_text(s: &str) -> DenseGroup {
    let p = Presentation::parse(s).unwrap();
    DenseGroup::build(&regular_action(&p, EnumLimits::default()).unwrap(), 1 << 16).unwrap()
}

fn j2_5() -> &'static DenseGroup {
    static G: OnceLock<DenseGroup> = OnceLock::new();
    G.get_or_init(|| {
        construct(&FamilyParams::new(Family::J2, 2, 2, 1).unwrap(), &BuildConfig::default())
            .unwrap()
            .group
    })
}

/// Upper central series orders by the definition, using only `mul` and
/// `inverse`: `Z_{i+1} = {g : [g, h] ∈ Z_i for all h}`.
fn naive_series_orders(g: &DenseGroup) -> Vec<usize> {
    let n = g.order() as Elem;
    let mut inz = vec![false; n as usize];
    inz[0] = true;
    let mut out = Vec::new();
    loop {
        let next: Vec<bool> = (0..n)
            .map(|x| {
                (0..n).all(|h| {
                    let c = g.mul(g.mul(g.inverse(x), g.inverse(h)), g.mul(x, h));
                    inz[c as usize]
                })
            })
            .collect();
        let k = next.iter().filter(|&&b| b).count();
        if k == inz.iter().filter(|&&b| b).count() {
            return out;
        }
        out.push(k);
        inz = next;
    }
}

#[test]
fn series_matches_definition() {
    for text in [
        "x, y | x^8, y^2, (x y)^2",
        "x, y | x^4, x^2 y^-2, y^-1 x y x",
        "x, y | x^3, y^3, (x y)^3, (x^-1 y)^3",
    ] {
        let g = from_text(text);
        let (_, r) = g.upper_central_series().unwrap();
        let got: Vec<usize> = r.terms.iter().map(|t| t.order as usize).collect();
        assert_eq!(got, naive_series_orders(&g), "{text}");
    }
    let g = construct(&FamilyParams::new(Family::J2, 2, 1, 1).unwrap(), &BuildConfig::default()).unwrap().group;
    let (_, r) = g.upper_central_series().unwrap();
    let got: Vec<usize> = r.terms.iter().map(|t| t.order as usize).collect();
    assert_eq!(got, naive_series_orders(&g));
    assert_eq!(r.class, 3);
}

#[test]
fn non_nilpotent_has_no_class() {
    // S_3 has trivial centre: the series never reaches the whole group.
    let g = from_text("x, y | x^2, y^3, (x y)^2");
    assert_eq!(g.center().order(), 1);
    assert!(g.nilpotency_class().is_err());
}

#[test]
fn abelian_invariants_smith_form() {
    // Z/a x Z/b ≅ Z/gcd x Z/lcm.
    for (a, b) in [(4u64, 6u64), (8, 2), (9, 3), (5, 7), (12, 18)] {
        let g = from_text(&format!("x, y | x^{a}, y^{b}, [x, y]"));
        let gcd = num_integer::gcd(a, b);
        let lcm = a * b / gcd;
        let mut want: Vec<u64> = vec![gcd, lcm].into_iter().filter(|&d| d > 1).collect();
        want.sort();
        // the invariants are reported as prime-power (elementary divisor) form
        let got = g.abelian_invariants(&g.whole()).unwrap();
        let prod: u64 = got.iter().product();
        assert_eq!(prod, a * b);
        let expanded = |v: &[u64]| {
            let mut pp = Vec::new();
            for &d in v {
                let mut d = d;
                let mut q = 2;
                while d > 1 {
                    let mut e = 1;
                    while d % q == 0 {
                        d /= q;
                        e *= q;
                    }
                    if e > 1 {
                        pp.push(e);
                    }
                    q += 1;
                }
            }
            pp.sort();
            pp
        };
        assert_eq!(expanded(&got), expanded(&want), "Z/{a} x Z/{b}");
    }
}

#[test]
fn quaternion_structure() {
    let q8 = from_text("x, y | x^4, x^2 y^-2, y^-1 x y x");
    assert_eq!(q8.order(), 8);
    assert_eq!(q8.center().order(), 2);
    assert_eq!(q8.derived_subgroup().order(), 2);
    let mut orders: Vec<u32> = q8.orders().to_vec();
    orders.sort();
    assert_eq!(orders, vec![1, 2, 4, 4, 4, 4, 4, 4]);
    assert_eq!(q8.conjugacy_class_reps().len(), 5);
}

#[test]
fn quotient_by_centre() {
    let d8 = from_text("x, y | x^4, y^2, (x y)^2");
    let z = d8.center();
    let q = d8.quotient(&z).unwrap();
    assert_eq!(q.order(), 4);
    assert!(q.is_abelian());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn group_axioms(a in 0u32..2048, b in 0u32..2048, c in 0u32..2048) {
        let g = j2_5();
        prop_assert_eq!(g.mul(g.mul(a, b), c), g.mul(a, g.mul(b, c)));
        prop_assert_eq!(g.mul(a, g.inverse(a)), g.identity());
        prop_assert_eq!(g.mul(g.identity(), a), a);
    }

    #[test]
    fn power_and_order(a in 0u32..2048, k in -70i64..70, l in -70i64..70) {
        let g = j2_5();
        prop_assert_eq!(g.mul(g.pow(a, k), g.pow(a, l)), g.pow(a, k + l));
        let o = g.element_order(a) as i64;
        prop_assert_eq!(g.pow(a, o), g.identity());
        prop_assert_eq!(2048 % o, 0);
    }

    #[test]
    fn words_evaluate_back(a in 0u32..2048) {
        let g = j2_5();
        prop_assert_eq!(g.elem_of_word(&g.word(a)), a);
    }

    #[test]
    fn centre_commutes(a in 0u32..2048) {
        let g = j2_5();
        let z = g.center();
        for &c in &z.elements {
            prop_assert_eq!(g.mul(a, c), g.mul(c, a));
        }
    }
}
