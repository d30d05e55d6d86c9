use mcdw::collect::{derive_collector, Collector, ExpTriple, NfIndex};
use mcdw::construct::{construct, BuildConfig};
use mcdw::group::DenseGroup;
use mcdw::params::{Family, FamilyParams};
use mcdw::presentations::presentation;
use proptest::prelude::*;
use std::sync::OnceLock;

struct Fixture {
    group: DenseGroup,
    col: Collector,
    idx: NfIndex,
}

fn fixture(p: FamilyParams) -> Fixture {
    let group = construct(&p, &BuildConfig::default()).unwrap().group;
    let (col, idx) = derive_collector(&p, &group, 1 << 12).unwrap();
    Fixture { group, col, idx }
}

fn j2_5() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| fixture(FamilyParams::new(Family::J2, 2, 2, 1).unwrap()))
}

fn j1_4() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| fixture(FamilyParams::new(Family::J1, 3, 1, 1).unwrap()))
}

fn triple(f: &Fixture) -> impl Strategy<Value = ExpTriple> + '_ {
    (0..f.col.a_mod, 0..f.col.b_mod, 0..f.col.c_mod).prop_map(|(a, b, c)| ExpTriple::new(a as u32, b as u32, c as u32))
}

#[test]
fn exhaustive_against_dense_oracle() {
    for f in [j2_5(), j1_4()] {
        assert_eq!(f.col.order() as usize, f.group.order());
        assert_eq!(f.col.validate_exhaustive(&f.group, &f.idx), 0);
    }
}

#[test]
fn relators_vanish() {
    for (f, p) in [
        (j2_5(), FamilyParams::new(Family::J2, 2, 2, 1).unwrap()),
        (j1_4(), FamilyParams::new(Family::J1, 3, 1, 1).unwrap()),
    ] {
        for w in &presentation(&p).unwrap().relators {
            assert_eq!(f.col.eval_word_nf(w), ExpTriple::IDENTITY);
        }
    }
}

#[test]
fn normal_form_bijection() {
    let f = j2_5();
    for g in 0..f.group.order() as u32 {
        let t = f.idx.nf(&f.col, g);
        assert!(f.col.in_range(t));
        assert_eq!(f.idx.elem(&f.col, t), g);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn mul_matches_oracle(s in triple(j2_5()), t in triple(j2_5())) {
        let f = j2_5();
        let want = f.group.mul(f.idx.elem(&f.col, s), f.idx.elem(&f.col, t));
        prop_assert_eq!(f.idx.elem(&f.col, f.col.nf_mul(s, t)), want);
    }

    #[test]
    fn inverse_power_commutator(s in triple(j1_4()), t in triple(j1_4()), k in -200i64..200) {
        let f = j1_4();
        let (c, g) = (&f.col, &f.group);
        let (gs, gt) = (f.idx.elem(c, s), f.idx.elem(c, t));
        prop_assert_eq!(c.nf_mul(s, c.nf_inv(s)), ExpTriple::IDENTITY);
        prop_assert_eq!(f.idx.elem(c, c.nf_pow(s, k)), g.pow(gs, k));
        prop_assert_eq!(f.idx.elem(c, c.nf_comm(s, t)), g.commutator(gs, gt));
        prop_assert_eq!(c.elem_order(s), g.element_order(gs));
    }
}
