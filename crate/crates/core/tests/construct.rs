use mcdw::construct::{construct, fundamental_relator, macdonald_as_j, BuildConfig, Method};
use mcdw::params::{expected_class, expected_order, Family, FamilyParams};
use mcdw::Error;
use num_bigint::BigInt;

fn fp(f: Family, p: u64, m: u32, l: i64) -> FamilyParams {
    FamilyParams::new(f, p, m, l).unwrap()
}

#[test]
fn small_orders_and_classes() {
    let cfg = BuildConfig::default();
    // (params, |G|, class)
    let cases = [
        (fp(Family::J2, 2, 1, 1), 16, 3),
        (fp(Family::J2, 2, 1, 3), 16, 3),
        (fp(Family::J2, 2, 2, 1), 2048, 5),
        (fp(Family::J1, 3, 1, 1), 2187, 5),
        (fp(Family::J1, 3, 1, -2), 2187, 5),
    ];
    for (p, n, class) in cases {
        let c = construct(&p, &cfg).unwrap();
        assert_eq!(c.group.order(), n, "{}", p.label());
        assert_eq!(expected_order(&p).unwrap(), BigInt::from(n));
        assert_eq!(c.group.nilpotency_class().unwrap(), class);
        assert_eq!(expected_class(&p).unwrap(), class);
        assert!(c.group.satisfies(c.presentation.as_ref().unwrap()));
    }
}

#[test]
fn quotient_families_are_proper_quotients() {
    let cfg = BuildConfig::default();
    let j = construct(&fp(Family::J2, 2, 2, 1), &cfg).unwrap();
    for f in [Family::H2, Family::K2] {
        let c = construct(&fp(f, 2, 2, 1), &cfg).unwrap();
        assert!(c.group.order() < j.group.order());
        assert_eq!(j.group.order() % c.group.order(), 0, "{f}");
    }
    let h3 = construct(&fp(Family::H3, 3, 1, 2), &cfg).unwrap();
    assert!(matches!(h3.method, Method::Quotient { .. }));
    assert!(h3.presentation.is_none());
    assert_eq!(59049 % h3.group.order(), 0);
}

#[test]
fn fundamental_relation_holds() {
    let cfg = BuildConfig::default();
    for p in [fp(Family::J2, 2, 2, 1), fp(Family::J1, 3, 1, 1)] {
        let c = construct(&p, &cfg).unwrap();
        let w = fundamental_relator(&p).unwrap();
        assert_eq!(c.group.elem_of_word(&w), c.group.identity(), "{}", p.label());
    }
}

#[test]
fn macdonald_groups() {
    let cfg = BuildConfig::default();
    assert_eq!(construct(&FamilyParams::macdonald(-1), &cfg).unwrap().group.order(), 16);
    assert_eq!(construct(&FamilyParams::macdonald(3), &cfg).unwrap().group.order(), 16);
    assert!(matches!(construct(&FamilyParams::macdonald(1), &cfg), Err(Error::InfiniteGroup)));
    assert_eq!(macdonald_as_j(5).map(|p| p.family), Some(Family::J2));
}

#[test]
fn tight_limits_fail_cleanly() {
    let cfg = BuildConfig {
        dense_cap: 100,
        ..BuildConfig::default()
    };
    assert!(construct(&fp(Family::J2, 2, 2, 1), &cfg).is_err());
}
