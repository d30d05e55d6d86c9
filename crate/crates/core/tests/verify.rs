use mcdw::collect::ExpTriple;
use mcdw::params::{Family, FamilyParams};
use mcdw::verify::{
    bundle_json, cong_lr, decide_isomorphism, summary_table, verify_appendix, verify_necj2, verify_series_factors,
    verify_structure, verify_theorem, AppendixGrid, CheckReport, GridPoint, IsoVerdict, Status, Theorem, VerifyConfig,
    Workbench, APPENDIX_IDENTITIES,
};

fn wb() -> Workbench {
    Workbench::new(VerifyConfig::default())
}

fn fp(f: Family, p: u64, m: u32, l: i64) -> FamilyParams {
    FamilyParams::new(f, p, m, l).unwrap()
}

#[test]
fn structure_reports_pass_and_are_reproducible() {
    let params = [fp(Family::J2, 2, 1, 1), fp(Family::J2, 2, 2, 1), fp(Family::J1, 3, 1, 1)];
    let first: Vec<CheckReport> = params.iter().map(|p| verify_structure(&wb(), p)).collect();
    for r in &first {
        assert_eq!(r.status, Status::Pass, "{}", serde_json::to_string_pretty(r).unwrap());
    }
    let second: Vec<CheckReport> = params.iter().map(|p| verify_structure(&wb(), p)).collect();
    for (a, b) in first.iter().zip(&second) {
        assert_eq!(a.canonical(), b.canonical());
    }
}

#[test]
fn bundle_round_trips() {
    let reports = vec![verify_structure(&wb(), &fp(Family::J2, 2, 1, 1))];
    let back: Vec<CheckReport> = serde_json::from_str(&bundle_json(&reports)).unwrap();
    assert_eq!(back, reports);
    let table = summary_table(&reports);
    assert!(table.starts_with("check"));
    assert!(table.trim_end().ends_with("1/1 passed"));
}

#[test]
fn errors_become_failures() {
    // G(1) is infinite: construction fails and the report carries the error.
    let r = verify_structure(&wb(), &FamilyParams::macdonald(1));
    assert_eq!(r.status, Status::Fail);
    assert_eq!(r.evidence["failures"][0]["check"], "error");
}

#[test]
fn isomorphism_decisions() {
    let w = wb();
    let v = decide_isomorphism(&w, &fp(Family::J2, 2, 2, 1), &fp(Family::J2, 2, 2, 3)).unwrap();
    assert!(matches!(v, IsoVerdict::Isomorphic(_)));
    let v = decide_isomorphism(&w, &fp(Family::J1, 5, 1, 1), &fp(Family::J1, 5, 1, 6)).unwrap();
    assert!(matches!(v, IsoVerdict::Isomorphic(_)));
    let v = decide_isomorphism(&w, &fp(Family::H1, 5, 1, 1), &fp(Family::H1, 5, 1, 2)).unwrap();
    assert!(matches!(v, IsoVerdict::NotIsomorphic(_)));
    let v = decide_isomorphism(&w, &FamilyParams::macdonald(3), &FamilyParams::macdonald(-1)).unwrap();
    assert!(matches!(v, IsoVerdict::Isomorphic(_)));
}

#[test]
fn theorem_c_and_necj2() {
    let w = wb();
    assert!(verify_theorem(&w, Theorem::C).passed());
    let r = verify_necj2(&w, 1, 3);
    assert!(r.passed(), "{}", r.evidence);
    assert_eq!(verify_necj2(&w, 1, 5).status, Status::Skipped);
}

#[test]
fn series_factors_j1() {
    let r = verify_series_factors(&wb(), &fp(Family::J1, 5, 1, 1), &fp(Family::J1, 5, 1, 2));
    assert!(r.passed(), "{}", r.evidence);
}

#[test]
fn appendix_single_ell() {
    let grid = AppendixGrid {
        ells: vec![1],
        ..AppendixGrid::default()
    };
    assert_eq!(grid.points().len(), 32);
    let r = verify_appendix(&wb(), &grid);
    assert!(r.passed(), "{}", r.evidence);
    for name in APPENDIX_IDENTITIES {
        assert_eq!(r.evidence[name]["passed"], 32, "{name}");
    }
}

#[test]
fn cong_lr_never_vanishes_together() {
    for q in AppendixGrid::default().points() {
        assert_ne!(cong_lr(&q), (0, 0), "{q:?}");
    }
    let q = GridPoint { ell: 1, i: 0, j: 0, a: 0, b: 0, ell1: 0 };
    assert_eq!(q.ell_prime(), -1);
    let (x, y) = cong_lr(&q);
    assert!((0..256).contains(&x) && (0..256).contains(&y));
}

/// The first collection identity re-derived by hand at ell = 1 (s = 4,
/// u = 16, r = 2): (A B^2)^5 = A^5 B^26 C^-4 A^64 in J2(9). Any change to one
/// exponent must break it.
#[test]
fn appendix_identity_is_sensitive_to_exponents() {
    let w = wb();
    let col = w.collector(&fp(Family::J2, 2, 3, 1)).unwrap();
    let c = &col.0;
    let prod = |xs: &[ExpTriple]| xs.iter().fold(ExpTriple::IDENTITY, |acc, &x| c.nf_mul(acc, x));
    let lhs = c.nf_pow(prod(&[c.gen_pow(0, 1), c.gen_pow(1, 2)]), 5);
    let rhs = |da: i64, db: i64, dc: i64, dt: i64| {
        prod(&[c.gen_pow(0, 5 + da), c.gen_pow(1, 26 + db), c.gen_pow(2, -4 + dc), c.gen_pow(0, 64 + dt)])
    };
    assert_eq!(lhs, rhs(0, 0, 0, 0));
    for d in [1, 2, 16, 32, -64] {
        assert_ne!(lhs, rhs(d, 0, 0, 0), "A exponent +{d}");
        assert_ne!(lhs, rhs(0, d, 0, 0), "B exponent +{d}");
        assert_ne!(lhs, rhs(0, 0, 0, d), "tail exponent +{d}");
    }
    for d in [1, 2, 8] {
        assert_ne!(lhs, rhs(0, 0, d, 0), "C exponent +{d}");
    }
}
