use mcdw::cache::{cache_key, decode, encode, Cache, MAGIC};
use mcdw::construct::{construct, BuildConfig};
use mcdw::group::DenseGroup;
use mcdw::params::{Family, FamilyParams};
use mcdw::Error;

fn j2_5() -> FamilyParams {
    FamilyParams::new(Family::J2, 2, 2, 1).unwrap()
}

#[test]
fn round_trip_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cache = Cache::new(dir.path());
    let cfg = BuildConfig::default();
    let (built, hit) = cache.get_or_build(&j2_5(), &cfg).unwrap();
    assert!(!hit);
    let (bin, side) = cache.paths(&j2_5());
    let bytes = std::fs::read(&bin).unwrap();
    assert_eq!(&bytes[..5], MAGIC);
    assert_eq!(bytes, encode(&built.group));
    assert!(side.exists());

    let (loaded, hit) = cache.get_or_build(&j2_5(), &cfg).unwrap();
    assert!(hit);
    assert_eq!(encode(&loaded.group), bytes);
    assert_eq!(loaded.group.right_table(), built.group.right_table());
    assert_eq!(loaded.method, built.method);

    let gens = decode(&bytes).unwrap();
    let again = DenseGroup::build(&gens, 1 << 16).unwrap();
    assert_eq!(encode(&again), bytes);
}

#[test]
fn equivalent_parameters_share_a_key() {
    let a = FamilyParams::new(Family::J2, 2, 2, 1).unwrap();
    let b = FamilyParams::new(Family::J2, 2, 2, 9).unwrap();
    let c = FamilyParams::new(Family::J2, 2, 2, 3).unwrap();
    assert_eq!(cache_key(&a), cache_key(&b));
    assert_ne!(cache_key(&a), cache_key(&c));
    assert_eq!(cache_key(&FamilyParams::macdonald(-3)), "G_b-3");
}

#[test]
fn corrupt_files_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cache = Cache::new(dir.path());
    let c = construct(&j2_5(), &BuildConfig::default()).unwrap();
    let bin = cache.save(&c).unwrap();
    let good = std::fs::read(&bin).unwrap();

    let mut bad = good.clone();
    bad[0] = b'X';
    assert!(matches!(decode(&bad), Err(Error::Cache(_))));
    assert!(matches!(decode(&good[..good.len() - 4]), Err(Error::Cache(_))));
    // Two equal entries in a row: not a permutation.
    let mut bad = good.clone();
    let (x, y) = (13, 17);
    let v: [u8; 4] = bad[x..x + 4].try_into().unwrap();
    bad[y..y + 4].copy_from_slice(&v);
    assert!(decode(&bad).is_err());

    // A valid file for a different group fails the relator check.
    let other = construct(&FamilyParams::new(Family::J2, 2, 1, 1).unwrap(), &BuildConfig::default()).unwrap();
    std::fs::write(&bin, encode(&other.group)).unwrap();
    assert!(cache.load(&j2_5(), 1 << 16).is_err());
}

#[test]
fn missing_entry_is_none() {
    let dir = tempfile::tempdir().unwrap();
    assert!(Cache::new(dir.path()).load(&j2_5(), 1 << 16).unwrap().is_none());
}
