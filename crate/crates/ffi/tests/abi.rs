use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use mcdw_ffi::*;

fn last_error() -> String {
    let p = mcdw_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn workbench() -> *mut McdwWorkbench {
    let mut wb = ptr::null_mut();
    assert_eq!(unsafe { mcdw_workbench_new(ptr::null(), &mut wb) }, McdwStatus::Ok);
    assert!(!wb.is_null());
    wb
}

#[test]
fn group_order_class_and_series() {
    let wb = workbench();
    let fam = CString::new("J2").unwrap();
    let mut g = ptr::null_mut();
    unsafe {
        assert_eq!(mcdw_group_new(wb, fam.as_ptr(), 2, 2, 1, &mut g), McdwStatus::Ok);
        let mut order = 0u64;
        let mut class = 0u32;
        assert_eq!(mcdw_group_order(g, &mut order), McdwStatus::Ok);
        assert_eq!(mcdw_group_class(g, &mut class), McdwStatus::Ok);
        assert_eq!((order, class), (2048, 5));
        let mut json = ptr::null_mut();
        assert_eq!(mcdw_group_series_json(g, &mut json), McdwStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(CStr::from_ptr(json).to_str().unwrap()).unwrap();
        assert_eq!(v["class"], 5);
        assert_eq!(v["terms"].as_array().unwrap().len(), 5);
        mcdw_string_free(json);
        mcdw_group_free(g);
        mcdw_workbench_free(wb);
    }
}

#[test]
fn macdonald_group() {
    let wb = workbench();
    let mut g = ptr::null_mut();
    unsafe {
        assert_eq!(mcdw_group_macdonald(wb, -1, &mut g), McdwStatus::Ok);
        let mut order = 0u64;
        assert_eq!(mcdw_group_order(g, &mut order), McdwStatus::Ok);
        assert_eq!(order, 16);
        mcdw_group_free(g);
        assert_eq!(mcdw_group_macdonald(wb, 1, &mut g), McdwStatus::InfiniteGroup);
        mcdw_workbench_free(wb);
    }
}

#[test]
fn iso_verdicts() {
    let wb = workbench();
    let j2 = CString::new("j2").unwrap();
    let h1 = CString::new("H1").unwrap();
    unsafe {
        let mut v = McdwVerdict::Undecided;
        let mut ev = ptr::null_mut();
        assert_eq!(mcdw_iso(wb, j2.as_ptr(), 2, 2, 1, 3, &mut v, &mut ev), McdwStatus::Ok);
        assert_eq!(v, McdwVerdict::Isomorphic);
        assert!(!ev.is_null());
        mcdw_string_free(ev);
        assert_eq!(mcdw_iso(wb, h1.as_ptr(), 5, 1, 1, 2, &mut v, ptr::null_mut()), McdwStatus::Ok);
        assert_eq!(v, McdwVerdict::NotIsomorphic);
        mcdw_workbench_free(wb);
    }
}

#[test]
fn errors_are_reported() {
    let wb = workbench();
    let bad = CString::new("Q7").unwrap();
    let j1 = CString::new("J1").unwrap();
    let mut g = ptr::null_mut();
    unsafe {
        assert_eq!(mcdw_group_new(wb, bad.as_ptr(), 3, 1, 1, &mut g), McdwStatus::InvalidParams);
        assert!(last_error().contains("Q7"));
        // ell divisible by p
        assert_eq!(mcdw_group_new(wb, j1.as_ptr(), 3, 1, 3, &mut g), McdwStatus::InvalidParams);
        assert!(g.is_null());
        assert_eq!(mcdw_group_new(wb, ptr::null(), 3, 1, 1, &mut g), McdwStatus::NullPointer);
        assert_eq!(mcdw_group_new(wb, j1.as_ptr(), 3, 1, 1, ptr::null_mut()), McdwStatus::NullPointer);
        assert_eq!(mcdw_group_order(ptr::null(), ptr::null_mut()), McdwStatus::NullPointer);
        assert_eq!(mcdw_group_new(wb, j1.as_ptr(), 3, 1, 1, &mut g), McdwStatus::Ok);
        assert!(mcdw_last_error().is_null());
        mcdw_group_free(g);
        mcdw_group_free(ptr::null_mut());
        mcdw_workbench_free(wb);
        mcdw_workbench_free(ptr::null_mut());
    }
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(mcdw_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

/// The generated header declares every entry point and compiles as C.
#[test]
fn header_is_valid_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/mcdw.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for sym in [
        "mcdw_last_error",
        "mcdw_version",
        "mcdw_workbench_new",
        "mcdw_workbench_free",
        "mcdw_group_new",
        "mcdw_group_macdonald",
        "mcdw_group_free",
        "mcdw_group_order",
        "mcdw_group_class",
        "mcdw_group_series_json",
        "mcdw_iso",
        "mcdw_verify_default",
        "mcdw_string_free",
        "MCDW_STATUS_OK",
        "MCDW_VERDICT_ISOMORPHIC",
    ] {
        assert!(text.contains(sym), "{sym} missing from header");
    }
    let Ok(out) = Command::new("cc").args(["-fsyntax-only", "-x", "c"]).arg(&header).output() else {
        eprintln!("no C compiler; skipping syntax check");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
