//! C ABI over the workbench.
//!
//! Objects are opaque handles created by `*_new` and released by `*_free`.
//! Every fallible call returns an [`McdwStatus`]; on a non-zero status the
//! message is available from [`mcdw_last_error`] on the same thread. Strings
//! returned through out-pointers are owned by the caller and released with
//! [`mcdw_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;
use std::sync::Arc;

use mcdw::construct::Constructed;
use mcdw::params::{Family, FamilyParams};
use mcdw::verify::{bundle_json, decide_isomorphism, default_suite, IsoVerdict, VerifyConfig, Workbench};
use mcdw::Error;

/// Result codes shared by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum McdwStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidParams = 3,
    InfiniteGroup = 4,
    OutOfSpace = 5,
    BoundExceeded = 6,
    Cache = 7,
    Failed = 8,
    Panic = 9,
}

/// Outcome of [`mcdw_iso`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum McdwVerdict {
    Isomorphic = 0,
    NotIsomorphic = 1,
    Undecided = 2,
}

/// Builds and caches groups; safe to share between threads.
pub struct McdwWorkbench(Workbench);

/// A constructed finite group.
pub struct McdwGroup(Arc<Constructed>);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> McdwStatus {
    match e {
        Error::InvalidParams(_) | Error::Parse(_) => McdwStatus::InvalidParams,
        Error::InfiniteGroup => McdwStatus::InfiniteGroup,
        Error::OutOfSpace { .. } => McdwStatus::OutOfSpace,
        Error::BoundExceeded(_) => McdwStatus::BoundExceeded,
        Error::Cache(_) => McdwStatus::Cache,
        _ => McdwStatus::Failed,
    }
}

struct Fail(McdwStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Fail {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(body: impl FnOnce() -> Result<(), Fail>) -> McdwStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => McdwStatus::Ok,
        Ok(Err(Fail(s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic".into());
            McdwStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(McdwStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(McdwStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| Fail(McdwStatus::NullPointer, format!("{what} is null")))
}

fn out<T>(p: *mut T, what: &str) -> Result<*mut T, Fail> {
    if p.is_null() {
        Err(Fail(McdwStatus::NullPointer, format!("{what} is null")))
    } else {
        Ok(p)
    }
}

fn c_string(s: String) -> Result<*mut c_char, Fail> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| Fail(McdwStatus::Failed, "interior NUL in output".into()))
}

fn family(name: &str) -> Result<Family, Fail> {
    Family::ALL
        .iter()
        .copied()
        .find(|f| f.to_string().eq_ignore_ascii_case(name))
        .ok_or_else(|| Fail(McdwStatus::InvalidParams, format!("unknown family {name}")))
}

/// Message for the last failed call on this thread, or NULL. Valid until the
/// next call on this thread.
#[no_mangle]
pub extern "C" fn mcdw_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static version string.
#[no_mangle]
pub extern "C" fn mcdw_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// `cache_dir` may be NULL to build everything in memory.
///
/// # Safety
/// `cache_dir` is NULL or a NUL-terminated string; `out_wb` is writable.
#[no_mangle]
pub unsafe extern "C" fn mcdw_workbench_new(cache_dir: *const c_char, out_wb: *mut *mut McdwWorkbench) -> McdwStatus {
    guard(|| {
        let slot = out(out_wb, "out")?;
        let cache_dir = if cache_dir.is_null() {
            None
        } else {
            Some(PathBuf::from(text(cache_dir, "cache_dir")?))
        };
        let config = VerifyConfig {
            cache_dir,
            ..VerifyConfig::default()
        };
        *slot = Box::into_raw(Box::new(McdwWorkbench(Workbench::new(config))));
        Ok(())
    })
}

/// # Safety
/// `wb` is NULL or a handle from [`mcdw_workbench_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mcdw_workbench_free(wb: *mut McdwWorkbench) {
    if !wb.is_null() {
        drop(Box::from_raw(wb));
    }
}

/// Builds (or loads) a member of `family` ("J1", "J2", "H1", ...).
///
/// # Safety
/// `wb` is a live handle, `family_name` a NUL-terminated string, `out_group` writable.
#[no_mangle]
pub unsafe extern "C" fn mcdw_group_new(
    wb: *const McdwWorkbench,
    family_name: *const c_char,
    p: u64,
    m: u32,
    ell: i64,
    out_group: *mut *mut McdwGroup,
) -> McdwStatus {
    guard(|| {
        let wb = handle(wb, "wb")?;
        let slot = out(out_group, "out")?;
        let params = FamilyParams::new(family(text(family_name, "family")?)?, p, m, ell)?;
        let g = wb.0.group(&params)?;
        *slot = Box::into_raw(Box::new(McdwGroup(g)));
        Ok(())
    })
}

/// Builds the Macdonald group G(beta).
///
/// # Safety
/// `wb` is a live handle and `out_group` writable.
#[no_mangle]
pub unsafe extern "C" fn mcdw_group_macdonald(wb: *const McdwWorkbench, beta: i64, out_group: *mut *mut McdwGroup) -> McdwStatus {
    guard(|| {
        let wb = handle(wb, "wb")?;
        let slot = out(out_group, "out")?;
        let g = wb.0.group(&FamilyParams::macdonald(beta))?;
        *slot = Box::into_raw(Box::new(McdwGroup(g)));
        Ok(())
    })
}

/// # Safety
/// `g` is NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mcdw_group_free(g: *mut McdwGroup) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `g` is a live handle and `order` writable.
#[no_mangle]
pub unsafe extern "C" fn mcdw_group_order(g: *const McdwGroup, order: *mut u64) -> McdwStatus {
    guard(|| {
        let g = handle(g, "group")?;
        *out(order, "order")? = g.0.group.order() as u64;
        Ok(())
    })
}

/// # Safety
/// `g` is a live handle and `class` writable.
#[no_mangle]
pub unsafe extern "C" fn mcdw_group_class(g: *const McdwGroup, class: *mut u32) -> McdwStatus {
    guard(|| {
        let g = handle(g, "group")?;
        let slot = out(class, "class")?;
        *slot = g.0.group.nilpotency_class()? as u32;
        Ok(())
    })
}

/// Upper central series as JSON (`{"terms": [...], "class": n}`).
///
/// # Safety
/// `g` is a live handle and `json` writable.
#[no_mangle]
pub unsafe extern "C" fn mcdw_group_series_json(g: *const McdwGroup, json: *mut *mut c_char) -> McdwStatus {
    guard(|| {
        let g = handle(g, "group")?;
        let slot = out(json, "json")?;
        let (_, report) = g.0.group.upper_central_series()?;
        let s = serde_json::to_string(&report).map_err(|e| Fail(McdwStatus::Failed, e.to_string()))?;
        *slot = c_string(s)?;
        Ok(())
    })
}

/// Decides whether two members of one family are isomorphic. `evidence`
/// may be NULL; otherwise it receives the certificate or witness as JSON.
///
/// # Safety
/// `wb` is a live handle, `family_name` a NUL-terminated string, `verdict`
/// writable and `evidence` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn mcdw_iso(
    wb: *const McdwWorkbench,
    family_name: *const c_char,
    p: u64,
    m: u32,
    ell_a: i64,
    ell_b: i64,
    verdict: *mut McdwVerdict,
    evidence: *mut *mut c_char,
) -> McdwStatus {
    guard(|| {
        let wb = handle(wb, "wb")?;
        let slot = out(verdict, "verdict")?;
        let f = family(text(family_name, "family")?)?;
        let a = FamilyParams::new(f, p, m, ell_a)?;
        let b = FamilyParams::new(f, p, m, ell_b)?;
        let (v, ev) = match decide_isomorphism(&wb.0, &a, &b)? {
            IsoVerdict::Isomorphic(e) => (McdwVerdict::Isomorphic, e),
            IsoVerdict::NotIsomorphic(e) => (McdwVerdict::NotIsomorphic, e),
            IsoVerdict::Undecided(e) => (McdwVerdict::Undecided, e),
        };
        if !evidence.is_null() {
            *evidence = c_string(ev.to_string())?;
        }
        *slot = v;
        Ok(())
    })
}

/// Runs the default check suite and returns the report bundle as JSON.
/// `all_passed` may be NULL.
///
/// # Safety
/// `wb` is a live handle, `json` writable, `all_passed` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn mcdw_verify_default(wb: *const McdwWorkbench, json: *mut *mut c_char, all_passed: *mut bool) -> McdwStatus {
    guard(|| {
        let wb = handle(wb, "wb")?;
        let slot = out(json, "json")?;
        let reports = default_suite(&wb.0);
        if !all_passed.is_null() {
            *all_passed = reports.iter().all(|r| r.passed());
        }
        *slot = c_string(bundle_json(&reports))?;
        Ok(())
    })
}

/// # Safety
/// `s` is NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mcdw_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
