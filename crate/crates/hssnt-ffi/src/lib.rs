//! C ABI for the hssnt library: opaque space handles, JSON string results
//! and integer error codes, so other languages can bind without touching
//! Rust types.
//!
//! Error codes mirror the CLI exit codes: 0 success (and every verify
//! check passed), 1 a verification check failed (the report is still
//! written), 2 bad input, 3 model construction failure, 4 point outside
//! the requested domain, 5 null pointer or invalid UTF-8.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};

use hssnt::cli;
use hssnt::error::HssntError;
use hssnt::oddmap;
use hssnt::{HermitianSpace, SpaceSpec};

/// Opaque handle to a fully built Hermitian symmetric space model.
pub struct HssntSpace {
    inner: HermitianSpace,
}

pub const HSSNT_OK: i32 = 0;
pub const HSSNT_CHECK_FAILED: i32 = 1;
pub const HSSNT_BAD_INPUT: i32 = 2;
pub const HSSNT_MODEL_ERROR: i32 = 3;
pub const HSSNT_DOMAIN_ERROR: i32 = 4;
pub const HSSNT_NULL_POINTER: i32 = 5;

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn code_of(err: &HssntError) -> i32 {
    set_last_error(&err.to_string());
    cli::exit_code_for(err)
}

/// # Safety
/// `ptr` must be a valid NUL-terminated C string.
unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, i32> {
    if ptr.is_null() {
        set_last_error("null string pointer");
        return Err(HSSNT_NULL_POINTER);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_last_error("string is not valid UTF-8");
        HSSNT_NULL_POINTER
    })
}

fn write_string(out: *mut *mut c_char, text: String) -> i32 {
    if out.is_null() {
        set_last_error("null output pointer");
        return HSSNT_NULL_POINTER;
    }
    match CString::new(text) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            HSSNT_OK
        }
        Err(_) => {
            set_last_error("output contained an interior NUL");
            HSSNT_MODEL_ERROR
        }
    }
}

/// Builds a space from a spec string such as "su:2,2" or "sp:3".
/// On success writes an owned handle into `out`; free it with
/// `hssnt_space_free`.
///
/// # Safety
/// `spec` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hssnt_space_new(spec: *const c_char, out: *mut *mut HssntSpace) -> i32 {
    let spec_str = match read_str(spec) {
        Ok(s) => s,
        Err(code) => return code,
    };
    if out.is_null() {
        set_last_error("null output pointer");
        return HSSNT_NULL_POINTER;
    }
    let parsed = match SpaceSpec::parse(spec_str) {
        Ok(p) => p,
        Err(e) => return code_of(&e),
    };
    match HermitianSpace::build(parsed) {
        Ok(space) => {
            *out = Box::into_raw(Box::new(HssntSpace { inner: space }));
            HSSNT_OK
        }
        Err(e) => code_of(&e),
    }
}

/// Frees a handle returned by `hssnt_space_new`. Null is ignored.
///
/// # Safety
/// `ptr` must be null or a handle produced by `hssnt_space_new`, not yet
/// freed.
#[no_mangle]
pub unsafe extern "C" fn hssnt_space_free(ptr: *mut HssntSpace) {
    if !ptr.is_null() {
        drop(Box::from_raw(ptr));
    }
}

/// Writes the description report (rank, type, multiplicities, C,
/// dimensions) as a JSON string; free it with `hssnt_string_free`.
///
/// # Safety
/// `space` must be a live handle; `out_json` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hssnt_describe(
    space: *const HssntSpace,
    out_json: *mut *mut c_char,
) -> i32 {
    let Some(space) = space.as_ref() else {
        set_last_error("null space handle");
        return HSSNT_NULL_POINTER;
    };
    let rep = cli::describe_space(&space.inner);
    write_string(out_json, hssnt::report::to_json(&rep))
}

/// Evaluates the strongly diagonal realization for the named builtin odd
/// function at a point given either by rank-many coefficients in the
/// normalized root-vector frame or by dim_p-many p-coordinates.
///
/// # Safety
/// `space` must be a live handle, `eta` a valid string, `coeffs` must
/// point to `len` doubles, and `out_json` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hssnt_realize(
    space: *const HssntSpace,
    eta: *const c_char,
    coeffs: *const f64,
    len: usize,
    out_json: *mut *mut c_char,
) -> i32 {
    let Some(space) = space.as_ref() else {
        set_last_error("null space handle");
        return HSSNT_NULL_POINTER;
    };
    let eta_name = match read_str(eta) {
        Ok(s) => s,
        Err(code) => return code,
    };
    if coeffs.is_null() && len > 0 {
        set_last_error("null coefficient pointer");
        return HSSNT_NULL_POINTER;
    }
    let point = std::slice::from_raw_parts(coeffs, len);
    let eta = match oddmap::builtin_odd(eta_name) {
        Ok(e) => e,
        Err(e) => return code_of(&e),
    };
    match cli::realize_on(&space.inner, &eta, point) {
        Ok(rep) => write_string(out_json, hssnt::report::to_json(&rep)),
        Err(e) => code_of(&e),
    }
}

/// Runs a verification suite ("roots", "kahler", "polydisk", "holo",
/// "symp", "dual", "bergman", "duality", "tgeo" or "all") and writes the
/// JSON report. Passing tol <= 0 keeps the per-check defaults; `eta` may
/// be null to use the suite default map. Returns 1 (with the report
/// still written) when a check fails.
///
/// # Safety
/// `space` must be a live handle, `suite` a valid string, `eta` null or a
/// valid string, `out_json` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hssnt_verify(
    space: *const HssntSpace,
    suite: *const c_char,
    seed: u64,
    tol: f64,
    samples: u32,
    eta: *const c_char,
    out_json: *mut *mut c_char,
) -> i32 {
    let Some(space) = space.as_ref() else {
        set_last_error("null space handle");
        return HSSNT_NULL_POINTER;
    };
    let suite_name = match read_str(suite) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let eta_name = if eta.is_null() {
        None
    } else {
        match read_str(eta) {
            Ok(s) => Some(s),
            Err(code) => return code,
        }
    };
    let tol_override = if tol > 0.0 { Some(tol) } else { None };
    match cli::verify_on(
        &space.inner,
        suite_name,
        seed,
        tol_override,
        samples as usize,
        eta_name,
    ) {
        Ok(rep) => {
            let pass = rep.pass;
            let code = write_string(out_json, hssnt::report::to_json(&rep));
            if code != HSSNT_OK {
                code
            } else if pass {
                HSSNT_OK
            } else {
                set_last_error("one or more verification checks failed");
                HSSNT_CHECK_FAILED
            }
        }
        Err(e) => code_of(&e),
    }
}

/// Frees a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hssnt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Copies the most recent error message on this thread into `buf`
/// (truncated, always NUL-terminated). Returns the full message length,
/// or 0 if there is no pending error.
///
/// # Safety
/// `buf` must point to `len` writable bytes (or be null to query the
/// length only).
#[no_mangle]
pub unsafe extern "C" fn hssnt_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let borrow = e.borrow();
        let Some(msg) = borrow.as_ref() else {
            return 0;
        };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr(), buf as *mut u8, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Version string of the underlying library (static storage).
#[no_mangle]
pub extern "C" fn hssnt_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr() as *const c_char
}

#[cfg(test)]
mod tests {
    use super::*;

    fn new_space(spec: &str) -> *mut HssntSpace {
        let c = CString::new(spec).unwrap();
        let mut out: *mut HssntSpace = std::ptr::null_mut();
        let code = unsafe { hssnt_space_new(c.as_ptr(), &mut out) };
        assert_eq!(code, HSSNT_OK);
        out
    }

    fn take_string(ptr: *mut c_char) -> String {
        let s = unsafe { CStr::from_ptr(ptr) }.to_str().unwrap().to_owned();
        unsafe { hssnt_string_free(ptr) };
        s
    }

    #[test]
    fn describe_through_the_abi() {
        let sp = new_space("su:2,2");
        let mut json: *mut c_char = std::ptr::null_mut();
        let code = unsafe { hssnt_describe(sp, &mut json) };
        assert_eq!(code, HSSNT_OK);
        let text = take_string(json);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["rank"], 2);
        assert_eq!(v["type"], "C2");
        unsafe { hssnt_space_free(sp) };
    }

    #[test]
    fn bad_spec_sets_error() {
        let c = CString::new("so:4").unwrap();
        let mut out: *mut HssntSpace = std::ptr::null_mut();
        let code = unsafe { hssnt_space_new(c.as_ptr(), &mut out) };
        assert_eq!(code, HSSNT_BAD_INPUT);
        let mut buf = vec![0 as c_char; 256];
        let n = unsafe { hssnt_last_error_message(buf.as_mut_ptr(), buf.len()) };
        assert!(n > 0);
        let msg = unsafe { CStr::from_ptr(buf.as_ptr()) }.to_str().unwrap();
        assert!(msg.contains("unknown family"), "{msg}");
    }

    #[test]
    fn realize_axis_point() {
        let sp = new_space("su:2,2");
        let eta = CString::new("tanh").unwrap();
        let point = [0.5f64, 0.0];
        let mut json: *mut c_char = std::ptr::null_mut();
        let code =
            unsafe { hssnt_realize(sp, eta.as_ptr(), point.as_ptr(), point.len(), &mut json) };
        assert_eq!(code, HSSNT_OK);
        let v: serde_json::Value = serde_json::from_str(&take_string(json)).unwrap();
        let out = v["output"]["a_coeffs"][0].as_f64().unwrap();
        assert!((out - 0.5f64.tanh()).abs() < 1e-10);
        unsafe { hssnt_space_free(sp) };
    }

    #[test]
    fn realize_domain_error() {
        let sp = new_space("su:1,1");
        let eta = CString::new("artanh").unwrap();
        let point = [1.5f64];
        let mut json: *mut c_char = std::ptr::null_mut();
        let code =
            unsafe { hssnt_realize(sp, eta.as_ptr(), point.as_ptr(), point.len(), &mut json) };
        assert_eq!(code, HSSNT_DOMAIN_ERROR);
        unsafe { hssnt_space_free(sp) };
    }

    #[test]
    fn verify_pass_and_fail_codes() {
        let sp = new_space("su:1,2");
        let suite = CString::new("bergman").unwrap();
        let mut json: *mut c_char = std::ptr::null_mut();
        let code =
            unsafe { hssnt_verify(sp, suite.as_ptr(), 7, -1.0, 10, std::ptr::null(), &mut json) };
        assert_eq!(code, HSSNT_OK);
        let v: serde_json::Value = serde_json::from_str(&take_string(json)).unwrap();
        assert_eq!(v["pass"], true);
        // tanh is not symplectic: expect code 1 with a report
        let suite = CString::new("symp").unwrap();
        let eta = CString::new("tanh").unwrap();
        let mut json: *mut c_char = std::ptr::null_mut();
        let code =
            unsafe { hssnt_verify(sp, suite.as_ptr(), 7, -1.0, 6, eta.as_ptr(), &mut json) };
        assert_eq!(code, HSSNT_CHECK_FAILED);
        let v: serde_json::Value = serde_json::from_str(&take_string(json)).unwrap();
        assert_eq!(v["pass"], false);
        unsafe { hssnt_space_free(sp) };
    }

    #[test]
    fn null_safety() {
        let mut json: *mut c_char = std::ptr::null_mut();
        let code = unsafe { hssnt_describe(std::ptr::null(), &mut json) };
        assert_eq!(code, HSSNT_NULL_POINTER);
        unsafe {
            hssnt_space_free(std::ptr::null_mut());
            hssnt_string_free(std::ptr::null_mut());
        }
        let v = unsafe { CStr::from_ptr(hssnt_version()) };
        assert!(!v.to_str().unwrap().is_empty());
    }
}
