//! C interface to kmkit. Objects are opaque handles released with their
//! `*_free` function; strings returned by the library are released with
//! `kmkit_string_free`. Every call returns a `KmkitStatus`, and the message
//! of the last failure on the calling thread is available from
//! `kmkit_last_error`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use kmkit::adrep::{self, Representation};
use kmkit::cosheaf::{self, ComplexDoc};
use kmkit::exactalg::{FiniteField, Ring};
use kmkit::gcm::{GcmDocument, RootDatum};
use kmkit::kmalg::{self, GradedLieAlgebra};
use kmkit::{weyl, Error};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KmkitStatus {
    Ok = 0,
    Invalid = 1,
    WindowExceeded = 2,
    Violation = 3,
    Unsupported = 4,
    IntegralDefect = 5,
    Internal = 6,
}

/// A root datum built from a GCM document.
pub struct KmkitDatum(RootDatum);

/// A truncated Kac-Moody algebra over some ring.
pub struct KmkitAlgebra(GradedLieAlgebra);

/// A finite field F_{p^m}; elements are encoded as integers in `0..p^m`.
pub struct KmkitField(FiniteField);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> KmkitStatus {
    match e {
        Error::Invalid(_) | Error::Gcm(_) => KmkitStatus::Invalid,
        Error::WindowExceeded(_) => KmkitStatus::WindowExceeded,
        Error::Violation(_) => KmkitStatus::Violation,
        Error::Unsupported(_) => KmkitStatus::Unsupported,
        Error::IntegralDefect(_) => KmkitStatus::IntegralDefect,
    }
}

/// Runs `f`, turning errors and panics into a status plus the last-error text.
fn guard(f: impl FnOnce() -> Result<(), Error>) -> KmkitStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            KmkitStatus::Ok
        }
        Ok(Err(e)) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal error: panic inside kmkit");
            KmkitStatus::Internal
        }
    }
}

fn null(what: &str) -> Error {
    Error::Invalid(format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Error> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Error::Invalid(format!("{what} is not UTF-8")))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Error> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Error> {
    p.as_ref().ok_or_else(|| null(what))
}

fn into_c_string(s: String) -> Result<*mut c_char, Error> {
    CString::new(s).map(CString::into_raw).map_err(|_| Error::Invalid("string contains NUL".into()))
}

/// Message of the last failed call on this thread, or "" after a success.
/// The pointer stays valid until the next kmkit call on the same thread.
#[no_mangle]
pub extern "C" fn kmkit_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn kmkit_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a root datum from a GCM document such as
/// `{"matrix": [[2,-1],[-1,2]], "variant": "minimal"}`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn kmkit_datum_from_json(json: *const c_char, out: *mut *mut KmkitDatum) -> KmkitStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let datum = GcmDocument::parse(str_arg(json, "json")?)?.datum()?;
        *out = Box::into_raw(Box::new(KmkitDatum(datum)));
        Ok(())
    })
}

/// # Safety
/// `d` must come from `kmkit_datum_from_json` and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn kmkit_datum_free(d: *mut KmkitDatum) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Number of simple roots.
///
/// # Safety
/// `d` must be a live datum handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn kmkit_datum_rank(d: *const KmkitDatum, out: *mut usize) -> KmkitStatus {
    guard(|| {
        *out_arg(out, "out")? = handle(d, "datum")?.0.n();
        Ok(())
    })
}

/// Number of positive real roots of height at most `height`.
///
/// # Safety
/// `d` must be a live datum handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn kmkit_real_root_count(d: *const KmkitDatum, height: i64, out: *mut usize) -> KmkitStatus {
    guard(|| {
        let d = handle(d, "datum")?;
        let out = out_arg(out, "out")?;
        if height < 1 {
            return Err(Error::Invalid("height window must be positive".into()));
        }
        *out = weyl::enumerate_real_roots(&d.0, height).len();
        Ok(())
    })
}

/// Truncated algebra of the datum up to `height` over the ring named by
/// `ring` ("Z", "Q", "F5", "F2^3").
///
/// # Safety
/// `d` must be a live datum handle, `ring` a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn kmkit_algebra_new(
    d: *const KmkitDatum,
    height: i64,
    ring: *const c_char,
    out: *mut *mut KmkitAlgebra,
) -> KmkitStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let d = handle(d, "datum")?;
        let ring = Ring::parse(str_arg(ring, "ring")?)?;
        let alg = kmalg::assemble_g(&d.0, height, &ring)?;
        *out = Box::into_raw(Box::new(KmkitAlgebra(alg)));
        Ok(())
    })
}

/// # Safety
/// `a` must come from `kmkit_algebra_new` and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn kmkit_algebra_free(a: *mut KmkitAlgebra) {
    if !a.is_null() {
        drop(Box::from_raw(a));
    }
}

/// # Safety
/// `a` must be a live algebra handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn kmkit_algebra_dim(a: *const KmkitAlgebra, out: *mut usize) -> KmkitStatus {
    guard(|| {
        *out_arg(out, "out")? = handle(a, "algebra")?.0.dim();
        Ok(())
    })
}

/// The algebra as a JSON document (basis, graded dimensions, brackets).
/// Release the result with `kmkit_string_free`.
///
/// # Safety
/// `a` must be a live algebra handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn kmkit_algebra_dump(a: *const KmkitAlgebra, out: *mut *mut c_char) -> KmkitStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let dump = handle(a, "algebra")?.0.dump();
        let text = serde_json::to_string(&dump).map_err(|e| Error::Invalid(e.to_string()))?;
        *out = into_c_string(text)?;
        Ok(())
    })
}

/// Whether the adjoint representation of a finite-type algebra over a field
/// of characteristic `p` is over-restricted.
///
/// # Safety
/// `a` must be a live algebra handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn kmkit_adjoint_over_restricted(a: *const KmkitAlgebra, p: u64, out: *mut bool) -> KmkitStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let rep = Representation::adjoint(&handle(a, "algebra")?.0)?;
        *out = adrep::is_over_restricted(&rep, p)?.holds;
        Ok(())
    })
}

/// The field F_{p^m} with the smallest monic irreducible modulus.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kmkit_field_new(p: u64, m: u32, out: *mut *mut KmkitField) -> KmkitStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        *out = Box::into_raw(Box::new(KmkitField(FiniteField::new(p, m)?)));
        Ok(())
    })
}

/// # Safety
/// `f` must come from `kmkit_field_new` and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn kmkit_field_free(f: *mut KmkitField) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// # Safety
/// `f` must be a live field handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn kmkit_field_order(f: *const KmkitField, out: *mut u64) -> KmkitStatus {
    guard(|| {
        *out_arg(out, "out")? = handle(f, "field")?.0.order();
        Ok(())
    })
}

fn element(f: &FiniteField, a: u64) -> Result<u64, Error> {
    if a < f.order() {
        Ok(a)
    } else {
        Err(Error::Invalid(format!("{a} does not encode an element of a field of order {}", f.order())))
    }
}

/// # Safety
/// `f` must be a live field handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn kmkit_field_add(f: *const KmkitField, a: u64, b: u64, out: *mut u64) -> KmkitStatus {
    guard(|| {
        let f = &handle(f, "field")?.0;
        *out_arg(out, "out")? = f.add(element(f, a)?, element(f, b)?);
        Ok(())
    })
}

/// # Safety
/// `f` must be a live field handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn kmkit_field_mul(f: *const KmkitField, a: u64, b: u64, out: *mut u64) -> KmkitStatus {
    guard(|| {
        let f = &handle(f, "field")?.0;
        *out_arg(out, "out")? = f.mul(element(f, a)?, element(f, b)?);
        Ok(())
    })
}

/// Multiplicative inverse; zero has none and yields `Invalid`.
///
/// # Safety
/// `f` must be a live field handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn kmkit_field_inv(f: *const KmkitField, a: u64, out: *mut u64) -> KmkitStatus {
    guard(|| {
        let f = &handle(f, "field")?.0;
        let out = out_arg(out, "out")?;
        *out = f.inv(element(f, a)?).ok_or_else(|| Error::Invalid("zero has no inverse".into()))?;
        Ok(())
    })
}

/// Homology of a simplicial complex document with trivial rank-one
/// coefficients in `ring`, as a JSON report.
///
/// # Safety
/// `complex_json` and `ring` must be NUL-terminated strings and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn kmkit_homology_json(
    complex_json: *const c_char,
    ring: *const c_char,
    out: *mut *mut c_char,
) -> KmkitStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let doc: ComplexDoc = serde_json::from_str(str_arg(complex_json, "complex_json")?)
            .map_err(|e| Error::Invalid(format!("complex document: {e}")))?;
        let cx = doc.build()?;
        let ring = Ring::parse(str_arg(ring, "ring")?)?;
        let h = cosheaf::homology(&cosheaf::chain_complex(&cosheaf::trivial_cosheaf(&cx, &ring, 1)))?;
        *out = into_c_string(serde_json::to_string(&h).map_err(|e| Error::Invalid(e.to_string()))?)?;
        Ok(())
    })
}

/// Runs a command line (without the program name) exactly as the `kmkit`
/// binary would. The report is stored in `report` and the process exit code
/// in `exit_code`; the status only reflects failures of the call itself.
///
/// # Safety
/// `argv` must point to `argc` NUL-terminated strings; `report` and
/// `exit_code` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kmkit_run(
    argv: *const *const c_char,
    argc: usize,
    report: *mut *mut c_char,
    exit_code: *mut i32,
) -> KmkitStatus {
    guard(|| {
        let report = out_arg(report, "report")?;
        *report = ptr::null_mut();
        let exit_code = out_arg(exit_code, "exit_code")?;
        if argv.is_null() && argc > 0 {
            return Err(null("argv"));
        }
        let mut args = vec!["kmkit".to_string()];
        for i in 0..argc {
            args.push(str_arg(*argv.add(i), "argument")?.to_string());
        }
        let mut out = Vec::new();
        let mut err = Vec::new();
        *exit_code = kmkit::cli::run(args, &mut out, &mut err);
        let text = String::from_utf8(out).map_err(|_| Error::Invalid("report is not UTF-8".into()))?;
        *report = into_c_string(text)?;
        Ok(())
    })
}
