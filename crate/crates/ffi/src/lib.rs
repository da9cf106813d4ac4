//! C ABI over `thintails`.
//!
//! Every fallible call returns a [`TtStatus`] and writes its result through
//! an out-pointer. On failure the message is available from
//! [`tt_last_error`] on the same thread until the next failing call.
//! Handles are created by `*_new`/`*_parse` and released by `*_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use thintails::{special, Error, GammaMapSpec, GaussianSpec, GeneralizedSigmoid, InheritedSpec, StudentT};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TtStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Parse = 3,
    Unsupported = 4,
    Numeric = 5,
    InvalidUtf8 = 6,
    Panic = 7,
}

/// Response curve handle.
pub struct TtCurve {
    inner: GeneralizedSigmoid,
}

/// Student-t source handle.
pub struct TtStudentT {
    inner: StudentT,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: TtStatus, msg: impl Into<String>) -> TtStatus {
    set_error(msg.into());
    status
}

fn from_error(e: Error) -> TtStatus {
    let status = match e {
        Error::Domain(_) => TtStatus::Domain,
        Error::Parse(_) => TtStatus::Parse,
        Error::Unsupported(_) => TtStatus::Unsupported,
        Error::Numeric(_) => TtStatus::Numeric,
    };
    fail(status, e.to_string())
}

fn guard(f: impl FnOnce() -> TtStatus) -> TtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(TtStatus::Panic, "internal panic"),
    }
}

/// Writes `value` through `out` after null checks.
fn write<T>(out: *mut T, value: thintails::Result<T>) -> TtStatus {
    if out.is_null() {
        return fail(TtStatus::NullPointer, "output pointer is null");
    }
    match value {
        Ok(v) => {
            unsafe { out.write(v) };
            TtStatus::Ok
        }
        Err(e) => from_error(e),
    }
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, TtStatus> {
    p.as_ref().ok_or_else(|| fail(TtStatus::NullPointer, format!("{what} handle is null")))
}

/// Message of the last failing call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn tt_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn tt_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses `sigmoid:kl=<r>;a=<r>,b=<r>,c=<r>[;...]`.
///
/// # Safety
/// `spec` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tt_curve_parse(spec: *const c_char, out: *mut *mut TtCurve) -> TtStatus {
    guard(|| {
        if spec.is_null() || out.is_null() {
            return fail(TtStatus::NullPointer, "spec or output pointer is null");
        }
        let Ok(text) = CStr::from_ptr(spec).to_str() else {
            return fail(TtStatus::InvalidUtf8, "curve spec is not UTF-8");
        };
        match text.parse::<GeneralizedSigmoid>() {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(TtCurve { inner }));
                TtStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `curve` must come from [`tt_curve_parse`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tt_curve_free(curve: *mut TtCurve) {
    if !curve.is_null() {
        drop(Box::from_raw(curve));
    }
}

/// # Safety
/// `curve` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tt_curve_eval(curve: *const TtCurve, x: f64, out: *mut f64) -> TtStatus {
    guard(|| match handle(curve, "curve") {
        Ok(c) => write(out, c.inner.eval(x)),
        Err(s) => s,
    })
}

/// First (`order` 1) or second (`order` 2) derivative.
///
/// # Safety
/// `curve` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tt_curve_derivative(curve: *const TtCurve, x: f64, order: u32, out: *mut f64) -> TtStatus {
    guard(|| match handle(curve, "curve") {
        Ok(c) => write(out, c.inner.derivative(x, order)),
        Err(s) => s,
    })
}

/// Inverse of a single-term curve.
///
/// # Safety
/// `curve` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tt_curve_inverse(curve: *const TtCurve, y: f64, out: *mut f64) -> TtStatus {
    guard(|| match handle(curve, "curve") {
        Ok(c) => write(out, c.inner.inverse(y)),
        Err(s) => s,
    })
}

/// Closed range of values the curve attains over the real line.
///
/// # Safety
/// `curve` must be a live handle; `lo` and `hi` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tt_curve_attained_range(curve: *const TtCurve, lo: *mut f64, hi: *mut f64) -> TtStatus {
    guard(|| {
        let c = match handle(curve, "curve") {
            Ok(c) => c,
            Err(s) => return s,
        };
        if lo.is_null() || hi.is_null() {
            return fail(TtStatus::NullPointer, "output pointer is null");
        }
        let r = c.inner.attained_range();
        *lo = r.lo;
        *hi = r.hi;
        TtStatus::Ok
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tt_student_new(sigma: f64, alpha: f64, out: *mut *mut TtStudentT) -> TtStatus {
    guard(|| {
        if out.is_null() {
            return fail(TtStatus::NullPointer, "output pointer is null");
        }
        match StudentT::new(sigma, alpha) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(TtStudentT { inner }));
                TtStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `dist` must come from [`tt_student_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tt_student_free(dist: *mut TtStudentT) {
    if !dist.is_null() {
        drop(Box::from_raw(dist));
    }
}

/// # Safety
/// `dist` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tt_student_pdf(dist: *const TtStudentT, x: f64, out: *mut f64) -> TtStatus {
    guard(|| match handle(dist, "distribution") {
        Ok(d) => write(out, d.inner.pdf(x)),
        Err(s) => s,
    })
}

/// # Safety
/// `dist` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tt_student_cdf(dist: *const TtStudentT, x: f64, out: *mut f64) -> TtStatus {
    guard(|| match handle(dist, "distribution") {
        Ok(d) => write(out, d.inner.cdf(x)),
        Err(s) => s,
    })
}

/// # Safety
/// `dist` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tt_student_quantile(dist: *const TtStudentT, p: f64, out: *mut f64) -> TtStatus {
    guard(|| match handle(dist, "distribution") {
        Ok(d) => write(out, d.inner.quantile(p)),
        Err(s) => s,
    })
}

fn fill(buf: *mut f64, n: usize, values: thintails::Result<thintails::SampleBatch>) -> TtStatus {
    if buf.is_null() {
        return fail(TtStatus::NullPointer, "sample buffer is null");
    }
    match values {
        Ok(batch) => {
            unsafe { ptr::copy_nonoverlapping(batch.values.as_ptr(), buf, n) };
            TtStatus::Ok
        }
        Err(e) => from_error(e),
    }
}

/// Writes `n` draws into `buf`. The same seed gives the same values.
///
/// # Safety
/// `dist` must be a live handle; `buf` must hold `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn tt_student_sample(dist: *const TtStudentT, seed: u64, n: usize, buf: *mut f64) -> TtStatus {
    guard(|| match handle(dist, "distribution") {
        Ok(d) => fill(buf, n, d.inner.sample(seed, n)),
        Err(s) => s,
    })
}

unsafe fn inherited(curve: *const TtCurve, dist: *const TtStudentT) -> Result<InheritedSpec, TtStatus> {
    let c = handle(curve, "curve")?;
    let d = handle(dist, "distribution")?;
    Ok(InheritedSpec::new(c.inner.clone(), d.inner))
}

/// Density of the pushed-forward law at `y` (single-term curves).
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tt_inherited_pdf(
    curve: *const TtCurve,
    dist: *const TtStudentT,
    y: f64,
    out: *mut f64,
) -> TtStatus {
    guard(|| match inherited(curve, dist) {
        Ok(spec) => write(out, spec.pdf(y)),
        Err(s) => s,
    })
}

/// Kurtosis of the pushed-forward law by quadrature.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tt_inherited_kurtosis(curve: *const TtCurve, dist: *const TtStudentT, out: *mut f64) -> TtStatus {
    guard(|| match inherited(curve, dist) {
        Ok(spec) => write(out, spec.kurtosis()),
        Err(s) => s,
    })
}

/// Writes `n` draws of the pushed-forward law into `buf`.
///
/// # Safety
/// Handles must be live; `buf` must hold `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn tt_inherited_sample(
    curve: *const TtCurve,
    dist: *const TtStudentT,
    seed: u64,
    n: usize,
    buf: *mut f64,
) -> TtStatus {
    guard(|| match inherited(curve, dist) {
        Ok(spec) => fill(buf, n, spec.sample(seed, n)),
        Err(s) => s,
    })
}

/// Monotone map carrying `dist` onto the Gaussian with mean `m` and sd `s`.
///
/// # Safety
/// `dist` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tt_gamma_map(dist: *const TtStudentT, m: f64, s: f64, x: f64, out: *mut f64) -> TtStatus {
    guard(|| {
        let d = match handle(dist, "distribution") {
            Ok(d) => d,
            Err(s) => return s,
        };
        let target = match GaussianSpec::new(m, s) {
            Ok(t) => t,
            Err(e) => return from_error(e),
        };
        write(out, GammaMapSpec::new(d.inner, target).eval(x))
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tt_erfc(x: f64, out: *mut f64) -> TtStatus {
    guard(|| write(out, special::erfc(x)))
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tt_erfc_inv(p: f64, out: *mut f64) -> TtStatus {
    guard(|| write(out, special::erfc_inv(p)))
}

/// Euler beta function.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tt_beta(a: f64, b: f64, out: *mut f64) -> TtStatus {
    guard(|| write(out, special::beta_fn(a, b)))
}
