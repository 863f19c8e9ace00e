//! C ABI for `qeuler`.
//!
//! Every entry point returns a [`QeStatus`]. Results come back through out
//! pointers; rationals cross the boundary as canonical `"p/q"` strings that
//! the caller releases with [`qe_string_free`]. On failure the message is
//! available from [`qe_last_error`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qeuler::euler::{
    classical_euler_poly, q_euler_number, q_euler_number_closed, q_euler_poly, verify_shift_identity,
    ClassicalEulerCache, QEulerCache,
};
use qeuler::padic::{convergence_profile, partial_sum, FSpec, PadicQ, PadicRing};
use qeuler::qcalc::{format_rational, parse_rational};
use qeuler::symmetry::{verify_invariance, InvarianceConfig, WeightVector, DEFAULT_BUDGET};
use qeuler::{BracketArg, Error, QSample};

/// Status codes shared by all entry points.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QeStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InadmissibleQ = 3,
    NonIntegralPower = 4,
    PadicDomain = 5,
    InvalidWeights = 6,
    BudgetExceeded = 7,
    Panic = 8,
}

/// Memo table of q-Euler numbers, shared across calls.
pub struct QeCache {
    inner: QEulerCache,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("NULs removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> QeStatus {
    match err {
        Error::InadmissibleQ(_) => QeStatus::InadmissibleQ,
        Error::NonIntegralPower { .. } | Error::ZeroBasePower | Error::ExponentOverflow(_) => {
            QeStatus::NonIntegralPower
        }
        Error::NotOddPrime(_)
        | Error::PrecisionTooLarge { .. }
        | Error::ZeroPrecision
        | Error::NotPadicInteger { .. }
        | Error::RingMismatch { .. }
        | Error::NonUnitDivision(_)
        | Error::QNotNearOne { .. }
        | Error::TruncationTooLarge { .. } => QeStatus::PadicDomain,
        Error::EmptyWeights | Error::EvenWeight(_) | Error::NotAPermutation(..) => QeStatus::InvalidWeights,
        Error::BudgetExceeded { .. } => QeStatus::BudgetExceeded,
        Error::InvalidArgument(_) => QeStatus::InvalidArgument,
    }
}

enum Failure {
    Null(&'static str),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        Failure::Core(err)
    }
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> QeStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => QeStatus::Ok,
        Ok(Err(Failure::Null(what))) => {
            set_last_error(format!("{what} is null"));
            QeStatus::NullPointer
        }
        Ok(Err(Failure::Core(err))) => {
            set_last_error(err.to_string());
            status_of(&err)
        }
        Err(panic) => {
            let message = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            set_last_error(format!("internal error: {message}"));
            QeStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(ptr: *const c_char, what: &'static str) -> Result<&'a str, Failure> {
    if ptr.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| Failure::Core(Error::InvalidArgument(format!("{what} is not UTF-8"))))
}

unsafe fn read_q(ptr: *const c_char) -> Result<QSample, Failure> {
    Ok(QSample::new(parse_rational(read_str(ptr, "q")?)?)?)
}

unsafe fn write_string(out: *mut *mut c_char, text: String) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null("out"));
    }
    *out = CString::new(text).expect("no interior NUL").into_raw();
    Ok(())
}

unsafe fn cache_ref<'a>(cache: *const QeCache) -> Result<&'a QEulerCache, Failure> {
    cache.as_ref().map(|c| &c.inner).ok_or(Failure::Null("cache"))
}

/// Message for the most recent failure on this thread, or null. Valid until
/// the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qe_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

#[no_mangle]
pub extern "C" fn qe_cache_new() -> *mut QeCache {
    Box::into_raw(Box::new(QeCache { inner: QEulerCache::new() }))
}

/// # Safety
/// `cache` must come from [`qe_cache_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qe_cache_free(cache: *mut QeCache) {
    if !cache.is_null() {
        drop(Box::from_raw(cache));
    }
}

/// Number of recurrence evaluations stored in the cache.
///
/// # Safety
/// `cache` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn qe_cache_evaluations(cache: *const QeCache) -> usize {
    cache.as_ref().map_or(0, |c| c.inner.evaluations())
}

/// # Safety
/// `s` must come from this library, or be null.
#[no_mangle]
pub unsafe extern "C" fn qe_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// `E_{n, q^w}` by the recurrence.
///
/// # Safety
/// `cache` must be live, `q` a NUL-terminated string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qe_euler_number(
    cache: *const QeCache,
    n: u32,
    w: u64,
    q: *const c_char,
    out: *mut *mut c_char,
) -> QeStatus {
    guard(|| {
        let cache = cache_ref(cache)?;
        let q = read_q(q)?;
        if w == 0 {
            return Err(Error::ZeroBasePower.into());
        }
        write_string(out, format_rational(&q_euler_number(n as usize, w, &q, cache)))
    })
}

/// `E_{n, q^w}` from the closed form.
///
/// # Safety
/// `q` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qe_euler_number_closed(n: u32, w: u64, q: *const c_char, out: *mut *mut c_char) -> QeStatus {
    guard(|| {
        let q = read_q(q)?;
        if w == 0 {
            return Err(Error::ZeroBasePower.into());
        }
        write_string(out, format_rational(&q_euler_number_closed(n as usize, w, &q)))
    })
}

/// `E_{n, q^w}(x)`; `w * x` must be an integer.
///
/// # Safety
/// `cache` must be live, `x` and `q` NUL-terminated strings, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qe_euler_poly(
    cache: *const QeCache,
    n: u32,
    x: *const c_char,
    w: u64,
    q: *const c_char,
    out: *mut *mut c_char,
) -> QeStatus {
    guard(|| {
        let cache = cache_ref(cache)?;
        let x = BracketArg::new(parse_rational(read_str(x, "x")?)?, w)?;
        let q = read_q(q)?;
        write_string(out, format_rational(&q_euler_poly(n as usize, &x, &q, cache)))
    })
}

/// Classical Euler polynomial `E_n(x)`.
///
/// # Safety
/// `x` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qe_classical_euler_poly(n: u32, x: *const c_char, out: *mut *mut c_char) -> QeStatus {
    guard(|| {
        let x = parse_rational(read_str(x, "x")?)?;
        let mut cache = ClassicalEulerCache::new();
        write_string(out, format_rational(&classical_euler_poly(n as usize, &x, &mut cache)))
    })
}

/// Exact check of the shift identity for `E_{m,q}` and shift `n_shift ≥ 1`.
///
/// # Safety
/// `q` must be a NUL-terminated string and `holds` writable.
#[no_mangle]
pub unsafe extern "C" fn qe_shift_identity(m: u32, n_shift: u32, q: *const c_char, holds: *mut bool) -> QeStatus {
    guard(|| {
        let q = read_q(q)?;
        let result = verify_shift_identity(m as usize, n_shift, &q)?;
        let holds = holds.as_mut().ok_or(Failure::Null("holds"))?;
        *holds = result;
        Ok(())
    })
}

/// Truncated fermionic q-integral of `[y + shift]_q^degree` at level `N`,
/// with `q = 1 + p t`, as a residue modulo `p^precision`.
///
/// # Safety
/// `residue` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qe_padic_partial_sum(
    p: u64,
    precision: u32,
    level: u32,
    degree: u32,
    shift: u64,
    t: u64,
    residue: *mut u64,
) -> QeStatus {
    guard(|| {
        let ring = PadicRing::new(p, precision)?;
        let q = PadicQ::from_offset(ring, t)?;
        let value = partial_sum(ring, level, FSpec::new(degree, shift), q)?;
        let residue = residue.as_mut().ok_or(Failure::Null("residue"))?;
        *residue = value.residue();
        Ok(())
    })
}

/// Writes `v_1..=v_{max_level}` of the convergence profile into
/// `valuations`, which must hold `max_level` entries.
///
/// # Safety
/// `valuations` must point to `max_level` writable `u32`s.
#[no_mangle]
pub unsafe extern "C" fn qe_padic_profile(
    p: u64,
    precision: u32,
    degree: u32,
    shift: u64,
    t: u64,
    max_level: u32,
    valuations: *mut u32,
) -> QeStatus {
    guard(|| {
        if valuations.is_null() {
            return Err(Failure::Null("valuations"));
        }
        let ring = PadicRing::new(p, precision)?;
        let q = PadicQ::from_offset(ring, t)?;
        let profile = convergence_profile(ring, FSpec::new(degree, shift), q, max_level)?;
        let out = std::slice::from_raw_parts_mut(valuations, max_level as usize);
        for (slot, point) in out.iter_mut().zip(&profile) {
            *slot = point.valuation;
        }
        Ok(())
    })
}

/// Runs the invariance check for one weight vector and writes the JSON
/// report. `seed` may be null. With `certified` set, `q_count` is ignored.
///
/// # Safety
/// `cache` must be live, `weights` must point to `n_weights` values, `out`
/// and `passed` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qe_symmetry_report(
    cache: *const QeCache,
    weights: *const u64,
    n_weights: usize,
    m_max: u32,
    x: u64,
    q_count: u32,
    certified: bool,
    seed: *const u64,
    passed: *mut bool,
    out: *mut *mut c_char,
) -> QeStatus {
    guard(|| {
        let cache = cache_ref(cache)?;
        if weights.is_null() && n_weights > 0 {
            return Err(Failure::Null("weights"));
        }
        let slice = if n_weights == 0 { &[][..] } else { std::slice::from_raw_parts(weights, n_weights) };
        let wv = WeightVector::new(slice.to_vec())?;
        let config = if certified {
            InvarianceConfig::certified(wv, m_max as usize, x)
        } else {
            InvarianceConfig::sampled(wv, m_max as usize, x, q_count as usize)
        };
        let config = InvarianceConfig { budget: DEFAULT_BUDGET, ..config.with_seed(seed.as_ref().copied()) };
        let report = verify_invariance(&config, cache)?;
        let json = serde_json::to_string(&report).expect("report serializes");
        let passed = passed.as_mut().ok_or(Failure::Null("passed"))?;
        *passed = report.passed();
        write_string(out, json)
    })
}
