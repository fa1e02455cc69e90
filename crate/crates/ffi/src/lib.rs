//! C ABI for `renyi-core`.
//!
//! Pairs and curves cross the boundary as opaque heap handles created by a
//! `*_from_*`/`*_build` function and released with the matching `*_free`.
//! Every fallible function returns a [`RenyiStatus`] and writes its result
//! through an out-pointer; on failure [`renyi_last_error_message`] describes
//! the problem. Orders are plain doubles, with `INFINITY` for order `∞`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use renyi_core::lattice::{join, meet};
use renyi_core::lorenz::{build_curve, compare, divergence_from_curve};
use renyi_core::renyi::{self, power_divergence};
use renyi_core::{DensityPair, Error, LorenzCurve, Order, OrderingRelation};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenyiStatus {
    Ok = 0,
    NullPointer = 1,
    /// An order, evaluation point or length was out of range.
    InvalidArgument = 2,
    /// Weights failed validation (negative, non-finite, not normalized, ...).
    InvalidInput = 3,
    /// Text was not valid UTF-8 or not valid JSON for the expected shape.
    ParseError = 4,
    /// A Rust panic was caught at the boundary.
    Internal = 5,
}

/// Markov ordering of two curves; `Less` means the first is below the second
/// in the lattice order (its curve lies above).
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenyiOrdering {
    Equal = 0,
    Less = 1,
    Greater = 2,
    Incomparable = 3,
}

impl From<OrderingRelation> for RenyiOrdering {
    fn from(r: OrderingRelation) -> Self {
        match r {
            OrderingRelation::Equal => Self::Equal,
            OrderingRelation::Less => Self::Less,
            OrderingRelation::Greater => Self::Greater,
            OrderingRelation::Incomparable => Self::Incomparable,
        }
    }
}

/// Opaque pair of measures `(P, Q)` on a labelled finite alphabet.
pub struct RenyiPair(DensityPair);

/// Opaque Lorenz curve.
pub struct RenyiCurve(LorenzCurve);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: RenyiStatus, message: impl Into<String>) -> RenyiStatus {
    set_error(message.into());
    status
}

fn core_status(err: &Error) -> RenyiStatus {
    match err {
        Error::InvalidOrder(_) | Error::UnsupportedOrder(_) | Error::OutOfRange(_) | Error::ZeroAtoms => {
            RenyiStatus::InvalidArgument
        }
        _ => RenyiStatus::InvalidInput,
    }
}

fn from_core(err: Error) -> RenyiStatus {
    fail(core_status(&err), err.to_string())
}

/// Runs `f`, turning a panic into [`RenyiStatus::Internal`].
fn guard(f: impl FnOnce() -> RenyiStatus) -> RenyiStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => fail(RenyiStatus::Internal, "internal panic"),
    }
}

fn order(alpha: f64) -> Result<Order, RenyiStatus> {
    Order::new(alpha).map_err(from_core)
}

/// Writes `value` through `out`, boxing it.
///
/// # Safety
/// `out` must be valid for writes.
unsafe fn emit<T>(out: *mut *mut T, value: T) -> RenyiStatus {
    *out = Box::into_raw(Box::new(value));
    RenyiStatus::Ok
}

/// Message for the most recent failure on this thread, or null.
///
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn renyi_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds a pair from two aligned arrays of length `n`; atoms are labelled `x0`, `x1`, ...
///
/// # Safety
/// `p` and `q` must point to `n` readable doubles; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn renyi_pair_from_arrays(p: *const f64, q: *const f64, n: usize, out: *mut *mut RenyiPair) -> RenyiStatus {
    guard(|| {
        if p.is_null() || q.is_null() || out.is_null() {
            return fail(RenyiStatus::NullPointer, "null pointer argument");
        }
        let (p, q) = (std::slice::from_raw_parts(p, n), std::slice::from_raw_parts(q, n));
        match DensityPair::from_vectors(p, q) {
            Ok(pair) => emit(out, RenyiPair(pair)),
            Err(e) => from_core(e),
        }
    })
}

/// Parses a pair from `{"atoms": [{"label": ..., "p": ..., "q": ...}, ...]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn renyi_pair_from_json(json: *const c_char, out: *mut *mut RenyiPair) -> RenyiStatus {
    guard(|| {
        if json.is_null() || out.is_null() {
            return fail(RenyiStatus::NullPointer, "null pointer argument");
        }
        let text = match CStr::from_ptr(json).to_str() {
            Ok(t) => t,
            Err(e) => return fail(RenyiStatus::ParseError, e.to_string()),
        };
        match serde_json::from_str::<DensityPair>(text) {
            Ok(pair) => emit(out, RenyiPair(pair)),
            Err(e) => fail(RenyiStatus::ParseError, e.to_string()),
        }
    })
}

/// Releases a pair; null is ignored.
///
/// # Safety
/// `pair` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn renyi_pair_free(pair: *mut RenyiPair) {
    if !pair.is_null() {
        drop(Box::from_raw(pair));
    }
}

/// Number of atoms kept in the pair.
///
/// # Safety
/// `pair` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn renyi_pair_len(pair: *const RenyiPair, out: *mut usize) -> RenyiStatus {
    if pair.is_null() || out.is_null() {
        return fail(RenyiStatus::NullPointer, "null pointer argument");
    }
    *out = (*pair).0.len();
    RenyiStatus::Ok
}

/// `D_α(P‖Q)` in nats; may be `INFINITY`.
///
/// # Safety
/// `pair` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn renyi_divergence(pair: *const RenyiPair, alpha: f64, out: *mut f64) -> RenyiStatus {
    guard(|| {
        if pair.is_null() || out.is_null() {
            return fail(RenyiStatus::NullPointer, "null pointer argument");
        }
        match order(alpha) {
            Ok(a) => {
                *out = renyi::renyi_divergence(&(*pair).0, a).value;
                RenyiStatus::Ok
            }
            Err(status) => status,
        }
    })
}

/// Power divergence `d_α` for finite `α > 0`, `α ≠ 1`.
///
/// # Safety
/// `pair` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn renyi_power_divergence(pair: *const RenyiPair, alpha: f64, out: *mut f64) -> RenyiStatus {
    guard(|| {
        if pair.is_null() || out.is_null() {
            return fail(RenyiStatus::NullPointer, "null pointer argument");
        }
        let value = order(alpha).and_then(|a| power_divergence(&(*pair).0, a).map_err(from_core));
        match value {
            Ok(v) => {
                *out = v;
                RenyiStatus::Ok
            }
            Err(status) => status,
        }
    })
}

/// Lorenz curve of a pair.
///
/// # Safety
/// `pair` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn renyi_curve_build(pair: *const RenyiPair, out: *mut *mut RenyiCurve) -> RenyiStatus {
    guard(|| {
        if pair.is_null() || out.is_null() {
            return fail(RenyiStatus::NullPointer, "null pointer argument");
        }
        emit(out, RenyiCurve(build_curve(&(*pair).0)))
    })
}

/// Releases a curve; null is ignored.
///
/// # Safety
/// `curve` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn renyi_curve_free(curve: *mut RenyiCurve) {
    if !curve.is_null() {
        drop(Box::from_raw(curve));
    }
}

unsafe fn binary(
    a: *const RenyiCurve,
    b: *const RenyiCurve,
    out: *mut *mut RenyiCurve,
    op: fn(&LorenzCurve, &LorenzCurve) -> LorenzCurve,
) -> RenyiStatus {
    guard(|| {
        if a.is_null() || b.is_null() || out.is_null() {
            return fail(RenyiStatus::NullPointer, "null pointer argument");
        }
        emit(out, RenyiCurve(op(&(*a).0, &(*b).0)))
    })
}

/// Pointwise maximum of two curves (greatest lower bound).
///
/// # Safety
/// `a` and `b` must be live handles; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn renyi_curve_meet(a: *const RenyiCurve, b: *const RenyiCurve, out: *mut *mut RenyiCurve) -> RenyiStatus {
    binary(a, b, out, meet)
}

/// Convex envelope of the pointwise minimum (least upper bound).
///
/// # Safety
/// `a` and `b` must be live handles; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn renyi_curve_join(a: *const RenyiCurve, b: *const RenyiCurve, out: *mut *mut RenyiCurve) -> RenyiStatus {
    binary(a, b, out, join)
}

/// # Safety
/// `a` and `b` must be live handles; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn renyi_curve_compare(a: *const RenyiCurve, b: *const RenyiCurve, out: *mut RenyiOrdering) -> RenyiStatus {
    if a.is_null() || b.is_null() || out.is_null() {
        return fail(RenyiStatus::NullPointer, "null pointer argument");
    }
    *out = compare(&(*a).0, &(*b).0).into();
    RenyiStatus::Ok
}

/// `L(u)` for `u ∈ [0, 1]`.
///
/// # Safety
/// `curve` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn renyi_curve_evaluate(curve: *const RenyiCurve, u: f64, out: *mut f64) -> RenyiStatus {
    if curve.is_null() || out.is_null() {
        return fail(RenyiStatus::NullPointer, "null pointer argument");
    }
    match (*curve).0.evaluate(u) {
        Ok(v) => {
            *out = v;
            RenyiStatus::Ok
        }
        Err(e) => from_core(e),
    }
}

/// Singular P-mass of the curve, `1 − L(1)`.
///
/// # Safety
/// `curve` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn renyi_curve_singular_mass(curve: *const RenyiCurve, out: *mut f64) -> RenyiStatus {
    if curve.is_null() || out.is_null() {
        return fail(RenyiStatus::NullPointer, "null pointer argument");
    }
    *out = (*curve).0.singular_p();
    RenyiStatus::Ok
}

/// `D_α` of any pair with this curve.
///
/// # Safety
/// `curve` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn renyi_curve_divergence(curve: *const RenyiCurve, alpha: f64, out: *mut f64) -> RenyiStatus {
    guard(|| {
        if curve.is_null() || out.is_null() {
            return fail(RenyiStatus::NullPointer, "null pointer argument");
        }
        match order(alpha) {
            Ok(a) => {
                *out = divergence_from_curve(&(*curve).0, a).value;
                RenyiStatus::Ok
            }
            Err(status) => status,
        }
    })
}
