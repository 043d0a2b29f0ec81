//! C ABI for the q-calculus and q-order-statistics toolkit.
//!
//! Conventions:
//! - every function returns a [`QosStatus`]; results come back through out
//!   pointers, written only on `QOS_STATUS_OK`;
//! - parameter sets are opaque handles created with [`qos_params_new`] and
//!   released with [`qos_params_free`];
//! - a human-readable message for the last failure on the current thread is
//!   available from [`qos_last_error_message`] until the next failing call;
//! - stochastic entry points take an explicit 64-bit seed and are
//!   deterministic for a fixed seed.
//!
//! The header `include/qorderstats.h` is regenerated by the build script.

use std::cell::RefCell;
use std::ffi::{c_char, c_void, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qorderstats::error::QError;
use qorderstats::heine::{
    conditional_config_probability, conditional_density_value, heine_pmf, interval_arrival_prob,
    pmf_oracle_dp, simulate, HeineParams,
};
use qorderstats::param::QParam;
use qorderstats::qcore::{
    q_binomial, q_derivative, q_exponential, q_factorial, q_integrate, q_multinomial, q_number,
    q_shifted_factorial, PochhammerOrder, QBase,
};
use qorderstats::qorderstat::{
    support_check, unif_joint_full_constant, unif_joint_full_pdf, unif_joint_kr, unif_joint_minmax,
    unif_ord_cdf, unif_ord_pdf, JointKind, OrderStatSpec, OrderStatistic, QOrderedPoint, QUniform,
};
use qorderstats::suite::{run_all_checks, SuiteConfig};

/// Result of every C-ABI call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QosStatus {
    QosStatusOk = 0,
    QosStatusNullPointer = 1,
    QosStatusDomain = 2,
    QosStatusSize = 3,
    QosStatusNumeric = 4,
    QosStatusUnsupported = 5,
    QosStatusInsufficientAcceptance = 6,
    QosStatusPanic = 7,
}

/// Base selector for q-binomial/q-multinomial coefficients.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QosBase {
    QosBaseNormal = 0,
    QosBaseInverse = 1,
}

/// Univariate order-statistic selector; `k` rides alongside where needed.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QosStatistic {
    QosStatisticMax = 0,
    QosStatisticMin = 1,
    QosStatisticKth = 2,
}

/// Distribution vs density selector for the joint laws.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QosJointKind {
    QosJointCdf = 0,
    QosJointPdf = 1,
}

/// Scalar callback used by the q-derivative and q-integral entry points:
/// called with the evaluation point and the caller's context pointer.
pub type QosRealFn = Option<unsafe extern "C" fn(x: f64, user: *mut c_void) -> f64>;

/// Opaque deformation-parameter handle.
pub struct QosParams {
    inner: QParam,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").expect("empty"));
}

fn set_error(msg: &str) {
    let sanitized: String = msg.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).expect("no interior NUL");
    });
}

fn status_of(err: &QError) -> QosStatus {
    match err {
        QError::Domain(_) => QosStatus::QosStatusDomain,
        QError::Size(_) => QosStatus::QosStatusSize,
        QError::Numeric(_) => QosStatus::QosStatusNumeric,
        QError::UnsupportedRegion(_) => QosStatus::QosStatusUnsupported,
        QError::InsufficientAcceptance { .. } => QosStatus::QosStatusInsufficientAcceptance,
    }
}

fn fail(err: QError) -> QosStatus {
    set_error(&err.to_string());
    status_of(&err)
}

fn guard(body: impl FnOnce() -> QosStatus) -> QosStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => {
            set_error("panic crossed the C boundary");
            QosStatus::QosStatusPanic
        }
    }
}

/// Message for the most recent failure on this thread; empty string if none.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qos_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Create a parameter handle: `q` strictly inside (0, 1), `eps > 0` the
/// series-truncation threshold, `max_terms >= 1` the hard term cap.
///
/// # Safety
/// `out` must point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn qos_params_new(
    q: f64,
    eps: f64,
    max_terms: usize,
    out: *mut *mut QosParams,
) -> QosStatus {
    guard(|| {
        if out.is_null() {
            set_error("out pointer is null");
            return QosStatus::QosStatusNullPointer;
        }
        match QParam::new(q, eps, max_terms) {
            Ok(inner) => {
                unsafe { *out = Box::into_raw(Box::new(QosParams { inner })) };
                QosStatus::QosStatusOk
            }
            Err(e) => fail(e),
        }
    })
}

/// Create a parameter handle with the default truncation policy.
///
/// # Safety
/// `out` must point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn qos_params_default(q: f64, out: *mut *mut QosParams) -> QosStatus {
    unsafe {
        qos_params_new(
            q,
            qorderstats::param::DEFAULT_EPS,
            qorderstats::param::DEFAULT_MAX_TERMS,
            out,
        )
    }
}

/// Release a handle from [`qos_params_new`]; a null pointer is a no-op.
///
/// # Safety
/// `params` must be null or a pointer previously returned by a constructor
/// and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qos_params_free(params: *mut QosParams) {
    if !params.is_null() {
        drop(unsafe { Box::from_raw(params) });
    }
}

unsafe fn params_ref<'a>(params: *const QosParams) -> Option<&'a QParam> {
    unsafe { params.as_ref() }.map(|p| &p.inner)
}

macro_rules! require {
    ($ptr:expr, $name:literal) => {
        match unsafe { params_ref($ptr) } {
            Some(p) => p,
            None => {
                set_error(concat!($name, " handle is null"));
                return QosStatus::QosStatusNullPointer;
            }
        }
    };
}

macro_rules! out_slot {
    ($ptr:expr) => {
        if $ptr.is_null() {
            set_error("out pointer is null");
            return QosStatus::QosStatusNullPointer;
        }
    };
}

/// `[n]_q = (1 - q^n)/(1 - q)`.
///
/// # Safety
/// `params` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qos_q_number(
    params: *const QosParams,
    n: u32,
    out: *mut f64,
) -> QosStatus {
    guard(|| {
        let p = require!(params, "params");
        out_slot!(out);
        unsafe { *out = q_number(n, p) };
        QosStatus::QosStatusOk
    })
}

/// `[n]_q!`.
///
/// # Safety
/// `params` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qos_q_factorial(
    params: *const QosParams,
    n: u32,
    out: *mut f64,
) -> QosStatus {
    guard(|| {
        let p = require!(params, "params");
        out_slot!(out);
        unsafe { *out = q_factorial(n, p) };
        QosStatus::QosStatusOk
    })
}

/// q-binomial coefficient; out-of-range `k` yields 0.
///
/// # Safety
/// `params` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qos_q_binomial(
    params: *const QosParams,
    n: i64,
    k: i64,
    base: QosBase,
    out: *mut f64,
) -> QosStatus {
    guard(|| {
        let p = require!(params, "params");
        out_slot!(out);
        let b = match base {
            QosBase::QosBaseNormal => QBase::Normal,
            QosBase::QosBaseInverse => QBase::Inverse,
        };
        unsafe { *out = q_binomial(n, k, p, b) };
        QosStatus::QosStatusOk
    })
}

/// q-multinomial coefficient over `parts[0..parts_len]`.
///
/// # Safety
/// `params` must be a live handle; `parts` must point to `parts_len`
/// readable entries; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qos_q_multinomial(
    params: *const QosParams,
    n: u32,
    parts: *const u32,
    parts_len: usize,
    base: QosBase,
    out: *mut f64,
) -> QosStatus {
    guard(|| {
        let p = require!(params, "params");
        out_slot!(out);
        if parts.is_null() && parts_len > 0 {
            set_error("parts pointer is null");
            return QosStatus::QosStatusNullPointer;
        }
        let parts = if parts_len == 0 {
            &[][..]
        } else {
            unsafe { std::slice::from_raw_parts(parts, parts_len) }
        };
        let b = match base {
            QosBase::QosBaseNormal => QBase::Normal,
            QosBase::QosBaseInverse => QBase::Inverse,
        };
        match q_multinomial(n, parts, p, b) {
            Ok(v) => {
                unsafe { *out = v };
                QosStatus::QosStatusOk
            }
            Err(e) => fail(e),
        }
    })
}

/// q-shifted factorial `(a; q)_n`; pass `n < 0` for the infinite product.
/// `out_tail` (optional) receives the truncation tail bound.
///
/// # Safety
/// `params` must be a live handle; `out` must be writable; `out_tail` may
/// be null.
#[no_mangle]
pub unsafe extern "C" fn qos_q_shifted_factorial(
    params: *const QosParams,
    a: f64,
    n: i64,
    out: *mut f64,
    out_tail: *mut f64,
) -> QosStatus {
    guard(|| {
        let p = require!(params, "params");
        out_slot!(out);
        let order = if n < 0 {
            PochhammerOrder::Infinite
        } else {
            PochhammerOrder::Finite(n as u32)
        };
        match q_shifted_factorial(a, order, p) {
            Ok(v) => {
                unsafe { *out = v.value };
                if !out_tail.is_null() {
                    unsafe { *out_tail = v.tail_bound };
                }
                QosStatus::QosStatusOk
            }
            Err(e) => fail(e),
        }
    })
}

/// q-exponential `e_q(z)`; positive `z` must stay below `1/(1-q)`.
///
/// # Safety
/// `params` must be a live handle; `out` must be writable; `out_tail` may
/// be null.
#[no_mangle]
pub unsafe extern "C" fn qos_q_exponential(
    params: *const QosParams,
    z: f64,
    out: *mut f64,
    out_tail: *mut f64,
) -> QosStatus {
    guard(|| {
        let p = require!(params, "params");
        out_slot!(out);
        match q_exponential(z, p) {
            Ok(v) => {
                unsafe { *out = v.value };
                if !out_tail.is_null() {
                    unsafe { *out_tail = v.tail_bound };
                }
                QosStatus::QosStatusOk
            }
            Err(e) => fail(e),
        }
    })
}

/// q-difference quotient `(f(x) - f(qx)) / ((1-q) x)`; undefined at `x = 0`.
///
/// # Safety
/// `params` must be a live handle; `f` must be callable with `user`; `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn qos_q_derivative(
    params: *const QosParams,
    f: QosRealFn,
    user: *mut c_void,
    x: f64,
    out: *mut f64,
) -> QosStatus {
    guard(|| {
        let p = require!(params, "params");
        out_slot!(out);
        let Some(f) = f else {
            set_error("function pointer is null");
            return QosStatus::QosStatusNullPointer;
        };
        match q_derivative(|v| unsafe { f(v, user) }, x, p) {
            Ok(v) => {
                unsafe { *out = v };
                QosStatus::QosStatusOk
            }
            Err(e) => fail(e),
        }
    })
}

/// Jackson q-integral of `f` over `[a, b]`; pass `b = INFINITY` for the
/// improper integral from 0.
///
/// # Safety
/// `params` must be a live handle; `f` must be callable with `user`; `out`
/// must be writable; `out_tail` may be null.
#[no_mangle]
pub unsafe extern "C" fn qos_q_integrate(
    params: *const QosParams,
    f: QosRealFn,
    user: *mut c_void,
    a: f64,
    b: f64,
    out: *mut f64,
    out_tail: *mut f64,
) -> QosStatus {
    guard(|| {
        let p = require!(params, "params");
        out_slot!(out);
        let Some(f) = f else {
            set_error("function pointer is null");
            return QosStatus::QosStatusNullPointer;
        };
        match q_integrate(|v| unsafe { f(v, user) }, a, b, p) {
            Ok(v) => {
                unsafe { *out = v.value };
                if !out_tail.is_null() {
                    unsafe { *out_tail = v.tail_bound };
                }
                QosStatus::QosStatusOk
            }
            Err(e) => fail(e),
        }
    })
}

/// q-uniform density, distribution, r-th moment, and q-variance.
///
/// # Safety
/// `params` must be a live handle; the out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn qos_quniform_pdf(
    params: *const QosParams,
    beta: f64,
    x: f64,
    out: *mut f64,
) -> QosStatus {
    guard(|| {
        let p = require!(params, "params");
        out_slot!(out);
        match QUniform::new(beta, *p) {
            Ok(d) => {
                unsafe { *out = d.pdf(x) };
                QosStatus::QosStatusOk
            }
            Err(e) => fail(e),
        }
    })
}

/// See [`qos_quniform_pdf`].
///
/// # Safety
/// Same contract as [`qos_quniform_pdf`].
#[no_mangle]
pub unsafe extern "C" fn qos_quniform_cdf(
    params: *const QosParams,
    beta: f64,
    x: f64,
    out: *mut f64,
) -> QosStatus {
    guard(|| {
        let p = require!(params, "params");
        out_slot!(out);
        match QUniform::new(beta, *p) {
            Ok(d) => {
                unsafe { *out = d.cdf(x) };
                QosStatus::QosStatusOk
            }
            Err(e) => fail(e),
        }
    })
}

/// See [`qos_quniform_pdf`].
///
/// # Safety
/// Same contract as [`qos_quniform_pdf`].
#[no_mangle]
pub unsafe extern "C" fn qos_quniform_moment(
    params: *const QosParams,
    beta: f64,
    r: u32,
    out: *mut f64,
) -> QosStatus {
    guard(|| {
        let p = require!(params, "params");
        out_slot!(out);
        match QUniform::new(beta, *p) {
            Ok(d) => {
                unsafe { *out = d.moment(r) };
                QosStatus::QosStatusOk
            }
            Err(e) => fail(e),
        }
    })
}

/// See [`qos_quniform_pdf`].
///
/// # Safety
/// Same contract as [`qos_quniform_pdf`].
#[no_mangle]
pub unsafe extern "C" fn qos_quniform_variance(
    params: *const QosParams,
    beta: f64,
    out: *mut f64,
) -> QosStatus {
    guard(|| {
        let p = require!(params, "params");
        out_slot!(out);
        match QUniform::new(beta, *p) {
            Ok(d) => {
                unsafe { *out = d.variance() };
                QosStatus::QosStatusOk
            }
            Err(e) => fail(e),
        }
    })
}

/// Fill `out[0..len]` with q-uniform samples drawn from the given seed;
/// every sample is an exact Fermat atom `beta q^n`.
///
/// # Safety
/// `params` must be a live handle; `out` must point to `len` writable
/// doubles.
#[no_mangle]
pub unsafe extern "C" fn qos_quniform_sample_fill(
    params: *const QosParams,
    beta: f64,
    seed: u64,
    out: *mut f64,
    len: usize,
) -> QosStatus {
    guard(|| {
        let p = require!(params, "params");
        if out.is_null() && len > 0 {
            set_error("out pointer is null");
            return QosStatus::QosStatusNullPointer;
        }
        match QUniform::new(beta, *p) {
            Ok(d) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let slots = unsafe { std::slice::from_raw_parts_mut(out, len) };
                for slot in slots {
                    *slot = d.sample(&mut rng);
                }
                QosStatus::QosStatusOk
            }
            Err(e) => fail(e),
        }
    })
}

fn statistic_of(which: QosStatistic, k: u32) -> OrderStatistic {
    match which {
        QosStatistic::QosStatisticMax => OrderStatistic::Max,
        QosStatistic::QosStatisticMin => OrderStatistic::Min,
        QosStatistic::QosStatisticKth => OrderStatistic::Kth(k),
    }
}

/// Closed-form q-distribution function of the max/min/k-th q-ordered
/// variable of `nu` dependent q-uniform variables on scale `t`; `k` is
/// consulted only for `QOS_STATISTIC_KTH`.
///
/// # Safety
/// `params` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qos_unif_ord_cdf(
    params: *const QosParams,
    nu: u32,
    which: QosStatistic,
    k: u32,
    t: f64,
    y: f64,
    out: *mut f64,
) -> QosStatus {
    guard(|| {
        let p = require!(params, "params");
        out_slot!(out);
        let spec = match OrderStatSpec::new(nu, k.clamp(1, nu.max(1)), t) {
            Ok(s) => s,
            Err(e) => return fail(e),
        };
        match unif_ord_cdf(&spec, p, statistic_of(which, k), y) {
            Ok(v) => {
                unsafe { *out = v };
                QosStatus::QosStatusOk
            }
            Err(e) => fail(e),
        }
    })
}

/// Matching q-density; see [`qos_unif_ord_cdf`].
///
/// # Safety
/// Same contract as [`qos_unif_ord_cdf`].
#[no_mangle]
pub unsafe extern "C" fn qos_unif_ord_pdf(
    params: *const QosParams,
    nu: u32,
    which: QosStatistic,
    k: u32,
    t: f64,
    y: f64,
    out: *mut f64,
) -> QosStatus {
    guard(|| {
        let p = require!(params, "params");
        out_slot!(out);
        let spec = match OrderStatSpec::new(nu, k.clamp(1, nu.max(1)), t) {
            Ok(s) => s,
            Err(e) => return fail(e),
        };
        match unif_ord_pdf(&spec, p, statistic_of(which, k), y) {
            Ok(v) => {
                unsafe { *out = v };
                QosStatus::QosStatusOk
            }
            Err(e) => fail(e),
        }
    })
}

/// Joint law of `(min, max)` at `(y, z)` on the support `y < q^{nu-1} z`.
///
/// # Safety
/// `params` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qos_unif_joint_minmax(
    params: *const QosParams,
    nu: u32,
    kind: QosJointKind,
    t: f64,
    y: f64,
    z: f64,
    out: *mut f64,
) -> QosStatus {
    guard(|| {
        let p = require!(params, "params");
        out_slot!(out);
        let spec = match OrderStatSpec::new(nu, 1, t) {
            Ok(s) => s,
            Err(e) => return fail(e),
        };
        let kind = match kind {
            QosJointKind::QosJointCdf => JointKind::Cdf,
            QosJointKind::QosJointPdf => JointKind::Pdf,
        };
        match unif_joint_minmax(&spec, p, kind, y, z) {
            Ok(v) => {
                unsafe { *out = v };
                QosStatus::QosStatusOk
            }
            Err(e) => fail(e),
        }
    })
}

/// Joint law of `(Y_(k), Y_(r))` at `(y, z)` on the support `y < q^{r-k} z`.
///
/// # Safety
/// `params` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qos_unif_joint_kr(
    params: *const QosParams,
    nu: u32,
    k: u32,
    r: u32,
    kind: QosJointKind,
    t: f64,
    y: f64,
    z: f64,
    out: *mut f64,
) -> QosStatus {
    guard(|| {
        let p = require!(params, "params");
        out_slot!(out);
        let spec = match OrderStatSpec::with_range(nu, k, r, t) {
            Ok(s) => s,
            Err(e) => return fail(e),
        };
        let kind = match kind {
            QosJointKind::QosJointCdf => JointKind::Cdf,
            QosJointKind::QosJointPdf => JointKind::Pdf,
        };
        match unif_joint_kr(&spec, p, kind, y, z) {
            Ok(v) => {
                unsafe { *out = v };
                QosStatus::QosStatusOk
            }
            Err(e) => fail(e),
        }
    })
}

/// The constant the full ordered joint density takes on its support chain.
///
/// # Safety
/// `params` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qos_unif_joint_full_constant(
    params: *const QosParams,
    nu: u32,
    t: f64,
    out: *mut f64,
) -> QosStatus {
    guard(|| {
        let p = require!(params, "params");
        out_slot!(out);
        match OrderStatSpec::new(nu, 1, t) {
            Ok(spec) => {
                unsafe { *out = unif_joint_full_constant(&spec, p) };
                QosStatus::QosStatusOk
            }
            Err(e) => fail(e),
        }
    })
}

/// Full ordered joint density at `ys[0..len]` (ascending coordinates):
/// the constant on the q-ordered chain, 0 outside it.
///
/// # Safety
/// `params` must be a live handle; `ys` must point to `len` readable
/// doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qos_unif_joint_full_pdf(
    params: *const QosParams,
    t: f64,
    ys: *const f64,
    len: usize,
    out: *mut f64,
) -> QosStatus {
    guard(|| {
        let p = require!(params, "params");
        out_slot!(out);
        if ys.is_null() {
            set_error("ys pointer is null");
            return QosStatus::QosStatusNullPointer;
        }
        let ys = unsafe { std::slice::from_raw_parts(ys, len) }.to_vec();
        let point = match QOrderedPoint::new(ys) {
            Ok(pt) => pt,
            Err(e) => return fail(e),
        };
        let spec = match OrderStatSpec::new(len as u32, 1, t) {
            Ok(s) => s,
            Err(e) => return fail(e),
        };
        match unif_joint_full_pdf(&spec, p, &point) {
            Ok(v) => {
                unsafe { *out = v };
                QosStatus::QosStatusOk
            }
            Err(e) => fail(e),
        }
    })
}

/// Whether `ys[0..len]` satisfies the strict q-ordered interleaving chain
/// with upper bound `t`.
///
/// # Safety
/// `params` must be a live handle; `ys` must point to `len` readable
/// doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qos_support_check(
    params: *const QosParams,
    t: f64,
    ys: *const f64,
    len: usize,
    out: *mut bool,
) -> QosStatus {
    guard(|| {
        let p = require!(params, "params");
        out_slot!(out);
        if ys.is_null() {
            set_error("ys pointer is null");
            return QosStatus::QosStatusNullPointer;
        }
        let ys = unsafe { std::slice::from_raw_parts(ys, len) }.to_vec();
        match QOrderedPoint::new(ys) {
            Ok(point) => {
                unsafe { *out = support_check(&point, t, p) };
                QosStatus::QosStatusOk
            }
            Err(e) => fail(e),
        }
    })
}

/// Probability of one arrival in geometric interval `k` (1-based) of the
/// Heine process.
///
/// # Safety
/// `params` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qos_heine_interval_prob(
    params: *const QosParams,
    lambda: f64,
    t: f64,
    k: u32,
    out: *mut f64,
) -> QosStatus {
    guard(|| {
        let p = require!(params, "params");
        out_slot!(out);
        if k < 1 {
            set_error("interval index k must be at least 1");
            return QosStatus::QosStatusDomain;
        }
        match HeineParams::new(lambda, t, *p, 1) {
            Ok(hp) => {
                unsafe { *out = interval_arrival_prob(k, &hp) };
                QosStatus::QosStatusOk
            }
            Err(e) => fail(e),
        }
    })
}

/// Heine pmf `P(X(t) = k)` with the truncation tail bound.
///
/// # Safety
/// `params` must be a live handle; `out` must be writable; `out_tail` may
/// be null.
#[no_mangle]
pub unsafe extern "C" fn qos_heine_pmf(
    params: *const QosParams,
    lambda: f64,
    t: f64,
    k: u32,
    out: *mut f64,
    out_tail: *mut f64,
) -> QosStatus {
    guard(|| {
        let p = require!(params, "params");
        out_slot!(out);
        let hp = match HeineParams::new(lambda, t, *p, 1) {
            Ok(hp) => hp,
            Err(e) => return fail(e),
        };
        match heine_pmf(k, &hp) {
            Ok(v) => {
                unsafe { *out = v.value };
                if !out_tail.is_null() {
                    unsafe { *out_tail = v.tail_bound };
                }
                QosStatus::QosStatusOk
            }
            Err(e) => fail(e),
        }
    })
}

/// Poisson-binomial DP oracle: fills `out[0..=kmax]` with the exact count
/// distribution over `depth` intervals; `out_tail` (optional) receives the
/// unresolved arrival mass below the depth.
///
/// # Safety
/// `params` must be a live handle; `out` must point to `kmax + 1` writable
/// doubles; `out_tail` may be null.
#[no_mangle]
pub unsafe extern "C" fn qos_heine_pmf_dp(
    params: *const QosParams,
    lambda: f64,
    t: f64,
    depth: u32,
    kmax: u32,
    out: *mut f64,
    out_tail: *mut f64,
) -> QosStatus {
    guard(|| {
        let p = require!(params, "params");
        out_slot!(out);
        let hp = match HeineParams::new(lambda, t, *p, depth) {
            Ok(hp) => hp,
            Err(e) => return fail(e),
        };
        let dp = pmf_oracle_dp(&hp, kmax);
        let slots = unsafe { std::slice::from_raw_parts_mut(out, kmax as usize + 1) };
        for (k, slot) in slots.iter_mut().enumerate() {
            *slot = dp.prob(k as u32);
        }
        if !out_tail.is_null() {
            unsafe { *out_tail = dp.tail_mass() };
        }
        QosStatus::QosStatusOk
    })
}

/// Exact conditional probability of the waiting-time configuration given
/// `X(t) = nu`; equals `[nu]_q! (1-q)^nu`.
///
/// # Safety
/// `params` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qos_heine_conditional_config_prob(
    params: *const QosParams,
    lambda: f64,
    t: f64,
    nu: u32,
    depth: u32,
    out: *mut f64,
) -> QosStatus {
    guard(|| {
        let p = require!(params, "params");
        out_slot!(out);
        let hp = match HeineParams::new(lambda, t, *p, depth) {
            Ok(hp) => hp,
            Err(e) => return fail(e),
        };
        match conditional_config_probability(nu, &hp) {
            Ok(v) => {
                unsafe { *out = v };
                QosStatus::QosStatusOk
            }
            Err(e) => fail(e),
        }
    })
}

/// Conditional waiting-time density `[nu]_q! / (q^{binom(nu,2)} t^nu)`.
///
/// # Safety
/// `params` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qos_heine_conditional_density(
    params: *const QosParams,
    t: f64,
    nu: u32,
    out: *mut f64,
) -> QosStatus {
    guard(|| {
        let p = require!(params, "params");
        out_slot!(out);
        match HeineParams::new(1.0, t, *p, 1) {
            Ok(hp) => {
                unsafe { *out = conditional_density_value(nu, &hp) };
                QosStatus::QosStatusOk
            }
            Err(e) => fail(e),
        }
    })
}

/// Simulate one Heine run from the seed and return the arrival count over
/// `depth` intervals.
///
/// # Safety
/// `params` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qos_heine_simulate_count(
    params: *const QosParams,
    lambda: f64,
    t: f64,
    depth: u32,
    seed: u64,
    out: *mut u32,
) -> QosStatus {
    guard(|| {
        let p = require!(params, "params");
        out_slot!(out);
        match HeineParams::new(lambda, t, *p, depth) {
            Ok(hp) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                unsafe { *out = simulate(&hp, &mut rng).count() };
                QosStatus::QosStatusOk
            }
            Err(e) => fail(e),
        }
    })
}

/// Run the full verification suite; `out_failed` receives the number of
/// asserted checks that failed (0 means everything passed).
///
/// # Safety
/// `out_failed` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qos_verify(seed: u64, trials: u64, out_failed: *mut u64) -> QosStatus {
    guard(|| {
        out_slot!(out_failed);
        let config = SuiteConfig { seed, trials };
        match run_all_checks(&config) {
            Ok(checks) => {
                let failed = checks.iter().filter(|c| c.asserted && !c.passed).count() as u64;
                unsafe { *out_failed = failed };
                QosStatus::QosStatusOk
            }
            Err(e) => fail(e),
        }
    })
}
