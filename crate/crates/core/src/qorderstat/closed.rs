//! Closed-form q-uniform specializations of the order-statistic laws.
//!
//! Each joint law comes in three flavors: the checked evaluator (domain
//! error outside the stated support region), a `_formal` evaluator that
//! computes the same polynomial everywhere (the q-difference identities
//! hold formally, and boundary behavior is only visible there), and a
//! `_masked` evaluator for integration harnesses, which returns the formula
//! value on the closure of the support region and 0 outside. The closure
//! matters: the Fermat sum for `int_0^U` places an atom at `U` itself, and
//! dropping it would destroy the normalization the formulas satisfy.

use crate::error::{QError, Result};
use crate::param::QParam;
use crate::qcore::{q_binomial, q_factorial, q_multinomial, q_number, QBase};
use crate::qorderstat::{support_check, JointKind, OrderStatSpec, OrderStatistic, QOrderedPoint};

/// Closed-form q-distribution function of the maximum, minimum, or k-th
/// q-ordered variable of `nu` dependent q-uniform variables.
pub fn unif_ord_cdf(
    spec: &OrderStatSpec,
    qp: &QParam,
    which: OrderStatistic,
    y: f64,
) -> Result<f64> {
    check_univariate(spec, qp, which, y)?;
    Ok(unif_ord_cdf_raw(spec.nu(), spec.t(), qp, which, y))
}

/// Closed-form q-density of the maximum, minimum, or k-th q-ordered
/// variable; satisfies `d_q F = f` at every `y > 0`.
pub fn unif_ord_pdf(
    spec: &OrderStatSpec,
    qp: &QParam,
    which: OrderStatistic,
    y: f64,
) -> Result<f64> {
    check_univariate(spec, qp, which, y)?;
    Ok(unif_ord_pdf_raw(spec.nu(), spec.t(), qp, which, y))
}

fn check_univariate(
    spec: &OrderStatSpec,
    _qp: &QParam,
    which: OrderStatistic,
    y: f64,
) -> Result<()> {
    if let OrderStatistic::Kth(k) = which {
        if k < 1 || k > spec.nu() {
            return Err(QError::Domain(format!("k = {k} outside 1..={}", spec.nu())));
        }
    }
    if !(0.0..=spec.t()).contains(&y) {
        return Err(QError::Domain(format!("y = {y} outside [0, {}]", spec.t())));
    }
    Ok(())
}

pub(crate) fn unif_ord_cdf_raw(nu: u32, t: f64, qp: &QParam, which: OrderStatistic, y: f64) -> f64 {
    let q = qp.q();
    match which {
        OrderStatistic::Max => (y / t).powi(nu as i32),
        OrderStatistic::Min => {
            let mut prod = 1.0;
            for i in 0..nu as i32 {
                prod *= 1.0 - y / (q.powi(i) * t);
            }
            1.0 - prod
        }
        OrderStatistic::Kth(k) => {
            let mut total = 0.0;
            for r in k..=nu {
                let coeff = q_binomial(nu as i64, r as i64, qp, QBase::Inverse);
                let mut term = coeff * (y / t).powi(r as i32);
                for i in 0..(nu - r) as i32 {
                    term *= 1.0 - y / (q.powi(i) * t);
                }
                total += term;
            }
            total
        }
    }
}

pub(crate) fn unif_ord_pdf_raw(nu: u32, t: f64, qp: &QParam, which: OrderStatistic, y: f64) -> f64 {
    let q = qp.q();
    match which {
        OrderStatistic::Max => q_number(nu, qp) * (y / t).powi(nu as i32 - 1) / t,
        OrderStatistic::Min => {
            let mut prod = 1.0;
            for i in 0..(nu - 1) as i32 {
                prod *= 1.0 - y / (q.powi(i) * t);
            }
            q_number(nu, qp) / (q.powi(nu as i32 - 1) * t) * prod
        }
        OrderStatistic::Kth(k) => {
            let mut value = kth_prefactor(nu, k, qp) * (y / t).powi(k as i32 - 1) / t;
            for i in 0..(nu - k) as i32 {
                value *= 1.0 - y / (q.powi(i) * t);
            }
            value
        }
    }
}

/// Simplified k-th density prefactor `q^{-k(nu-k)} [nu]_q! / ([k-1]_q! [nu-k]_q!)`.
pub(crate) fn kth_prefactor(nu: u32, k: u32, qp: &QParam) -> f64 {
    let q = qp.q();
    q.powi(-((k * (nu - k)) as i32)) * q_factorial(nu, qp)
        / (q_factorial(k - 1, qp) * q_factorial(nu - k, qp))
}

/// Checked joint `(min, max)` law; the support region is `y < q^{nu-1} z`
/// with `y, z` in `[0, t]`, and the density additionally needs `nu >= 2`.
pub fn unif_joint_minmax(
    spec: &OrderStatSpec,
    qp: &QParam,
    kind: JointKind,
    y: f64,
    z: f64,
) -> Result<f64> {
    let nu = spec.nu();
    let t = spec.t();
    let q = qp.q();
    joint_support(y, z, t, q.powi(nu as i32 - 1))?;
    if kind == JointKind::Pdf && nu < 2 {
        return Err(QError::Domain(
            "the (min, max) density needs nu >= 2".into(),
        ));
    }
    Ok(unif_joint_minmax_formal(spec, qp, kind, y, z))
}

/// Formal polynomial evaluation of the `(min, max)` joint law, with no
/// support guard.
pub fn unif_joint_minmax_formal(
    spec: &OrderStatSpec,
    qp: &QParam,
    kind: JointKind,
    y: f64,
    z: f64,
) -> f64 {
    let nu = spec.nu();
    let t = spec.t();
    let q = qp.q();
    match kind {
        JointKind::Cdf => {
            // z^nu/t^nu - prod_i (z - y q^{-(i-1)}) / t, written without
            // dividing by z so the z = 0 edge stays finite
            let mut prod = 1.0;
            for i in 0..nu as i32 {
                prod *= (z - y / q.powi(i)) / t;
            }
            (z / t).powi(nu as i32) - prod
        }
        JointKind::Pdf => {
            let mut value =
                q.powi(1 - nu as i32) * q_number(nu, qp) * q_number(nu - 1, qp) / t.powi(nu as i32);
            for i in 1..=(nu as i32 - 2) {
                value *= z - y / q.powi(i);
            }
            value
        }
    }
}

/// Density of the `(min, max)` joint on the closure of its support region,
/// 0 outside; for integration harnesses.
pub fn unif_joint_minmax_masked(spec: &OrderStatSpec, qp: &QParam, y: f64, z: f64) -> f64 {
    let shift = qp.q().powi(spec.nu() as i32 - 1);
    if y < 0.0 || z > spec.t() || y > shift * z {
        return 0.0;
    }
    unif_joint_minmax_formal(spec, qp, JointKind::Pdf, y, z)
}

/// Checked joint `(Y_(k), Y_(r))` law; `spec` must carry `r`, and the
/// support region is `y < q^{r-k} z` with `y, z` in `[0, t]`.
pub fn unif_joint_kr(
    spec: &OrderStatSpec,
    qp: &QParam,
    kind: JointKind,
    y: f64,
    z: f64,
) -> Result<f64> {
    let r = spec
        .r()
        .ok_or_else(|| QError::Domain("spec carries no second rank r".into()))?;
    let k = spec.k();
    joint_support(y, z, spec.t(), qp.q().powi((r - k) as i32))?;
    Ok(unif_joint_kr_formal(spec, qp, kind, y, z))
}

/// Formal polynomial evaluation of the `(Y_(k), Y_(r))` joint law.
pub fn unif_joint_kr_formal(
    spec: &OrderStatSpec,
    qp: &QParam,
    kind: JointKind,
    y: f64,
    z: f64,
) -> f64 {
    let nu = spec.nu();
    let k = spec.k();
    let r = spec.r().expect("validated by caller");
    let t = spec.t();
    let q = qp.q();
    match kind {
        JointKind::Cdf => {
            let mut total = 0.0;
            for j in r..=nu {
                for s in k..=j {
                    let coeff = q_multinomial(nu, &[s, j - s], qp, QBase::Inverse)
                        .expect("parts within nu");
                    let mut term = coeff * (y / t).powi(s as i32);
                    // (z/t)^{j-s} prod_i (1 - y/(q^{i-1} z)) without dividing by z
                    for i in 0..(j - s) as i32 {
                        term *= (z - y / q.powi(i)) / t;
                    }
                    for m in 0..(nu - j) as i32 {
                        term *= 1.0 - z / (q.powi(m) * t);
                    }
                    total += term;
                }
            }
            total
        }
        JointKind::Pdf => {
            let prefactor = q.powi(-((r * (nu - r) + k * (r - k)) as i32)) * q_factorial(nu, qp)
                / (q_factorial(k - 1, qp) * q_factorial(r - k - 1, qp) * q_factorial(nu - r, qp));
            let mut value = prefactor * (y / t).powi(k as i32 - 1) / t.powi((r - k) as i32 + 1);
            for i in 1..=(r - k - 1) as i32 {
                value *= z - y / q.powi(i);
            }
            for m in 0..(nu - r) as i32 {
                value *= 1.0 - z / (q.powi(m) * t);
            }
            value
        }
    }
}

/// Density of the `(Y_(k), Y_(r))` joint on the closure of its support
/// region, 0 outside; for integration harnesses.
pub fn unif_joint_kr_masked(spec: &OrderStatSpec, qp: &QParam, y: f64, z: f64) -> f64 {
    let r = spec.r().expect("spec carries r");
    let shift = qp.q().powi((r - spec.k()) as i32);
    if y < 0.0 || z > spec.t() || y > shift * z {
        return 0.0;
    }
    unif_joint_kr_formal(spec, qp, JointKind::Pdf, y, z)
}

/// The constant value `[nu]_q! / (q^{binom(nu,2)} t^nu)` the full ordered
/// joint density takes on its support.
pub fn unif_joint_full_constant(spec: &OrderStatSpec, qp: &QParam) -> f64 {
    let nu = spec.nu() as i64;
    let binom2 = (nu * (nu - 1) / 2) as i32;
    q_factorial(spec.nu(), qp) / (qp.q().powi(binom2) * spec.t().powi(nu as i32))
}

/// Full ordered joint density at a point: the constant on the q-ordered
/// support chain, 0 outside it.
pub fn unif_joint_full_pdf(
    spec: &OrderStatSpec,
    qp: &QParam,
    point: &QOrderedPoint,
) -> Result<f64> {
    if point.nu() != spec.nu() {
        return Err(QError::Domain(format!(
            "point has {} coordinates, spec has nu = {}",
            point.nu(),
            spec.nu()
        )));
    }
    if support_check(point, spec.t(), qp) {
        Ok(unif_joint_full_constant(spec, qp))
    } else {
        Ok(0.0)
    }
}

/// Full ordered joint density on the closure of the chain region
/// (`y_i <= q y_{i+1}` allowed), 0 outside; for integration harnesses.
/// Coordinates are ascending, `y_1` first.
pub fn unif_joint_full_pdf_masked(spec: &OrderStatSpec, qp: &QParam, ys: &[f64]) -> f64 {
    debug_assert_eq!(ys.len(), spec.nu() as usize);
    let q = qp.q();
    if ys[0] < 0.0 || *ys.last().expect("non-empty") > spec.t() {
        return 0.0;
    }
    if !ys.windows(2).all(|w| w[0] <= q * w[1]) {
        return 0.0;
    }
    unif_joint_full_constant(spec, qp)
}

fn joint_support(y: f64, z: f64, t: f64, shift: f64) -> Result<()> {
    if !(0.0..=t).contains(&y) || !(0.0..=t).contains(&z) {
        return Err(QError::Domain(format!(
            "(y, z) = ({y}, {z}) outside [0, {t}]^2"
        )));
    }
    if y >= shift * z {
        return Err(QError::Domain(format!(
            "support violation: y = {y} not below {shift} * z = {}",
            shift * z
        )));
    }
    Ok(())
}
