//! q-numbers, q-factorials, q-shifted factorials, q-binomial and
//! q-multinomial coefficients, and the q-exponential product.

use crate::error::{QError, Result};
use crate::param::{QParam, TruncationBound};

/// Whether a coefficient is taken in base `q` or base `q^{-1}`.
///
/// The inverse-base values are obtained from the normal ones through the
/// exponent relations `[n choose k]_{1/q} = q^{-k(n-k)} [n choose k]_q` and
/// its multinomial analogue, which avoids ever forming `1/q` powers directly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QBase {
    Normal,
    Inverse,
}

/// Order of a q-shifted factorial: a finite product or the infinite one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PochhammerOrder {
    Finite(u32),
    Infinite,
}

/// The q-number `[n]_q = (1 - q^n) / (1 - q)`.
///
/// Zero at `n = 0`, strictly increasing in `n`.
pub fn q_number(n: u32, qp: &QParam) -> f64 {
    let q = qp.q();
    (1.0 - q.powi(n as i32)) / (1.0 - q)
}

/// The q-factorial `[n]_q! = [1]_q [2]_q ... [n]_q`, with `[0]_q! = 1`.
pub fn q_factorial(n: u32, qp: &QParam) -> f64 {
    (1..=n).map(|i| q_number(i, qp)).product()
}

/// The q-shifted factorial `(a; q)_n = prod_{k=1}^{n} (1 - a q^{k-1})`.
///
/// For `PochhammerOrder::Infinite` the product is truncated once
/// `|a| q^{k-1} < eps * (1 - q)` or the term cap is reached; the tail bound
/// comes from the remainder of the log-product.
pub fn q_shifted_factorial(a: f64, order: PochhammerOrder, qp: &QParam) -> Result<TruncationBound> {
    if !a.is_finite() {
        return Err(QError::Domain(format!("a must be finite, got {a}")));
    }
    let q = qp.q();
    match order {
        PochhammerOrder::Finite(n) => {
            let mut prod = 1.0;
            let mut aq = a;
            for _ in 0..n {
                prod *= 1.0 - aq;
                aq *= q;
            }
            Ok(TruncationBound::exact(prod))
        }
        PochhammerOrder::Infinite => {
            let threshold = qp.eps() * (1.0 - q);
            let mut prod = 1.0;
            let mut aq = a;
            let mut k = 0usize;
            while aq.abs() >= threshold && k < qp.max_terms() {
                prod *= 1.0 - aq;
                aq *= q;
                k += 1;
            }
            Ok(TruncationBound::new(
                prod,
                log_product_tail(prod, aq.abs(), q),
            ))
        }
    }
}

/// Bound on the error from dropping the factors `(1 - x_j)` with
/// `|x_j| <= head * q^j`: the omitted log-mass is at most
/// `2 * head / (1 - q)` once `head <= 1/2`.
fn log_product_tail(partial: f64, head: f64, q: f64) -> f64 {
    if head == 0.0 {
        return 0.0;
    }
    let log_mass = 2.0 * head / (1.0 - q);
    (partial.abs() * log_mass.exp_m1()).abs()
}

/// The q-binomial (Gaussian) coefficient.
///
/// `QBase::Normal` gives `[n]_q! / ([k]_q! [n-k]_q!)`, computed over the
/// shorter of `k` and `n - k` so the `k <-> n-k` symmetry holds exactly.
/// `QBase::Inverse` multiplies by `q^{-k(n-k)}`. Out-of-range `k` (negative
/// or above `n`) returns 0, the usual combinatorial extension.
pub fn q_binomial(n: i64, k: i64, qp: &QParam, base: QBase) -> f64 {
    if k < 0 || k > n || n < 0 {
        return 0.0;
    }
    let kk = k.min(n - k) as u32;
    let n = n as u32;
    let mut value = 1.0;
    for i in 1..=kk {
        value *= q_number(n - kk + i, qp) / q_number(i, qp);
    }
    match base {
        QBase::Normal => value,
        QBase::Inverse => value * qp.q().powi(-((k * (n as i64 - k)) as i32)),
    }
}

/// The q-multinomial coefficient `[n]_q! / ([k_1]_q! ... [k_r]_q! [n - sum]_q!)`.
///
/// `QBase::Inverse` multiplies by `q^{-sum_j k_j (n - k_1 - ... - k_j)}`.
/// Reduces to [`q_binomial`] when `parts` has a single entry.
pub fn q_multinomial(n: u32, parts: &[u32], qp: &QParam, base: QBase) -> Result<f64> {
    let total: u64 = parts.iter().map(|&k| k as u64).sum();
    if total > n as u64 {
        return Err(QError::Domain(format!(
            "parts sum to {total}, exceeding n = {n}"
        )));
    }
    let mut value = q_factorial(n, qp);
    for &k in parts {
        value /= q_factorial(k, qp);
    }
    value /= q_factorial(n - total as u32, qp);
    match base {
        QBase::Normal => Ok(value),
        QBase::Inverse => {
            let mut exponent: i64 = 0;
            let mut consumed: i64 = 0;
            for &k in parts {
                consumed += k as i64;
                exponent += k as i64 * (n as i64 - consumed);
            }
            Ok(value * qp.q().powi(-(exponent as i32)))
        }
    }
}

/// The q-exponential `e_q(z) = prod_{i>=1} (1 - (1-q) z q^{i-1})^{-1}`.
///
/// Positive arguments must satisfy `z < 1/(1-q)`; at or beyond that point a
/// factor reaches zero and the product is undefined. All `z <= 0` are
/// accepted since every factor then exceeds 1.
pub fn q_exponential(z: f64, qp: &QParam) -> Result<TruncationBound> {
    if !z.is_finite() {
        return Err(QError::Domain(format!("z must be finite, got {z}")));
    }
    let q = qp.q();
    if z > 0.0 && z >= 1.0 / (1.0 - q) {
        return Err(QError::Domain(format!(
            "z = {z} outside the q-exponential domain z < 1/(1-q) = {}",
            1.0 / (1.0 - q)
        )));
    }
    let mut prod = 1.0;
    let mut zq = z;
    let mut k = 0usize;
    while zq.abs() >= qp.eps() && k < qp.max_terms() {
        prod /= 1.0 - (1.0 - q) * zq;
        zq *= q;
        k += 1;
    }
    if !prod.is_finite() {
        return Err(QError::Numeric("q-exponential product overflowed".into()));
    }
    Ok(TruncationBound::new(
        prod,
        log_product_tail(prod, (1.0 - q) * zq.abs(), q),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::param::QParam;

    fn qp(q: f64) -> QParam {
        QParam::with_default_policy(q).unwrap()
    }

    #[test]
    fn q_number_basics() {
        let p = qp(0.5);
        assert_eq!(q_number(0, &p), 0.0);
        assert_eq!(q_number(1, &p), 1.0);
        // 1 + q + q^2 at q = 0.5
        assert!((q_number(3, &p) - 1.75).abs() < 1e-15);
        for n in 1..20 {
            assert!(q_number(n + 1, &p) > q_number(n, &p));
        }
    }

    #[test]
    fn q_number_classical_limit() {
        let p = qp(0.999);
        for n in 1..=10u32 {
            let ratio = q_number(n, &p) / n as f64;
            assert!((0.99..=1.0).contains(&ratio), "n={n} ratio={ratio}");
        }
    }

    #[test]
    fn q_factorial_values() {
        let p = qp(0.5);
        assert_eq!(q_factorial(0, &p), 1.0);
        assert!((q_factorial(2, &p) - 1.5).abs() < 1e-15);
        // 1 * 1.5 * 1.75 * 1.875
        assert!((q_factorial(4, &p) - 4.921875).abs() < 1e-15);
    }

    #[test]
    fn inverse_base_q_number_relation() {
        // [n]_{1/q} = q^{-n+1} [n]_q, with the left side evaluated directly,
        // and the factorial analogue [n]_{1/q}! = q^{-binom(n,2)} [n]_q!.
        for &q in &[0.25, 0.5, 0.9] {
            let p = qp(q);
            let mut direct_fact = 1.0;
            for n in 1..=20u32 {
                let direct = (1.0 - (1.0 / q).powi(n as i32)) / (1.0 - 1.0 / q);
                let related = q.powi(-(n as i32) + 1) * q_number(n, &p);
                let rel = ((direct - related) / direct).abs();
                assert!(rel < 1e-12, "q={q} n={n} rel={rel}");
                direct_fact *= direct;
                let binom2 = (n * (n - 1) / 2) as i32;
                let related_fact = q.powi(-binom2) * q_factorial(n, &p);
                let rel = ((direct_fact - related_fact) / direct_fact).abs();
                assert!(rel < 1e-11, "factorial q={q} n={n} rel={rel}");
            }
        }
    }

    #[test]
    fn shifted_factorial_values() {
        let p = qp(0.5);
        assert_eq!(
            q_shifted_factorial(0.3, PochhammerOrder::Finite(0), &p)
                .unwrap()
                .value,
            1.0
        );
        // (1 - 0.5)(1 - 0.25)
        let v = q_shifted_factorial(0.5, PochhammerOrder::Finite(2), &p)
            .unwrap()
            .value;
        assert!((v - 0.375).abs() < 1e-15);
        // first factor vanishes at a = 1
        let v = q_shifted_factorial(1.0, PochhammerOrder::Finite(3), &p)
            .unwrap()
            .value;
        assert_eq!(v, 0.0);
    }

    #[test]
    fn shifted_factorial_infinite_converges() {
        let p = qp(0.5);
        let inf = q_shifted_factorial(0.5, PochhammerOrder::Infinite, &p).unwrap();
        let deep = q_shifted_factorial(0.5, PochhammerOrder::Finite(80), &p).unwrap();
        assert!((inf.value - deep.value).abs() <= inf.tail_bound + 1e-15);
        assert!(inf.tail_bound < 1e-12);
        assert!(q_shifted_factorial(f64::NAN, PochhammerOrder::Infinite, &p).is_err());
    }

    #[test]
    fn q_binomial_values_and_conventions() {
        let p = qp(0.5);
        assert_eq!(q_binomial(5, 0, &p, QBase::Normal), 1.0);
        // Gaussian polynomial 1 + q + 2q^2 + q^3 + q^4 at q = 0.5
        assert!((q_binomial(4, 2, &p, QBase::Normal) - 2.1875).abs() < 1e-15);
        // q^{-1} (1 + q)
        assert!((q_binomial(2, 1, &p, QBase::Inverse) - 3.0).abs() < 1e-15);
        assert_eq!(q_binomial(4, -1, &p, QBase::Normal), 0.0);
        assert_eq!(q_binomial(4, 5, &p, QBase::Normal), 0.0);
        assert_eq!(q_binomial(-2, 0, &p, QBase::Normal), 0.0);
    }

    #[test]
    fn q_binomial_symmetry_is_exact() {
        for &q in &[0.25, 0.5, 0.75, 0.9] {
            let p = qp(q);
            for n in 0..=20i64 {
                for k in 0..=n {
                    assert_eq!(
                        q_binomial(n, k, &p, QBase::Normal),
                        q_binomial(n, n - k, &p, QBase::Normal),
                        "q={q} n={n} k={k}"
                    );
                }
            }
        }
    }

    #[test]
    fn q_binomial_pascal_recurrence() {
        for &q in &[0.25, 0.5, 0.9] {
            let p = qp(q);
            for n in 1..=20i64 {
                for k in 0..=n {
                    let lhs = q_binomial(n, k, &p, QBase::Normal);
                    let rhs = q_binomial(n - 1, k - 1, &p, QBase::Normal)
                        + q.powi(k as i32) * q_binomial(n - 1, k, &p, QBase::Normal);
                    let denom = lhs.abs().max(1.0);
                    assert!((lhs - rhs).abs() / denom < 1e-12, "q={q} n={n} k={k}");
                }
            }
        }
    }

    #[test]
    fn q_multinomial_values() {
        let p = qp(0.5);
        // single part reduces to the binomial
        for n in 0..=8u32 {
            for k in 0..=n {
                let m = q_multinomial(n, &[k], &p, QBase::Normal).unwrap();
                let b = q_binomial(n as i64, k as i64, &p, QBase::Normal);
                assert!((m - b).abs() < 1e-12 * b.max(1.0));
                let mi = q_multinomial(n, &[k], &p, QBase::Inverse).unwrap();
                let bi = q_binomial(n as i64, k as i64, &p, QBase::Inverse);
                assert!((mi - bi).abs() < 1e-12 * bi.max(1.0));
            }
        }
        // [3]_q! at q = 0.5
        let m = q_multinomial(3, &[1, 1], &p, QBase::Normal).unwrap();
        assert!((m - 2.625).abs() < 1e-15);
        assert!(q_multinomial(3, &[2, 2], &p, QBase::Normal).is_err());
    }

    #[test]
    fn q_exponential_values() {
        let p = qp(0.5);
        assert_eq!(q_exponential(0.0, &p).unwrap().value, 1.0);
        // independent oracle: e_q(-1) = prod (1 + 0.5^i)^{-1}, 60 factors
        let mut oracle = 1.0;
        for i in 1..=60 {
            oracle /= 1.0 + 0.5f64.powi(i);
        }
        let v = q_exponential(-1.0, &p).unwrap();
        assert!(
            (v.value - oracle).abs() < 1e-14,
            "value={} oracle={oracle}",
            v.value
        );
        assert!((v.value - 0.41942).abs() < 1e-4);
        // domain: z >= 1/(1-q) = 2
        assert!(q_exponential(2.5, &p).is_err());
        assert!(q_exponential(2.0, &p).is_err());
        assert!(q_exponential(1.9, &p).is_ok());
    }
}
