//! Exact rational evaluation of alternating q-sums.
//!
//! The two Vandermonde-type corollaries and the q^{-1}-binomial product
//! formula sum terms whose magnitudes grow like `q^{-binom(n,2)-ny}` while
//! the totals stay of order one. At `q = 0.25, n = 8, y = 5` the largest term
//! is ~1e41, so any floating-point summation loses the answer entirely. The
//! deformation parameter arriving as an `f64` is itself a dyadic rational,
//! and the identities hold for every real `q`, so the honest evaluation is
//! exact arithmetic over that rational followed by one rounding at the end.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// The exact rational value of an `f64` (dyadic).
pub fn rational_of(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

/// `q^e` for any integer exponent.
pub fn q_pow(q: &BigRational, e: i64) -> BigRational {
    let mut base = if e < 0 { q.recip() } else { q.clone() };
    let mut e = e.unsigned_abs();
    let mut acc = BigRational::one();
    while e > 0 {
        if e & 1 == 1 {
            acc *= &base;
        }
        base = &base * &base;
        e >>= 1;
    }
    acc
}

/// `[t]_q = (1 - q^t) / (1 - q)`.
pub fn q_number(t: u32, q: &BigRational) -> BigRational {
    let one = BigRational::one();
    (&one - q_pow(q, t as i64)) / (&one - q)
}

/// `[n choose k]_q` over the shorter side, mirroring the float kernel.
pub fn q_binomial(n: u32, k: u32, q: &BigRational) -> BigRational {
    if k > n {
        return BigRational::zero();
    }
    let kk = k.min(n - k);
    let mut value = BigRational::one();
    for i in 1..=kk {
        value *= q_number(n - kk + i, q) / q_number(i, q);
    }
    value
}

/// Round an exact rational to the nearest-ish `f64` without overflowing the
/// conversion (numerator and denominator can be tens of kilobits wide).
pub fn to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let negative = r.is_negative();
    let num = r.numer().abs();
    let den = r.denom().abs();
    // Scale so the integer quotient carries ~64 significant bits.
    let shift = num.bits() as i64 - den.bits() as i64 - 64;
    let quotient: BigInt = if shift >= 0 {
        num / (den << shift as u64)
    } else {
        (num << (-shift) as u64) / den
    };
    let mut value = quotient_to_f64(&quotient) * 2f64.powi(shift as i32);
    if negative {
        value = -value;
    }
    value
}

fn quotient_to_f64(q: &BigInt) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().expect("<= 66-bit integer converts")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pow_handles_negative_exponents() {
        let q = rational_of(0.25);
        assert_eq!(to_f64(&q_pow(&q, 3)), 0.015625);
        assert_eq!(to_f64(&q_pow(&q, -3)), 64.0);
        assert_eq!(to_f64(&q_pow(&q, 0)), 1.0);
    }

    #[test]
    fn rational_q_binomial_matches_float_kernel() {
        use crate::param::QParam;
        use crate::qcore::{q_binomial as q_binomial_f64, QBase};
        for &qv in &[0.25, 0.5, 0.9] {
            let qp = QParam::with_default_policy(qv).unwrap();
            let q = rational_of(qv);
            for n in 0..=12u32 {
                for k in 0..=n {
                    let exact = to_f64(&q_binomial(n, k, &q));
                    let float = q_binomial_f64(n as i64, k as i64, &qp, QBase::Normal);
                    assert!(
                        (exact - float).abs() <= 1e-13 * float.max(1.0),
                        "q={qv} n={n} k={k}: {exact} vs {float}"
                    );
                }
            }
        }
    }

    #[test]
    fn conversion_survives_huge_intermediates() {
        let q = rational_of(0.25);
        // q^{-200} * q^{200} == 1 exactly
        let big = q_pow(&q, -200);
        let small = q_pow(&q, 200);
        assert_eq!(to_f64(&(&big * &small)), 1.0);
        assert!((to_f64(&big) - 0.25f64.powi(-200)).abs() / 0.25f64.powi(-200) < 1e-14);
    }
}
