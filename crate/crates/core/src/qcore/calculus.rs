//! The q-difference operator and Jackson/Fermat q-integration, including
//! iterated integrals over nested scalar-multiple regions.

use crate::error::{QError, Result};
use crate::param::{QParam, TruncationBound};

/// The q-difference operator `d_q f(x) = (f(x) - f(qx)) / ((1-q) x)`.
///
/// Undefined at `x = 0`; no limit is taken there.
pub fn q_derivative<F: Fn(f64) -> f64>(f: F, x: f64, qp: &QParam) -> Result<f64> {
    if x == 0.0 {
        return Err(QError::Domain("q-derivative is undefined at x = 0".into()));
    }
    if !x.is_finite() {
        return Err(QError::Domain(format!("x must be finite, got {x}")));
    }
    let q = qp.q();
    Ok((f(x) - f(q * x)) / ((1.0 - q) * x))
}

/// Fermat sum for `int_0^upper f(x) d_q x = sum_n upper (q^n - q^{n+1}) f(upper q^n)`.
///
/// Truncates when two consecutive terms fall below `eps` times the running
/// scale (consecutive, because integrands of order-statistic densities vanish
/// at leading grid atoms), or at `max_terms`. The tail estimate continues the
/// last atom geometrically with ratio `q`.
fn fermat_sum<F: Fn(f64) -> f64>(f: &F, upper: f64, qp: &QParam) -> Result<TruncationBound> {
    if upper == 0.0 {
        return Ok(TruncationBound::exact(0.0));
    }
    let q = qp.q();
    let eps = qp.eps();
    let mut sum = 0.0;
    let mut scale: f64 = 0.0;
    let mut small_run = 0usize;
    let mut point = upper;
    let mut weight = upper * (1.0 - q);
    let mut last_term: f64 = 0.0;
    for _ in 0..qp.max_terms() {
        let term = weight * f(point);
        if !term.is_finite() {
            return Err(QError::Numeric(format!(
                "non-finite q-integral term at x = {point}"
            )));
        }
        sum += term;
        last_term = term;
        scale = scale.max(term.abs()).max(sum.abs());
        if scale > 0.0 && term.abs() <= eps * scale {
            small_run += 1;
            if small_run >= 2 {
                break;
            }
        } else {
            small_run = 0;
        }
        point *= q;
        weight *= q;
    }
    let tail = last_term.abs() * q / (1.0 - q);
    Ok(TruncationBound::new(sum, tail))
}

/// Jackson q-integral of `f` over `[a, b]`, or over `[0, infinity)` when `b`
/// is `f64::INFINITY`.
///
/// `[0, b]` is the Fermat sum; `[a, b]` with `a > 0` is the difference of two
/// such sums; the improper integral uses the bilateral division points `q^n`
/// with symmetric depth `max_terms / 2`.
pub fn q_integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    qp: &QParam,
) -> Result<TruncationBound> {
    if a.is_nan() || b.is_nan() || a < 0.0 {
        return Err(QError::Domain(format!(
            "invalid integration limits [{a}, {b}]"
        )));
    }
    if b == f64::INFINITY {
        if a != 0.0 {
            return Err(QError::Domain(
                "improper q-integral requires lower limit 0".into(),
            ));
        }
        return q_integrate_halfline(&f, qp);
    }
    if a > b {
        return Err(QError::Domain(format!(
            "lower limit {a} exceeds upper limit {b}"
        )));
    }
    let upper = fermat_sum(&f, b, qp)?;
    if a == 0.0 {
        return Ok(upper);
    }
    let lower = fermat_sum(&f, a, qp)?;
    Ok(TruncationBound::new(
        upper.value - lower.value,
        upper.tail_bound + lower.tail_bound,
    ))
}

fn q_integrate_halfline<F: Fn(f64) -> f64>(f: &F, qp: &QParam) -> Result<TruncationBound> {
    let q = qp.q();
    let depth = (qp.max_terms() / 2).max(1) as i32;
    let mut sum = 0.0;
    let mut edge_small = 0.0f64;
    let mut edge_large = 0.0f64;
    for n in -depth..=depth {
        let x = q.powi(n);
        let term = (1.0 - q) * x * f(x);
        if !term.is_finite() {
            return Err(QError::Numeric(format!(
                "non-finite q-integral term at x = {x}"
            )));
        }
        sum += term;
        if n == depth {
            edge_small = term.abs();
        }
        if n == -depth {
            edge_large = term.abs();
        }
    }
    let tail = (edge_small + edge_large) * q / (1.0 - q);
    Ok(TruncationBound::new(sum, tail))
}

/// One integration limit of a nested region: either a constant or a scalar
/// multiple of an already-bound outer variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Limit {
    Const(f64),
    /// `scale * vars[var]`, where `var` indexes an outer (previously bound)
    /// integration variable; `0` is the outermost.
    ScaledVar {
        var: usize,
        scale: f64,
    },
}

/// A nested integration region `[0, L_0] x [0, L_1(x_0)] x ...`, outermost
/// limit first. Every inner limit is constant or a scalar multiple of an
/// outer variable, which covers all regions appearing in the joint
/// normalizations (upper limits like `q^{r-k} z` and `q y_{j+1}`).
#[derive(Debug, Clone, PartialEq)]
pub struct NestedRegion {
    limits: Vec<Limit>,
}

impl NestedRegion {
    pub fn new(limits: Vec<Limit>) -> Result<Self> {
        if limits.is_empty() {
            return Err(QError::UnsupportedRegion(
                "region must have d >= 1 levels".into(),
            ));
        }
        for (level, limit) in limits.iter().enumerate() {
            match *limit {
                Limit::Const(c) => {
                    if !c.is_finite() || c < 0.0 {
                        return Err(QError::UnsupportedRegion(format!(
                            "constant limit at level {level} must be finite and nonnegative, got {c}"
                        )));
                    }
                }
                Limit::ScaledVar { var, scale } => {
                    if var >= level {
                        return Err(QError::UnsupportedRegion(format!(
                            "limit at level {level} references variable {var}, which is not outer to it"
                        )));
                    }
                    if !scale.is_finite() || scale < 0.0 {
                        return Err(QError::UnsupportedRegion(format!(
                            "scale at level {level} must be finite and nonnegative, got {scale}"
                        )));
                    }
                }
            }
        }
        Ok(Self { limits })
    }

    pub fn dimension(&self) -> usize {
        self.limits.len()
    }

    fn resolve(&self, level: usize, vars: &[f64]) -> f64 {
        match self.limits[level] {
            Limit::Const(c) => c,
            Limit::ScaledVar { var, scale } => scale * vars[var],
        }
    }
}

/// Iterated Fermat sums over a [`NestedRegion`], outermost level first.
///
/// `f` receives the bound variables in the same order as the region's
/// limits (outermost first). The combined tail bound adds each level's
/// geometric tail estimate, weighted by the atoms above it.
pub fn q_integrate_nested<F: Fn(&[f64]) -> f64>(
    f: F,
    region: &NestedRegion,
    qp: &QParam,
) -> Result<TruncationBound> {
    let mut vars = vec![0.0; region.dimension()];
    nested_level(&f, region, qp, 0, &mut vars)
}

fn nested_level<F: Fn(&[f64]) -> f64>(
    f: &F,
    region: &NestedRegion,
    qp: &QParam,
    level: usize,
    vars: &mut Vec<f64>,
) -> Result<TruncationBound> {
    let upper = region.resolve(level, vars);
    if upper == 0.0 {
        return Ok(TruncationBound::exact(0.0));
    }
    let q = qp.q();
    let eps = qp.eps();
    let last = level + 1 == region.dimension();
    let mut sum = 0.0;
    let mut tail_acc = 0.0;
    let mut scale: f64 = 0.0;
    let mut small_run = 0usize;
    let mut point = upper;
    let mut weight = upper * (1.0 - q);
    let mut last_term: f64 = 0.0;
    for _ in 0..qp.max_terms() {
        vars[level] = point;
        let (fval, child_tail) = if last {
            (f(vars), 0.0)
        } else {
            let inner = nested_level(f, region, qp, level + 1, vars)?;
            (inner.value, inner.tail_bound)
        };
        let term = weight * fval;
        if !term.is_finite() {
            return Err(QError::Numeric(format!(
                "non-finite nested q-integral term at level {level}, x = {point}"
            )));
        }
        sum += term;
        tail_acc += weight * child_tail;
        last_term = term;
        scale = scale.max(term.abs()).max(sum.abs());
        if scale > 0.0 && term.abs() <= eps * scale {
            small_run += 1;
            if small_run >= 2 {
                break;
            }
        } else {
            small_run = 0;
        }
        point *= q;
        weight *= q;
    }
    vars[level] = 0.0;
    let tail = tail_acc + last_term.abs() * q / (1.0 - q);
    Ok(TruncationBound::new(sum, tail))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::param::QParam;

    fn qp(q: f64) -> QParam {
        QParam::with_default_policy(q).unwrap()
    }

    #[test]
    fn derivative_of_constant_vanishes() {
        let p = qp(0.5);
        for &x in &[0.2, 1.0, 3.5] {
            assert_eq!(q_derivative(|_| 4.2, x, &p).unwrap(), 0.0);
        }
    }

    #[test]
    fn derivative_of_square_gives_q_number() {
        let p = qp(0.5);
        // (1 - q^2)/(1 - q) = [2]_q = 1.5 at x = 1
        let d = q_derivative(|x| x * x, 1.0, &p).unwrap();
        assert!((d - 1.5).abs() < 1e-15);
    }

    #[test]
    fn derivative_rejects_origin() {
        let p = qp(0.5);
        assert!(q_derivative(|x| x, 0.0, &p).is_err());
    }

    #[test]
    fn derivative_of_monomials_matches_q_numbers() {
        use crate::qcore::arith::q_number;
        let p = qp(0.35);
        let mut x = 0.013;
        for n in 1..=6u32 {
            for i in 0..100 {
                let probe = 0.02 + (x * 997.0 + i as f64 * 0.019).fract() * 1.98;
                let d = q_derivative(|v| v.powi(n as i32), probe, &p).unwrap();
                let expect = q_number(n, &p) * probe.powi(n as i32 - 1);
                assert!(
                    ((d - expect) / expect).abs() < 1e-10,
                    "n={n} x={probe} d={d} expect={expect}"
                );
                x = probe;
            }
        }
    }

    #[test]
    fn integral_of_one_telescopes() {
        let p = qp(0.5);
        for &beta in &[0.5, 1.0, 3.0] {
            let r = q_integrate(|_| 1.0, 0.0, beta, &p).unwrap();
            assert!(
                (r.value - beta).abs() < 1e-12,
                "beta={beta} got {}",
                r.value
            );
        }
    }

    #[test]
    fn integral_of_monomials_matches_moment_formula() {
        use crate::qcore::arith::q_number;
        for &q in &[0.25, 0.5, 0.9] {
            let p = qp(q);
            for n in 0..=10u32 {
                for &beta in &[0.5, 1.0, 3.0] {
                    let r = q_integrate(|x| x.powi(n as i32), 0.0, beta, &p).unwrap();
                    let expect = beta.powi(n as i32 + 1) / q_number(n + 1, &p);
                    assert!(
                        ((r.value - expect) / expect).abs() < 1e-10,
                        "q={q} n={n} beta={beta}"
                    );
                }
            }
        }
    }

    #[test]
    fn integral_linear_on_unit_interval() {
        let p = qp(0.5);
        // geometric series (1-q)/(1-q^2) = 2/3
        let r = q_integrate(|x| x, 0.0, 1.0, &p).unwrap();
        assert!((r.value - 2.0 / 3.0).abs() < 1e-13);
        let r = q_integrate(|x| x * x, 0.0, 1.0, &p).unwrap();
        assert!((r.value - 1.0 / 1.75).abs() < 1e-13);
    }

    #[test]
    fn integral_interval_difference() {
        let p = qp(0.5);
        let whole = q_integrate(|x| x, 0.0, 1.0, &p).unwrap().value;
        let left = q_integrate(|x| x, 0.0, 0.25, &p).unwrap().value;
        let right = q_integrate(|x| x, 0.25, 1.0, &p).unwrap().value;
        assert!((left + right - whole).abs() < 1e-13);
        assert!(q_integrate(|x| x, 1.0, 0.5, &p).is_err());
    }

    #[test]
    fn halfline_matches_truncated_support() {
        let p = qp(0.5);
        // indicator-restricted monomial: halfline sum must reduce to [0,1]
        let r = q_integrate(
            |x| if x <= 1.0 { x * x } else { 0.0 },
            0.0,
            f64::INFINITY,
            &p,
        )
        .unwrap();
        let expect = q_integrate(|x| x * x, 0.0, 1.0, &p).unwrap().value;
        assert!((r.value - expect).abs() < 1e-12);
        assert!(q_integrate(|x| x, 0.5, f64::INFINITY, &p).is_err());
    }

    #[test]
    fn nested_constant_over_scaled_region() {
        let p = qp(0.5);
        // int_0^1 int_0^{q z} 1 = q / [2]_q = 1/3
        let region = NestedRegion::new(vec![
            Limit::Const(1.0),
            Limit::ScaledVar { var: 0, scale: 0.5 },
        ])
        .unwrap();
        let r = q_integrate_nested(|_| 1.0, &region, &p).unwrap();
        assert!((r.value - 1.0 / 3.0).abs() < 1e-12, "got {}", r.value);
    }

    #[test]
    fn nested_empty_region_is_zero() {
        let p = qp(0.5);
        let region = NestedRegion::new(vec![Limit::Const(0.0), Limit::Const(1.0)]).unwrap();
        let r = q_integrate_nested(|_| 1.0, &region, &p).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn nested_rejects_malformed_regions() {
        assert!(NestedRegion::new(vec![]).is_err());
        assert!(NestedRegion::new(vec![Limit::ScaledVar { var: 0, scale: 1.0 }]).is_err());
        assert!(NestedRegion::new(vec![
            Limit::Const(1.0),
            Limit::ScaledVar { var: 1, scale: 1.0 },
        ])
        .is_err());
        assert!(NestedRegion::new(vec![Limit::Const(-1.0)]).is_err());
    }

    #[test]
    fn integrand_vanishing_on_leading_atoms_is_not_truncated_early() {
        // f vanishes at the first two grid atoms of [0, 1]; the sum must keep
        // going and recover the full mass of the remaining atoms.
        let p = qp(0.5);
        let f = |x: f64| if x > 0.26 { 0.0 } else { 1.0 };
        let r = q_integrate(f, 0.0, 1.0, &p).unwrap();
        // atoms at 1, 0.5 excluded; remaining mass = 0.25
        assert!((r.value - 0.25).abs() < 1e-12, "got {}", r.value);
    }
}
