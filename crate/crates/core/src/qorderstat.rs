//! The q-uniform law and the distribution/density functions of q-ordered
//! random variables: generic formulas over an arbitrary CDF family and
//! closed q-uniform forms, with their normalization and consistency
//! verifiers.

mod closed;
mod family;
mod quniform;

pub use closed::{
    unif_joint_full_constant, unif_joint_full_pdf, unif_joint_full_pdf_masked, unif_joint_kr,
    unif_joint_kr_formal, unif_joint_kr_masked, unif_joint_minmax, unif_joint_minmax_formal,
    unif_joint_minmax_masked, unif_ord_cdf, unif_ord_pdf,
};
pub use family::{
    joint_kr_cdf_generic, joint_minmax_cdf_generic, ord_cdf_generic, CdfFamily, SupportPartition,
};
pub use quniform::QUniform;

use crate::error::{QError, Result};
use crate::param::QParam;
use crate::qcore::q_derivative;
use crate::report::{IdentityCheck, Tolerance};

/// Which univariate q-ordered statistic a formula refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderStatistic {
    Max,
    Min,
    /// The k-th q-ordered variable, `1 <= k <= nu`.
    Kth(u32),
}

/// Whether a joint formula is evaluated as a distribution or density.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JointKind {
    Cdf,
    Pdf,
}

/// Selects which order-statistic law to evaluate: sample size `nu`, rank
/// `k` (and optionally a second rank `r > k` for joint laws), and the
/// global scale `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderStatSpec {
    nu: u32,
    k: u32,
    r: Option<u32>,
    t: f64,
}

impl OrderStatSpec {
    pub fn new(nu: u32, k: u32, t: f64) -> Result<Self> {
        if nu < 1 {
            return Err(QError::Domain("nu must be at least 1".into()));
        }
        if k < 1 || k > nu {
            return Err(QError::Domain(format!("k = {k} outside 1..={nu}")));
        }
        if !t.is_finite() || t <= 0.0 {
            return Err(QError::Domain(format!("t must be positive, got {t}")));
        }
        Ok(Self { nu, k, r: None, t })
    }

    pub fn with_range(nu: u32, k: u32, r: u32, t: f64) -> Result<Self> {
        let mut spec = Self::new(nu, k, t)?;
        if r <= k || r > nu {
            return Err(QError::Domain(format!("r = {r} outside {}..={nu}", k + 1)));
        }
        spec.r = Some(r);
        Ok(spec)
    }

    pub fn nu(&self) -> u32 {
        self.nu
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn r(&self) -> Option<u32> {
        self.r
    }

    pub fn t(&self) -> f64 {
        self.t
    }
}

/// A candidate realization `(y_1, ..., y_nu)` of the q-ordered vector.
#[derive(Debug, Clone, PartialEq)]
pub struct QOrderedPoint {
    ys: Vec<f64>,
}

impl QOrderedPoint {
    pub fn new(ys: Vec<f64>) -> Result<Self> {
        if ys.is_empty() {
            return Err(QError::Domain(
                "point must have at least one coordinate".into(),
            ));
        }
        if ys.iter().any(|y| !y.is_finite()) {
            return Err(QError::Domain("point has a non-finite coordinate".into()));
        }
        Ok(Self { ys })
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn nu(&self) -> u32 {
        self.ys.len() as u32
    }
}

/// Whether a point satisfies the q-ordered interleaving chain
/// `0 <= y_1 < q y_2 < y_2 < ... < y_{nu-1} < q y_nu < y_nu <= t`,
/// with the inner inequalities strict as written.
///
/// Ties such as `y_1 = q y_2` fail; integration harnesses use the masked
/// evaluators, which work on the closure of this region so that boundary
/// atoms of the Fermat measure keep their mass.
pub fn support_check(point: &QOrderedPoint, t: f64, qp: &QParam) -> bool {
    let ys = point.ys();
    let q = qp.q();
    if ys[0] < 0.0 || *ys.last().expect("non-empty") > t {
        return false;
    }
    ys.windows(2).all(|w| w[0] < q * w[1])
}

/// Check `d_q F = f` over positive probes; the reported pair is the worst
/// probe by relative deviation.
pub fn dq_consistency_check<F, G>(
    cdf: F,
    pdf: G,
    probes: &[f64],
    qp: &QParam,
    tol: Tolerance,
) -> Result<IdentityCheck>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    if probes.is_empty() {
        return Err(QError::Domain("need at least one probe".into()));
    }
    let mut worst: Option<(f64, f64, f64)> = None;
    for &x in probes {
        if x <= 0.0 {
            return Err(QError::Domain(format!("probes must be positive, got {x}")));
        }
        let lhs = q_derivative(&cdf, x, qp)?;
        let rhs = pdf(x);
        let denom = lhs.abs().max(rhs.abs());
        let dev = if denom > 0.0 {
            (lhs - rhs).abs() / denom
        } else {
            0.0
        };
        if worst.is_none_or(|(w, _, _)| dev > w) {
            worst = Some((dev, lhs, rhs));
        }
    }
    let (_, lhs, rhs) = worst.expect("at least one probe");
    Ok(IdentityCheck::compare(
        "dq_consistency",
        lhs,
        rhs,
        tol,
        format!("probes={} q={}", probes.len(), qp.q()),
    ))
}

/// Check the mixed double q-difference of a bivariate CDF against its
/// density: `(d_{q,z} d_{q,y} F)(y, z) = f(y, z)`.
///
/// The caller supplies the formal (unguarded) CDF so the shifted points
/// `(qy, z)`, `(y, qz)`, `(qy, qz)` can be evaluated even when they leave
/// the stated support region; the identity holds as rational functions.
pub fn dq2_consistency_check<F, G>(
    cdf: F,
    pdf: G,
    probes: &[(f64, f64)],
    qp: &QParam,
    tol: Tolerance,
) -> Result<IdentityCheck>
where
    F: Fn(f64, f64) -> f64,
    G: Fn(f64, f64) -> f64,
{
    if probes.is_empty() {
        return Err(QError::Domain("need at least one probe".into()));
    }
    let q = qp.q();
    let mut worst: Option<(f64, f64, f64)> = None;
    for &(y, z) in probes {
        if y <= 0.0 || z <= 0.0 {
            return Err(QError::Domain(format!(
                "probes must be positive, got ({y}, {z})"
            )));
        }
        let diff = cdf(y, z) - cdf(q * y, z) - cdf(y, q * z) + cdf(q * y, q * z);
        let lhs = diff / ((1.0 - q) * y * (1.0 - q) * z);
        let rhs = pdf(y, z);
        let denom = lhs.abs().max(rhs.abs());
        let dev = if denom > 0.0 {
            (lhs - rhs).abs() / denom
        } else {
            0.0
        };
        if worst.is_none_or(|(w, _, _)| dev > w) {
            worst = Some((dev, lhs, rhs));
        }
    }
    let (_, lhs, rhs) = worst.expect("at least one probe");
    Ok(IdentityCheck::compare(
        "dq2_consistency",
        lhs,
        rhs,
        tol,
        format!("probes={} q={}", probes.len(), qp.q()),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qp(q: f64) -> QParam {
        QParam::with_default_policy(q).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(OrderStatSpec::new(0, 1, 1.0).is_err());
        assert!(OrderStatSpec::new(3, 0, 1.0).is_err());
        assert!(OrderStatSpec::new(3, 4, 1.0).is_err());
        assert!(OrderStatSpec::new(3, 2, 0.0).is_err());
        assert!(OrderStatSpec::with_range(3, 2, 2, 1.0).is_err());
        assert!(OrderStatSpec::with_range(3, 2, 4, 1.0).is_err());
        assert!(OrderStatSpec::with_range(3, 1, 3, 1.0).is_ok());
    }

    #[test]
    fn support_check_examples() {
        let p = qp(0.5);
        // single coordinate: the chain is empty
        let pt = QOrderedPoint::new(vec![0.7]).unwrap();
        assert!(support_check(&pt, 1.0, &p));
        let pt = QOrderedPoint::new(vec![1.2]).unwrap();
        assert!(!support_check(&pt, 1.0, &p));
        // 0.1 < 0.5 * 0.3
        let pt = QOrderedPoint::new(vec![0.1, 0.3]).unwrap();
        assert!(support_check(&pt, 1.0, &p));
        // 0.2 >= 0.15
        let pt = QOrderedPoint::new(vec![0.2, 0.3]).unwrap();
        assert!(!support_check(&pt, 1.0, &p));
        // ties fail (strict inequality)
        let pt = QOrderedPoint::new(vec![0.15, 0.3]).unwrap();
        assert!(!support_check(&pt, 1.0, &p));
        assert!(QOrderedPoint::new(vec![f64::NAN]).is_err());
        assert!(QOrderedPoint::new(vec![]).is_err());
    }

    #[test]
    fn dq_check_flags_mismatched_pair() {
        let p = qp(0.5);
        let tol = Tolerance::relative(1e-10);
        let probes: Vec<f64> = (1..=20).map(|i| i as f64 / 20.0).collect();
        let good = dq_consistency_check(|x| x * x, |x| 1.5 * x, &probes, &p, tol).unwrap();
        assert!(good.passed);
        let bad = dq_consistency_check(|x| x * x, |x| 1.6 * x, &probes, &p, tol).unwrap();
        assert!(!bad.passed);
        assert!(dq_consistency_check(|x| x, |_| 1.0, &[0.0], &p, tol).is_err());
    }
}
