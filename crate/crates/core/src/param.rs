//! Deformation parameter, geometric grids, and truncation accounting.

use crate::error::{QError, Result};

/// Default relative threshold for truncating infinite products and sums.
pub const DEFAULT_EPS: f64 = 1e-15;
/// Default hard cap on truncation depth.
pub const DEFAULT_MAX_TERMS: usize = 400;

/// Validated deformation parameter `q` together with the truncation policy
/// applied to every infinite product or sum evaluated under it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QParam {
    q: f64,
    eps: f64,
    max_terms: usize,
}

impl QParam {
    /// Build a parameter set, rejecting `q` outside the open interval (0, 1),
    /// non-positive `eps`, and a zero term cap.
    pub fn new(q: f64, eps: f64, max_terms: usize) -> Result<Self> {
        if !q.is_finite() || q <= 0.0 || q >= 1.0 {
            return Err(QError::Domain(format!("q must lie in (0, 1), got {q}")));
        }
        if !eps.is_finite() || eps <= 0.0 {
            return Err(QError::Domain(format!("eps must be positive, got {eps}")));
        }
        if max_terms == 0 {
            return Err(QError::Domain("max_terms must be at least 1".into()));
        }
        Ok(Self { q, eps, max_terms })
    }

    /// Parameter set with the default truncation policy.
    pub fn with_default_policy(q: f64) -> Result<Self> {
        Self::new(q, DEFAULT_EPS, DEFAULT_MAX_TERMS)
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn max_terms(&self) -> usize {
        self.max_terms
    }

    /// Copy with a different term cap (used by the CLI override).
    pub fn with_max_terms(mut self, max_terms: usize) -> Result<Self> {
        if max_terms == 0 {
            return Err(QError::Domain("max_terms must be at least 1".into()));
        }
        self.max_terms = max_terms;
        Ok(self)
    }
}

/// The geometric division points `base * q^n` for `n = 0..=depth`.
///
/// These are the atoms of the Fermat measure on `[0, base]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QGrid {
    base: f64,
    depth: usize,
    points: Vec<f64>,
}

impl QGrid {
    pub fn new(base: f64, depth: usize, qp: &QParam) -> Result<Self> {
        if !base.is_finite() || base <= 0.0 {
            return Err(QError::Domain(format!("base must be positive, got {base}")));
        }
        let mut points = Vec::with_capacity(depth + 1);
        let mut x = base;
        for _ in 0..=depth {
            points.push(x);
            x *= qp.q();
        }
        Ok(Self {
            base,
            depth,
            points,
        })
    }

    pub fn base(&self) -> f64 {
        self.base
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Strictly decreasing points, `points[0] == base`.
    pub fn points(&self) -> &[f64] {
        &self.points
    }
}

/// A computed value together with an upper bound on the mass or terms
/// discarded when an infinite product or sum was truncated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationBound {
    pub value: f64,
    pub tail_bound: f64,
}

impl TruncationBound {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            tail_bound: 0.0,
        }
    }

    pub fn new(value: f64, tail_bound: f64) -> Self {
        debug_assert!(tail_bound >= 0.0 && tail_bound.is_finite());
        Self { value, tail_bound }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qparam_rejects_bad_q() {
        assert!(QParam::with_default_policy(0.0).is_err());
        assert!(QParam::with_default_policy(1.0).is_err());
        assert!(QParam::with_default_policy(-0.5).is_err());
        assert!(QParam::with_default_policy(1.5).is_err());
        assert!(QParam::with_default_policy(f64::NAN).is_err());
        assert!(QParam::with_default_policy(f64::INFINITY).is_err());
        assert!(QParam::with_default_policy(0.5).is_ok());
    }

    #[test]
    fn qparam_rejects_bad_policy() {
        assert!(QParam::new(0.5, 0.0, 100).is_err());
        assert!(QParam::new(0.5, -1e-9, 100).is_err());
        assert!(QParam::new(0.5, 1e-12, 0).is_err());
    }

    #[test]
    fn qgrid_points_decrease_geometrically() {
        let qp = QParam::with_default_policy(0.5).unwrap();
        let grid = QGrid::new(2.0, 4, &qp).unwrap();
        assert_eq!(grid.points(), &[2.0, 1.0, 0.5, 0.25, 0.125]);
        assert_eq!(grid.points()[0], grid.base());
        assert!(grid.points().windows(2).all(|w| w[0] > w[1] && w[1] > 0.0));
    }

    #[test]
    fn qgrid_rejects_nonpositive_base() {
        let qp = QParam::with_default_policy(0.5).unwrap();
        assert!(QGrid::new(0.0, 3, &qp).is_err());
        assert!(QGrid::new(-1.0, 3, &qp).is_err());
    }
}
