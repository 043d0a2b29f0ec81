//! Named verification checks and the aggregate report they roll up into.

use serde::{Deserialize, Serialize};

/// Paired tolerances: relative in general, absolute when a side is zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Tolerance {
    pub fn new(rel: f64, abs: f64) -> Self {
        Self { rel, abs }
    }

    /// Relative tolerance with an absolute fallback three decades tighter.
    pub fn relative(rel: f64) -> Self {
        Self {
            rel,
            abs: rel * 1e-3,
        }
    }
}

/// One verification check: both sides of an asserted equality, the errors
/// between them, and the pass verdict.
///
/// `passed` holds `rel_err <= tol`, falling back to `abs_err <= abs_tol`
/// when either side is exactly zero (a relative error is meaningless there).
/// Informational checks are recorded with `asserted = false`; they never
/// gate an exit status.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub passed: bool,
    pub asserted: bool,
    pub params: String,
}

impl IdentityCheck {
    /// Compare `lhs` against `rhs` with a relative tolerance, switching to
    /// the absolute tolerance when either side is exactly zero.
    pub fn compare(
        name: impl Into<String>,
        lhs: f64,
        rhs: f64,
        tol: Tolerance,
        params: impl Into<String>,
    ) -> Self {
        let abs_err = (lhs - rhs).abs();
        let denom = lhs.abs().max(rhs.abs());
        let rel_err = if denom > 0.0 { abs_err / denom } else { 0.0 };
        let passed = if lhs == 0.0 || rhs == 0.0 {
            abs_err <= tol.abs
        } else {
            rel_err <= tol.rel
        };
        Self {
            name: name.into(),
            lhs,
            rhs,
            abs_err,
            rel_err,
            passed,
            asserted: true,
            params: params.into(),
        }
    }

    /// Record a check whose verdict was decided elsewhere (Monte Carlo
    /// sigma bands, boolean predicates, ...).
    pub fn with_verdict(
        name: impl Into<String>,
        lhs: f64,
        rhs: f64,
        passed: bool,
        params: impl Into<String>,
    ) -> Self {
        let abs_err = (lhs - rhs).abs();
        let denom = lhs.abs().max(rhs.abs());
        let rel_err = if denom > 0.0 { abs_err / denom } else { 0.0 };
        Self {
            name: name.into(),
            lhs,
            rhs,
            abs_err,
            rel_err,
            passed,
            asserted: true,
            params: params.into(),
        }
    }

    /// Mark the check as informational: reported, never asserted.
    pub fn informational(mut self) -> Self {
        self.asserted = false;
        self
    }
}

/// Pass/fail tallies over the asserted checks of a report.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: u64,
    pub passed: u64,
    pub failed: u64,
    pub informational: u64,
}

/// Report metadata: enough to reproduce the run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportMeta {
    pub version: String,
    pub command: String,
    pub parameters: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Wall-clock duration; omitted in reproducible mode so reruns are
    /// byte-identical.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u64>,
}

/// An ordered list of checks plus the summary the CLI reports and gates on.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub meta: ReportMeta,
    pub checks: Vec<IdentityCheck>,
    pub summary: Summary,
}

impl VerificationReport {
    pub fn new(meta: ReportMeta, checks: Vec<IdentityCheck>) -> Self {
        let mut summary = Summary::default();
        for check in &checks {
            if check.asserted {
                summary.total += 1;
                if check.passed {
                    summary.passed += 1;
                } else {
                    summary.failed += 1;
                }
            } else {
                summary.informational += 1;
            }
        }
        Self {
            meta,
            checks,
            summary,
        }
    }

    /// True when every asserted check passed.
    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: Tolerance = Tolerance {
        rel: 1e-9,
        abs: 1e-12,
    };

    #[test]
    fn compare_uses_relative_tolerance() {
        let c = IdentityCheck::compare("x", 1.0, 1.0 + 1e-12, TOL, "");
        assert!(c.passed);
        let c = IdentityCheck::compare("x", 1.0, 1.001, TOL, "");
        assert!(!c.passed);
    }

    #[test]
    fn compare_zero_side_uses_absolute_tolerance() {
        let c = IdentityCheck::compare("x", 0.0, 5e-13, TOL, "");
        assert!(c.passed);
        let c = IdentityCheck::compare("x", 0.0, 5e-12, TOL, "");
        assert!(!c.passed);
        let c = IdentityCheck::compare("x", 0.0, 0.0, TOL, "");
        assert!(c.passed);
        assert_eq!(c.rel_err, 0.0);
    }

    #[test]
    fn summary_counts_match_checks() {
        let checks = vec![
            IdentityCheck::compare("a", 1.0, 1.0, TOL, ""),
            IdentityCheck::compare("b", 1.0, 2.0, TOL, ""),
            IdentityCheck::compare("c", 1.0, 2.0, TOL, "").informational(),
        ];
        let meta = ReportMeta {
            version: "0".into(),
            command: "test".into(),
            parameters: String::new(),
            seed: None,
            wall_time_ms: None,
        };
        let report = VerificationReport::new(meta, checks);
        assert_eq!(report.summary.total, 2);
        assert_eq!(report.summary.passed, 1);
        assert_eq!(report.summary.failed, 1);
        assert_eq!(report.summary.informational, 1);
        assert!(!report.all_passed());
    }
}
