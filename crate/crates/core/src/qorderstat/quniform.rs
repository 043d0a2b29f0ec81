//! The q-uniform distribution on `[0, beta]`.
//!
//! Under the Fermat measure the law places atom `(1-q) q^n` at `beta q^n`,
//! so sampling reduces to a geometric index draw.

use rand::Rng;

use crate::error::{QError, Result};
use crate::param::QParam;
use crate::qcore::q_number;
use crate::report::IdentityCheck;

/// q-uniform distribution: constant q-density `1/beta` on `[0, beta]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QUniform {
    beta: f64,
    qp: QParam,
}

impl QUniform {
    pub fn new(beta: f64, qp: QParam) -> Result<Self> {
        if !beta.is_finite() || beta <= 0.0 {
            return Err(QError::Domain(format!("beta must be positive, got {beta}")));
        }
        Ok(Self { beta, qp })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn qp(&self) -> &QParam {
        &self.qp
    }

    /// `1/beta` on `[0, beta]` (both endpoints included), zero outside.
    pub fn pdf(&self, x: f64) -> f64 {
        if (0.0..=self.beta).contains(&x) {
            1.0 / self.beta
        } else {
            0.0
        }
    }

    /// `clamp(x / beta, 0, 1)`.
    pub fn cdf(&self, x: f64) -> f64 {
        (x / self.beta).clamp(0.0, 1.0)
    }

    /// The r-th q-moment `beta^r / [r+1]_q`.
    pub fn moment(&self, r: u32) -> f64 {
        self.beta.powi(r as i32) / q_number(r + 1, &self.qp)
    }

    /// The q-variance `beta^2 q / ((1 + q + q^2)(1 + q)^2)`.
    pub fn variance(&self) -> f64 {
        let q = self.qp.q();
        self.beta * self.beta * q / ((1.0 + q + q * q) * (1.0 + q) * (1.0 + q))
    }

    /// Draw `beta q^N` with `N` geometric of success probability `1 - q`,
    /// matching the Fermat atoms exactly: every sample is some `beta q^n`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let q = self.qp.q();
        // u in (0, 1]; N = n iff q^{n+1} < u <= q^n
        let u = 1.0 - rng.gen::<f64>();
        let n = (u.ln() / q.ln()).floor().max(0.0);
        self.beta * q.powi(n as i32)
    }

    /// Probability-integral-transform check: `F(F^{-1}(y)) = y` at the
    /// probes, passing when the worst absolute error is at most 1e-12.
    pub fn pit_check(&self, probe_ys: &[f64]) -> Result<IdentityCheck> {
        if probe_ys.is_empty() {
            return Err(QError::Domain("need at least one probe".into()));
        }
        let mut worst: Option<(f64, f64, f64)> = None;
        for &y in probe_ys {
            if !(0.0..=1.0).contains(&y) {
                return Err(QError::Domain(format!("probe {y} outside [0, 1]")));
            }
            let composed = self.cdf(self.beta * y);
            let err = (composed - y).abs();
            if worst.is_none_or(|(w, _, _)| err > w) {
                worst = Some((err, composed, y));
            }
        }
        let (err, lhs, rhs) = worst.expect("at least one probe");
        Ok(IdentityCheck::with_verdict(
            "probability_integral_transform",
            lhs,
            rhs,
            err <= 1e-12,
            format!(
                "beta={} q={} probes={}",
                self.beta,
                self.qp.q(),
                probe_ys.len()
            ),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn dist(beta: f64, q: f64) -> QUniform {
        QUniform::new(beta, QParam::with_default_policy(q).unwrap()).unwrap()
    }

    #[test]
    fn pdf_cdf_basics() {
        let d = dist(2.0, 0.5);
        assert_eq!(d.pdf(1.0), 0.5);
        assert_eq!(d.pdf(-1.0), 0.0);
        assert_eq!(d.pdf(2.0), 0.5);
        assert_eq!(d.pdf(2.1), 0.0);
        assert_eq!(d.cdf(0.0), 0.0);
        assert_eq!(d.cdf(3.0), 1.0);
        let d = dist(1.0, 0.5);
        assert!((d.cdf(0.25) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn moments_match_hand_values() {
        let d = dist(1.0, 0.5);
        assert_eq!(d.moment(0), 1.0);
        assert!((d.moment(1) - 2.0 / 3.0).abs() < 1e-15);
        // 0.5 / (1.75 * 2.25)
        assert!((d.variance() - 0.12698412698412698).abs() < 1e-15);
        // variance must equal mu_2 - mu_1^2
        for &q in &[0.25, 0.5, 0.9] {
            let d = dist(1.7, q);
            let direct = d.moment(2) - d.moment(1) * d.moment(1);
            assert!((d.variance() - direct).abs() < 1e-12 * direct.abs());
        }
    }

    #[test]
    fn rejects_bad_beta() {
        let qp = QParam::with_default_policy(0.5).unwrap();
        assert!(QUniform::new(0.0, qp).is_err());
        assert!(QUniform::new(-2.0, qp).is_err());
        assert!(QUniform::new(f64::INFINITY, qp).is_err());
    }

    #[test]
    fn samples_live_on_the_geometric_grid() {
        let d = dist(1.5, 0.5);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..2000 {
            let x = d.sample(&mut rng);
            // x = 1.5 * 0.5^n exactly for some n >= 0
            let n = -(x / 1.5).log2().round() as i32;
            assert!(n >= 0);
            assert_eq!(x, 1.5 * 0.5f64.powi(n), "x={x} n={n}");
        }
    }

    #[test]
    fn small_q_concentrates_at_beta() {
        let d = dist(1.0, 0.01);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 100_000;
        let at_beta = (0..n).filter(|_| d.sample(&mut rng) == 1.0).count();
        let frac = at_beta as f64 / n as f64;
        assert!((frac - 0.99).abs() < 0.005, "frac={frac}");
    }

    #[test]
    fn sample_mean_matches_first_moment() {
        let d = dist(1.0, 0.5);
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let n = 1_000_000u64;
        let mean = (0..n).map(|_| d.sample(&mut rng)).sum::<f64>() / n as f64;
        let se = (d.variance() / n as f64).sqrt();
        assert!(
            (mean - d.moment(1)).abs() < 4.0 * se,
            "mean={mean} expected={} se={se}",
            d.moment(1)
        );
    }

    #[test]
    fn pit_is_identity() {
        let d = dist(2.7, 0.35);
        let probes: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
        let check = d.pit_check(&probes).unwrap();
        assert!(check.passed);
        assert!(d.pit_check(&[1.5]).is_err());
        assert!(d.pit_check(&[]).is_err());
    }
}
