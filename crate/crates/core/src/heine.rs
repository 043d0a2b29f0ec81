//! The Heine process: per-interval arrival probabilities on the geometric
//! time partition, the Heine pmf with a Poisson-binomial dynamic-programming
//! oracle, simulation, and the conditional waiting-time checks.

use rand::Rng;

use crate::error::{QError, Result};
use crate::param::{QParam, TruncationBound};
use crate::qcore::{q_exponential, q_factorial};
use crate::report::IdentityCheck;

/// Arrival intensity, horizon, deformation/truncation policy, and the number
/// of geometric intervals a simulation resolves.
///
/// Interval `k` is `(q^k t, q^{k-1} t]`, of length `(1-q) q^{k-1} t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeineParams {
    lambda: f64,
    t: f64,
    qp: QParam,
    depth: u32,
}

impl HeineParams {
    pub fn new(lambda: f64, t: f64, qp: QParam, depth: u32) -> Result<Self> {
        if !lambda.is_finite() || lambda <= 0.0 {
            return Err(QError::Domain(format!(
                "lambda must be positive, got {lambda}"
            )));
        }
        if !t.is_finite() || t <= 0.0 {
            return Err(QError::Domain(format!("t must be positive, got {t}")));
        }
        if depth < 1 {
            return Err(QError::Domain("depth must be at least 1".into()));
        }
        Ok(Self {
            lambda,
            t,
            qp,
            depth,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn qp(&self) -> &QParam {
        &self.qp
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    /// Length `(1-q) q^{k-1} t` of interval `k` (1-based).
    pub fn interval_length(&self, k: u32) -> f64 {
        let q = self.qp.q();
        (1.0 - q) * q.powi(k as i32 - 1) * self.t
    }

    /// Upper bound on the probability of any arrival below depth `d`:
    /// the geometric estimate `lambda t q^d`.
    pub fn tail_mass_below(&self, d: u32) -> f64 {
        (self.lambda * self.t * self.qp.q().powi(d as i32)).min(1.0)
    }
}

/// Smallest depth for which the arrival mass below it is under `tail_tol`
/// (never below 1, capped at 100_000).
pub fn required_depth(lambda: f64, t: f64, q: f64, tail_tol: f64) -> u32 {
    let lt = lambda * t;
    if lt <= tail_tol {
        return 1;
    }
    let d = ((tail_tol / lt).ln() / q.ln()).ceil();
    (d.max(1.0) as u32).min(100_000)
}

/// Outcome of one simulation: the per-interval arrival indicators for
/// intervals `1..=depth` plus the unresolved tail mass below the last one.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrivalRecord {
    arrivals: Vec<bool>,
    count: u32,
    tail_mass: f64,
}

impl ArrivalRecord {
    /// Arrival indicator for interval `k` (1-based).
    pub fn arrived(&self, k: u32) -> bool {
        self.arrivals[k as usize - 1]
    }

    pub fn arrivals(&self) -> &[bool] {
        &self.arrivals
    }

    pub fn count(&self) -> u32 {
        self.count
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }
}

/// Probability of one arrival in interval `k`:
/// `lambda (1-q) q^{k-1} t / (1 + lambda (1-q) q^{k-1} t)`.
pub fn interval_arrival_prob(k: u32, hp: &HeineParams) -> f64 {
    debug_assert!(k >= 1);
    let x = hp.lambda * (1.0 - hp.qp.q()) * hp.qp.q().powi(k as i32 - 1) * hp.t;
    x / (1.0 + x)
}

/// The Heine pmf `P(X(t) = k) = e_q(-lambda t) q^{binom(k,2)} (lambda t)^k / [k]_q!`,
/// carrying the q-exponential's truncation bound.
pub fn heine_pmf(k: u32, hp: &HeineParams) -> Result<TruncationBound> {
    let q = hp.qp.q();
    let lt = hp.lambda * hp.t;
    let e = q_exponential(-lt, &hp.qp)?;
    let binom2 = (k as i64 * (k as i64 - 1) / 2) as i32;
    let rest = q.powi(binom2) * lt.powi(k as i32) / q_factorial(k, &hp.qp);
    Ok(TruncationBound::new(e.value * rest, e.tail_bound * rest))
}

/// Exact distribution of the arrival count over intervals `1..=depth`,
/// computed by Poisson-binomial dynamic programming.
#[derive(Debug, Clone, PartialEq)]
pub struct DpPmf {
    probs: Vec<f64>,
    tail_mass: f64,
}

impl DpPmf {
    /// `P(count = k)` for `k <= kmax`; zero beyond the stored range.
    pub fn prob(&self, k: u32) -> f64 {
        self.probs.get(k as usize).copied().unwrap_or(0.0)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Upper bound on the arrival mass the truncated depth cannot see; the
    /// oracle is only as good as this is small.
    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }
}

/// Poisson-binomial oracle for the Heine pmf: the count over intervals
/// `1..=depth` with success probabilities [`interval_arrival_prob`].
///
/// The full distribution is carried through the recurrence (so it sums to 1
/// exactly up to float) and truncated to `kmax` on return. An insufficient
/// depth is reported through [`DpPmf::tail_mass`], not as an error.
pub fn pmf_oracle_dp(hp: &HeineParams, kmax: u32) -> DpPmf {
    let depth = hp.depth as usize;
    let mut dist = vec![0.0f64; depth + 1];
    dist[0] = 1.0;
    let q = hp.qp.q();
    let mut x = hp.lambda * (1.0 - q) * hp.t;
    for k in 1..=depth {
        let p = x / (1.0 + x);
        for j in (1..=k).rev() {
            dist[j] = dist[j] * (1.0 - p) + dist[j - 1] * p;
        }
        dist[0] *= 1.0 - p;
        x *= q;
    }
    dist.truncate(kmax as usize + 1);
    DpPmf {
        probs: dist,
        tail_mass: hp.tail_mass_below(hp.depth),
    }
}

/// Simulate one run: an independent Bernoulli per interval.
pub fn simulate<R: Rng + ?Sized>(hp: &HeineParams, rng: &mut R) -> ArrivalRecord {
    let q = hp.qp.q();
    let mut arrivals = Vec::with_capacity(hp.depth as usize);
    let mut count = 0u32;
    let mut x = hp.lambda * (1.0 - q) * hp.t;
    for _ in 0..hp.depth {
        let hit = rng.gen::<f64>() < x / (1.0 + x);
        arrivals.push(hit);
        count += hit as u32;
        x *= q;
    }
    ArrivalRecord {
        arrivals,
        count,
        tail_mass: hp.tail_mass_below(hp.depth),
    }
}

/// Allocation-free simulation summary for the Monte Carlo harnesses:
/// the total count and how many of the first `prefix` intervals arrived.
pub(crate) fn simulate_summary<R: Rng + ?Sized>(
    hp: &HeineParams,
    prefix: u32,
    rng: &mut R,
) -> (u32, u32) {
    let q = hp.qp.q();
    let mut count = 0u32;
    let mut prefix_hits = 0u32;
    let mut x = hp.lambda * (1.0 - q) * hp.t;
    for k in 1..=hp.depth {
        let hit = rng.gen::<f64>() < x / (1.0 + x);
        count += hit as u32;
        if k <= prefix {
            prefix_hits += hit as u32;
        }
        x *= q;
    }
    (count, prefix_hits)
}

/// Exact probability, given `X(t) = nu`, of the waiting-time configuration
/// event: one arrival in each of intervals `1..=nu` and none below.
///
/// Computed from the interval probabilities and the pmf as
/// `e_q(-lambda q^nu t) prod_{k<=nu} p_k / P(X(t) = nu)`; the algebra
/// collapses to `[nu]_q! (1-q)^nu`, independent of `lambda` and `t`, which
/// the verification suite asserts.
pub fn conditional_config_probability(nu: u32, hp: &HeineParams) -> Result<f64> {
    if nu < 1 {
        return Err(QError::Domain("nu must be at least 1".into()));
    }
    if nu >= hp.depth {
        return Err(QError::Size(format!(
            "nu = {nu} must be below the simulation depth {}",
            hp.depth
        )));
    }
    let q = hp.qp.q();
    let below = q_exponential(-hp.lambda * q.powi(nu as i32) * hp.t, &hp.qp)?;
    let mut numerator = below.value;
    for k in 1..=nu {
        numerator *= interval_arrival_prob(k, hp);
    }
    let denominator = heine_pmf(nu, hp)?;
    if denominator.value <= 0.0 {
        return Err(QError::Numeric(format!("P(X(t) = {nu}) vanished")));
    }
    Ok(numerator / denominator.value)
}

/// The conditional waiting-time density value `[nu]_q! / (q^{binom(nu,2)} t^nu)`,
/// the same constant as the full ordered q-uniform joint density.
pub fn conditional_density_value(nu: u32, hp: &HeineParams) -> f64 {
    let binom2 = (nu as i64 * (nu as i64 - 1) / 2) as i32;
    q_factorial(nu, &hp.qp) / (hp.qp.q().powi(binom2) * hp.t.powi(nu as i32))
}

/// The box measure `prod_{j=0}^{nu-1} (1-q) q^j t` of the configuration
/// event's interval product; density times box equals the configuration
/// probability.
pub fn configuration_box_measure(nu: u32, hp: &HeineParams) -> f64 {
    let q = hp.qp.q();
    (0..nu)
        .map(|j| (1.0 - q) * q.powi(j as i32) * hp.t)
        .product()
}

/// Monte Carlo check of the conditional configuration probability by
/// rejection on `count == nu`; passes within four binomial standard errors.
pub fn conditional_mc_check<R: Rng + ?Sized>(
    nu: u32,
    hp: &HeineParams,
    trials: u64,
    rng: &mut R,
) -> Result<IdentityCheck> {
    if trials < 10_000 {
        return Err(QError::Domain(format!(
            "need at least 10^4 trials, got {trials}"
        )));
    }
    let expected = conditional_config_probability(nu, hp)?;
    let mut accepted = 0u64;
    let mut hits = 0u64;
    for _ in 0..trials {
        let (count, prefix_hits) = simulate_summary(hp, nu, rng);
        if count == nu {
            accepted += 1;
            // count == nu with nu prefix hits is exactly the configuration
            if prefix_hits == nu {
                hits += 1;
            }
        }
    }
    if accepted < 100 {
        return Err(QError::InsufficientAcceptance {
            accepted,
            required: 100,
        });
    }
    let empirical = hits as f64 / accepted as f64;
    let se = (expected * (1.0 - expected) / accepted as f64).sqrt();
    let passed = (empirical - expected).abs() <= 4.0 * se;
    Ok(IdentityCheck::with_verdict(
        "heine_conditional_mc",
        empirical,
        expected,
        passed,
        format!(
            "nu={nu} lambda={} t={} q={} trials={trials} accepted={accepted} se={se:.3e}",
            hp.lambda,
            hp.t,
            hp.qp.q()
        ),
    ))
}
