//! Property tests over randomized parameters: kernel identities that must
//! hold for every admissible input, not just the hand-picked lattices.

use proptest::prelude::*;

use qorderstats::param::QParam;
use qorderstats::qcore::{q_binomial, q_integrate, q_number, QBase};
use qorderstats::qorderstat::{
    support_check, unif_joint_full_constant, unif_joint_full_pdf, unif_ord_cdf, OrderStatSpec,
    OrderStatistic, QOrderedPoint, QUniform,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn qparam() -> impl Strategy<Value = QParam> {
    (0.05f64..0.95).prop_map(|q| QParam::with_default_policy(q).unwrap())
}

proptest! {
    #[test]
    fn qbinomial_symmetry_and_pascal(qp in qparam(), n in 0i64..18, k in 0i64..18) {
        let k = k.min(n);
        let sym = q_binomial(n, n - k, &qp, QBase::Normal);
        let val = q_binomial(n, k, &qp, QBase::Normal);
        prop_assert_eq!(val, sym);
        let rhs = q_binomial(n - 1, k - 1, &qp, QBase::Normal)
            + qp.q().powi(k as i32) * q_binomial(n - 1, k, &qp, QBase::Normal);
        if n >= 1 {
            prop_assert!((val - rhs).abs() <= 1e-12 * val.max(1.0));
        }
    }

    #[test]
    fn monomial_integrals_match_moments(qp in qparam(), n in 0u32..8, beta in 0.1f64..4.0) {
        // near q = 1 the hard term cap truncates the geometric series early;
        // the contract is that the reported tail bound covers what was cut
        let direct = q_integrate(|x| x.powi(n as i32), 0.0, beta, &qp).unwrap();
        let expect = beta.powi(n as i32 + 1) / q_number(n + 1, &qp);
        let allowance = 1e-10 * expect + 1.5 * direct.tail_bound;
        prop_assert!((direct.value - expect).abs() <= allowance,
            "q={} n={n} beta={beta}: {} vs {expect} (tail_bound {})",
            qp.q(), direct.value, direct.tail_bound);
    }

    #[test]
    fn quniform_samples_stay_on_support_atoms(qp in qparam(), beta in 0.1f64..4.0, seed in any::<u64>()) {
        let d = QUniform::new(beta, qp).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..64 {
            let x = d.sample(&mut rng);
            prop_assert!(x > 0.0 && x <= beta);
            // x = beta * q^n for an integer n
            let n = (x / beta).ln() / qp.q().ln();
            prop_assert!((n - n.round()).abs() < 1e-9, "x={x} n={n}");
            // the cdf at a sample is a probability
            let f = d.cdf(x);
            prop_assert!((0.0..=1.0).contains(&f));
        }
    }

    #[test]
    fn max_cdf_bounds_and_monotonicity_in_rank(qp in qparam(), nu in 1u32..7, frac in 0.0f64..=1.0) {
        // on the Fermat grid the KTH CDFs are probabilities, decreasing in k
        let t = 1.0;
        let spec = OrderStatSpec::new(nu, 1, t).unwrap();
        let depth = (frac * 30.0) as i32;
        let y = t * qp.q().powi(depth);
        let mut prev = f64::INFINITY;
        for k in 1..=nu {
            let f = unif_ord_cdf(&spec, &qp, OrderStatistic::Kth(k), y).unwrap();
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&f), "k={k} y={y} F={f}");
            prop_assert!(f <= prev + 1e-12, "F not decreasing in k at y={y}");
            prev = f;
        }
    }

    #[test]
    fn full_joint_density_is_constant_exactly_on_support(
        qp in qparam(),
        raw in prop::collection::vec(0.01f64..1.0, 1..5),
    ) {
        // build an arbitrary point, then also a guaranteed-interior point
        let t = 1.0;
        let nu = raw.len() as u32;
        let spec = OrderStatSpec::new(nu, 1, t).unwrap();
        let point = QOrderedPoint::new(raw.clone()).unwrap();
        let pdf = unif_joint_full_pdf(&spec, &qp, &point).unwrap();
        if support_check(&point, t, &qp) {
            prop_assert_eq!(pdf, unif_joint_full_constant(&spec, &qp));
        } else {
            prop_assert_eq!(pdf, 0.0);
        }
        // interior chain: y_i = t * (q/2)^{nu-i} satisfies y_i < q y_{i+1}
        let interior: Vec<f64> = (0..nu)
            .map(|i| t * (qp.q() / 2.0).powi((nu - 1 - i) as i32) * 0.5)
            .collect();
        let interior = QOrderedPoint::new(interior).unwrap();
        prop_assert!(support_check(&interior, t, &qp));
        let pdf = unif_joint_full_pdf(&spec, &qp, &interior).unwrap();
        prop_assert_eq!(pdf, unif_joint_full_constant(&spec, &qp));
    }
}
