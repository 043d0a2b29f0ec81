//! Brute-force combinatorial oracles for the q-series identities: subset
//! weight sums, the Vandermonde-type corollaries, the q^{-1}-binomial
//! product formula, and the ordered-set-partition / multiset-inversion
//! expansions of the q-multinomial coefficient.

mod exact;

use crate::error::{QError, Result};
use crate::param::QParam;
use crate::qcore::{q_binomial, q_multinomial, QBase};
use crate::report::{IdentityCheck, Tolerance};

/// Which Vandermonde-type corollary to verify.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VandermondeVariant {
    Q,
    QInv,
}

/// How ordered-set-partition weights are read off the blocks.
///
/// `Nested` relabels the remaining ground set to `{1..m}` before each block
/// is chosen, so every stage reduces to the proven k-combination identity;
/// this is the interpretation that reproduces the q-multinomial and the one
/// the checks assert. `Literal` keeps absolute element values as positions;
/// it disagrees with the q-multinomial on small cases and is only reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartitionWeighting {
    Nested,
    Literal,
}

const SUBSET_CAP: u32 = 20;
const VANDERMONDE_CAP: u32 = 30;
const PRODUCT_CAP: u32 = 30;
const PARTITION_CAP: u32 = 10;
const INVERSION_CAP: u32 = 9;
const FUBINI_CAP: u32 = 10;

/// A sequence of disjoint non-empty blocks covering `{1..n}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderedSetPartition {
    blocks: Vec<Vec<u32>>,
    n: u32,
}

impl OrderedSetPartition {
    pub fn new(blocks: Vec<Vec<u32>>, n: u32) -> Result<Self> {
        let mut seen = vec![false; n as usize + 1];
        let mut covered = 0u32;
        for block in &blocks {
            if block.is_empty() {
                return Err(QError::Domain(
                    "ordered set partition has an empty block".into(),
                ));
            }
            for &e in block {
                if e == 0 || e > n {
                    return Err(QError::Domain(format!(
                        "element {e} outside ground set 1..={n}"
                    )));
                }
                if seen[e as usize] {
                    return Err(QError::Domain(format!("element {e} appears in two blocks")));
                }
                seen[e as usize] = true;
                covered += 1;
            }
        }
        if covered != n {
            return Err(QError::Domain(format!(
                "blocks cover {covered} elements, ground set has {n}"
            )));
        }
        Ok(Self { blocks, n })
    }

    pub fn blocks(&self) -> &[Vec<u32>] {
        &self.blocks
    }

    pub fn sizes(&self) -> Vec<u32> {
        self.blocks.iter().map(|b| b.len() as u32).collect()
    }

    pub fn ground_size(&self) -> u32 {
        self.n
    }
}

/// Visit every k-combination of `{0..n}` in lexicographic order.
fn for_each_combination(n: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    if k == 0 {
        f(&[]);
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        while i > 0 && idx[i - 1] == i - 1 + n - k {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Weighted sum over k-subsets of `{1..n}`: each subset `{m_1 < ... < m_k}`
/// carries weight `q^{m_1 + ... + m_k - binom(k+1,2)}`; the total is the
/// q-binomial coefficient.
pub fn check_subset_weight_sum(
    n: u32,
    k: u32,
    qp: &QParam,
    tol: Tolerance,
) -> Result<IdentityCheck> {
    if n > SUBSET_CAP {
        return Err(QError::Size(format!(
            "n = {n} exceeds enumeration cap {SUBSET_CAP}"
        )));
    }
    if k > n {
        return Err(QError::Domain(format!("k = {k} exceeds n = {n}")));
    }
    let q = qp.q();
    let offset = (k as i64 * (k as i64 + 1)) / 2;
    let mut lhs = 0.0;
    for_each_combination(n as usize, k as usize, &mut |idx| {
        let exponent: i64 = idx.iter().map(|&i| i as i64 + 1).sum::<i64>() - offset;
        lhs += q.powi(exponent as i32);
    });
    let rhs = q_binomial(n as i64, k as i64, qp, QBase::Normal);
    Ok(IdentityCheck::compare(
        "subset_weight_sum",
        lhs,
        rhs,
        tol,
        format!("n={n} k={k} q={q}"),
    ))
}

/// Alternating Vandermonde-type sums against the reciprocal q-binomial.
///
/// The raw terms grow like `q^{-binom(n,2)-ny}` while the total stays of
/// order one, so the left side is evaluated in exact rational arithmetic
/// (in exact rational arithmetic) and rounded once; the right side exercises the float
/// kernel, which is well conditioned.
pub fn check_vandermonde_identity(
    n: u32,
    y: u32,
    qp: &QParam,
    variant: VandermondeVariant,
    tol: Tolerance,
) -> Result<IdentityCheck> {
    if n > VANDERMONDE_CAP {
        return Err(QError::Size(format!(
            "n = {n} exceeds cap {VANDERMONDE_CAP}"
        )));
    }
    if y < 1 {
        return Err(QError::Domain("y must be at least 1".into()));
    }
    let q = exact::rational_of(qp.q());
    let y_num = exact::q_number(y, &q);
    let mut lhs = num_rational::BigRational::from_integer(0.into());
    for k in 0..=n {
        let exponent: i64 = match variant {
            VandermondeVariant::Q => binom2(k as i64 + 1) - n as i64 * (y as i64 + k as i64),
            VandermondeVariant::QInv => binom2(k as i64 + 1) + n as i64 * y as i64,
        };
        let term = exact::q_binomial(n, k, &q) * exact::q_pow(&q, exponent) * &y_num
            / exact::q_number(y + k, &q);
        if k % 2 == 0 {
            lhs += term;
        } else {
            lhs -= term;
        }
    }
    let lhs = exact::to_f64(&lhs);
    let base = match variant {
        VandermondeVariant::Q => QBase::Normal,
        VandermondeVariant::QInv => QBase::Inverse,
    };
    let denom = q_binomial((y + n) as i64, n as i64, qp, base);
    if denom == 0.0 || !denom.is_finite() {
        return Err(QError::Numeric(format!(
            "q-binomial({}, {n}) not representable in the requested base",
            y + n
        )));
    }
    let rhs = 1.0 / denom;
    let tag = match variant {
        VandermondeVariant::Q => "vandermonde_q",
        VandermondeVariant::QInv => "vandermonde_qinv",
    };
    Ok(IdentityCheck::compare(
        tag,
        lhs,
        rhs,
        tol,
        format!("n={n} y={y} q={}", qp.q()),
    ))
}

/// Product formula in base `q^{-1}`:
/// `prod_{i=1}^{n} (1 - t q^{-(i-1)})` against its alternating expansion
/// `sum_k (-1)^k q^{-binom(k,2)-k(n-k)} [n choose k]_q t^k`.
///
/// The product side is a plain float product (no cancellation); the sum side
/// cancels catastrophically — at `t = 1` it must telescope to exactly zero —
/// so it is evaluated in exact rational arithmetic.
pub fn check_qbinom_product(n: u32, t: f64, qp: &QParam, tol: Tolerance) -> Result<IdentityCheck> {
    if n > PRODUCT_CAP {
        return Err(QError::Size(format!("n = {n} exceeds cap {PRODUCT_CAP}")));
    }
    if !t.is_finite() {
        return Err(QError::Domain(format!("t must be finite, got {t}")));
    }
    let q = qp.q();
    let mut lhs = 1.0;
    for i in 0..n {
        lhs *= 1.0 - t * q.powi(-(i as i32));
    }
    let qr = exact::rational_of(q);
    let tr = exact::rational_of(t);
    let mut rhs = num_rational::BigRational::from_integer(0.into());
    let mut t_pow = num_rational::BigRational::from_integer(1.into());
    for k in 0..=n {
        let exponent = -binom2(k as i64) - k as i64 * (n as i64 - k as i64);
        let term = exact::q_binomial(n, k, &qr) * exact::q_pow(&qr, exponent) * &t_pow;
        if k % 2 == 0 {
            rhs += term;
        } else {
            rhs -= term;
        }
        t_pow *= &tr;
    }
    let rhs = exact::to_f64(&rhs);
    Ok(IdentityCheck::compare(
        "qbinom_product",
        lhs,
        rhs,
        tol,
        format!("n={n} t={t} q={q}"),
    ))
}

fn binom2(m: i64) -> i64 {
    m * (m - 1) / 2
}

/// Exact count of ordered set partitions of `{1..n}` (the Fubini numbers),
/// by recursive enumeration of every block sequence.
pub fn count_ordered_set_partitions(n: u32) -> Result<u64> {
    if n > FUBINI_CAP {
        return Err(QError::Size(format!(
            "n = {n} exceeds enumeration cap {FUBINI_CAP}"
        )));
    }
    fn count(mask: u32) -> u64 {
        if mask == 0 {
            return 1;
        }
        let mut total = 0;
        // every non-empty submask is a candidate first block
        let mut sub = mask;
        while sub != 0 {
            total += count(mask & !sub);
            sub = (sub - 1) & mask;
        }
        total
    }
    Ok(count((1u32 << n) - 1))
}

/// Materialize every ordered set partition of `{1..n}` (small `n` only).
pub fn enumerate_ordered_set_partitions(n: u32) -> Result<Vec<OrderedSetPartition>> {
    if n > 8 {
        return Err(QError::Size(format!(
            "n = {n} exceeds materialization cap 8"
        )));
    }
    fn rec(mask: u32, n: u32, prefix: &mut Vec<Vec<u32>>, out: &mut Vec<OrderedSetPartition>) {
        if mask == 0 {
            out.push(OrderedSetPartition::new(prefix.clone(), n).expect("valid by construction"));
            return;
        }
        let mut sub = mask;
        while sub != 0 {
            let block: Vec<u32> = (0..n)
                .filter(|&b| sub & (1 << b) != 0)
                .map(|b| b + 1)
                .collect();
            prefix.push(block);
            rec(mask & !sub, n, prefix, out);
            prefix.pop();
            sub = (sub - 1) & mask;
        }
    }
    let mut out = Vec::new();
    rec((1u32 << n) - 1, n, &mut Vec::new(), &mut out);
    Ok(out)
}

/// Ordered-set-partition expansion of the q-multinomial coefficient.
///
/// Blocks of sizes `parts` are drawn sequentially from `{1..n}`; the final
/// unweighted block takes whatever remains. `Nested` weighting is asserted
/// against [`q_multinomial`]; `Literal` weighting is reported without a
/// verdict (see [`PartitionWeighting`]).
pub fn check_multinomial_partition_sum(
    n: u32,
    parts: &[u32],
    qp: &QParam,
    weighting: PartitionWeighting,
    tol: Tolerance,
) -> Result<IdentityCheck> {
    if n > PARTITION_CAP {
        return Err(QError::Size(format!(
            "n = {n} exceeds enumeration cap {PARTITION_CAP}"
        )));
    }
    validate_parts(n, parts)?;
    let q = qp.q();
    let literal = weighting == PartitionWeighting::Literal;

    fn rec(remaining: &[u32], parts: &[u32], q: f64, literal: bool) -> f64 {
        let Some((&k, rest)) = parts.split_first() else {
            return 1.0;
        };
        let k = k as usize;
        let offset = (k as i64 * (k as i64 + 1)) / 2;
        let mut total = 0.0;
        for_each_combination(remaining.len(), k, &mut |idx| {
            let exponent: i64 = if literal {
                idx.iter().map(|&i| remaining[i] as i64).sum::<i64>() - offset
            } else {
                idx.iter().map(|&i| i as i64 + 1).sum::<i64>() - offset
            };
            let next: Vec<u32> = remaining
                .iter()
                .enumerate()
                .filter(|(i, _)| !idx.contains(i))
                .map(|(_, &e)| e)
                .collect();
            total += q.powi(exponent as i32) * rec(&next, rest, q, literal);
        });
        total
    }

    let ground: Vec<u32> = (1..=n).collect();
    let lhs = rec(&ground, parts, q, literal);
    let rhs = q_multinomial(n, parts, qp, QBase::Normal)?;
    let check = IdentityCheck::compare(
        if literal {
            "multinomial_partition_sum_literal"
        } else {
            "multinomial_partition_sum_nested"
        },
        lhs,
        rhs,
        tol,
        format!("n={n} parts={parts:?} q={q}"),
    );
    Ok(if literal {
        check.informational()
    } else {
        check
    })
}

/// Multiset-inversion oracle for the q-multinomial: the inversion generating
/// function over all words with letter multiplicities `(parts..., n - sum)`.
pub fn check_multinomial_inversion_oracle(
    n: u32,
    parts: &[u32],
    qp: &QParam,
    tol: Tolerance,
) -> Result<IdentityCheck> {
    if n > INVERSION_CAP {
        return Err(QError::Size(format!(
            "n = {n} exceeds enumeration cap {INVERSION_CAP}"
        )));
    }
    validate_parts(n, parts)?;
    let q = qp.q();
    let used: u32 = parts.iter().sum();
    let mut counts: Vec<u32> = parts.to_vec();
    counts.push(n - used);
    let mut placed = vec![0u32; counts.len()];

    fn rec(counts: &mut [u32], placed: &mut [u32], inversions: u32, remaining: u32, q: f64) -> f64 {
        if remaining == 0 {
            return q.powi(inversions as i32);
        }
        let mut total = 0.0;
        for letter in 0..counts.len() {
            if counts[letter] == 0 {
                continue;
            }
            let added: u32 = placed[letter + 1..].iter().sum();
            counts[letter] -= 1;
            placed[letter] += 1;
            total += rec(counts, placed, inversions + added, remaining - 1, q);
            counts[letter] += 1;
            placed[letter] -= 1;
        }
        total
    }

    let lhs = rec(&mut counts, &mut placed, 0, n, q);
    let rhs = q_multinomial(n, parts, qp, QBase::Normal)?;
    Ok(IdentityCheck::compare(
        "multinomial_inversion",
        lhs,
        rhs,
        tol,
        format!("n={n} parts={parts:?} q={q}"),
    ))
}

fn validate_parts(n: u32, parts: &[u32]) -> Result<()> {
    if parts.contains(&0) {
        return Err(QError::Domain("parts must be positive".into()));
    }
    let total: u64 = parts.iter().map(|&k| k as u64).sum();
    if total > n as u64 {
        return Err(QError::Domain(format!(
            "parts sum to {total}, exceeding n = {n}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::param::QParam;

    const TOL: Tolerance = Tolerance {
        rel: 1e-10,
        abs: 1e-12,
    };

    fn qp(q: f64) -> QParam {
        QParam::with_default_policy(q).unwrap()
    }

    #[test]
    fn subset_weight_examples() {
        let p = qp(0.5);
        let c = check_subset_weight_sum(3, 0, &p, TOL).unwrap();
        assert_eq!(c.lhs, 1.0);
        assert_eq!(c.rhs, 1.0);
        // subsets {1,2},{1,3},{2,3} with weights 1, q, q^2
        let c = check_subset_weight_sum(3, 2, &p, TOL).unwrap();
        assert!((c.lhs - 1.75).abs() < 1e-15);
        assert!(c.passed);
        // full set telescopes to weight q^0
        let c = check_subset_weight_sum(5, 5, &p, TOL).unwrap();
        assert_eq!(c.lhs, 1.0);
        assert!(check_subset_weight_sum(21, 3, &p, TOL).is_err());
    }

    #[test]
    fn subset_weight_lattice() {
        for &q in &[0.25, 0.5, 0.75, 0.9] {
            let p = qp(q);
            for n in 0..=8 {
                for k in 0..=n {
                    let c = check_subset_weight_sum(n, k, &p, TOL).unwrap();
                    assert!(c.passed, "q={q} n={n} k={k}: rel={}", c.rel_err);
                }
            }
        }
    }

    #[test]
    fn vandermonde_hand_values() {
        let p = qp(0.5);
        // lhs = 2 - 4/3 = 2/3 = 1/qbin(2,1)
        let c = check_vandermonde_identity(1, 1, &p, VandermondeVariant::Q, TOL).unwrap();
        assert!((c.lhs - 2.0 / 3.0).abs() < 1e-14);
        assert!((c.rhs - 2.0 / 3.0).abs() < 1e-14);
        assert!(c.passed);
        // lhs = 1/2 - 1/6 = 1/3 = 1/(q^{-1}[2]_q)
        let c = check_vandermonde_identity(1, 1, &p, VandermondeVariant::QInv, TOL).unwrap();
        assert!((c.lhs - 1.0 / 3.0).abs() < 1e-14);
        assert!((c.rhs - 1.0 / 3.0).abs() < 1e-14);
        assert!(c.passed);
        // n = 0 degenerates to 1 on both sides
        let c = check_vandermonde_identity(0, 3, &p, VandermondeVariant::Q, TOL).unwrap();
        assert_eq!(c.lhs, 1.0);
        assert_eq!(c.rhs, 1.0);
    }

    #[test]
    fn vandermonde_lattice_both_variants() {
        for &q in &[0.25, 0.5, 0.75, 0.9] {
            let p = qp(q);
            for n in 0..=8 {
                for y in 1..=5 {
                    for variant in [VandermondeVariant::Q, VandermondeVariant::QInv] {
                        let c = check_vandermonde_identity(n, y, &p, variant, TOL).unwrap();
                        assert!(
                            c.passed,
                            "q={q} n={n} y={y} {variant:?}: lhs={} rhs={} rel={}",
                            c.lhs, c.rhs, c.rel_err
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn qbinom_product_hand_values() {
        let p = qp(0.5);
        // n = 1: both sides 1 - t
        let c = check_qbinom_product(1, 0.3, &p, TOL).unwrap();
        assert!((c.lhs - 0.7).abs() < 1e-15);
        assert!(c.passed);
        // n = 2, t = 1: (1-1)(1-2) = 0 and the sum telescopes to 0
        let c = check_qbinom_product(2, 1.0, &p, TOL).unwrap();
        assert_eq!(c.lhs, 0.0);
        assert_eq!(c.rhs, 0.0);
        assert!(c.passed);
        // t = 0: both sides 1
        let c = check_qbinom_product(7, 0.0, &p, TOL).unwrap();
        assert_eq!(c.lhs, 1.0);
        assert_eq!(c.rhs, 1.0);
    }

    #[test]
    fn qbinom_product_lattice() {
        let tol = Tolerance::new(1e-9, 1e-12);
        for &q in &[0.25, 0.5, 0.75, 0.9] {
            let p = qp(q);
            for n in 0..=8 {
                for &t in &[-1.0, -0.3, 0.0, 0.7, 1.0] {
                    let c = check_qbinom_product(n, t, &p, tol).unwrap();
                    assert!(
                        c.passed,
                        "q={q} n={n} t={t}: lhs={} rhs={} rel={} abs={}",
                        c.lhs, c.rhs, c.rel_err, c.abs_err
                    );
                }
            }
        }
    }

    #[test]
    fn fubini_counts() {
        let expected = [1u64, 1, 3, 13, 75, 541];
        for (n, &f) in expected.iter().enumerate() {
            assert_eq!(count_ordered_set_partitions(n as u32).unwrap(), f, "n={n}");
        }
        assert!(count_ordered_set_partitions(11).is_err());
    }

    #[test]
    fn enumeration_matches_count() {
        for n in 0..=6u32 {
            let listed = enumerate_ordered_set_partitions(n).unwrap();
            assert_eq!(
                listed.len() as u64,
                count_ordered_set_partitions(n).unwrap()
            );
            for p in &listed {
                assert_eq!(p.ground_size(), n);
                assert_eq!(p.sizes().iter().sum::<u32>(), n);
            }
        }
    }

    #[test]
    fn nested_partition_sum_matches_multinomial() {
        let p = qp(0.5);
        let c = check_multinomial_partition_sum(3, &[1, 1], &p, PartitionWeighting::Nested, TOL)
            .unwrap();
        assert!((c.lhs - 2.625).abs() < 1e-14);
        assert!(c.passed && c.asserted);
    }

    #[test]
    fn literal_partition_sum_is_informational() {
        let p = qp(0.5);
        let c = check_multinomial_partition_sum(3, &[1, 1], &p, PartitionWeighting::Literal, TOL)
            .unwrap();
        // 2(q + q^2 + q^3) at q = 0.5
        assert!((c.lhs - 1.75).abs() < 1e-14);
        assert!((c.rhs - 2.625).abs() < 1e-14);
        assert!(!c.asserted);
    }

    #[test]
    fn single_part_reduces_to_subset_weight() {
        let p = qp(0.5);
        for n in 1..=6 {
            for k in 1..=n {
                let a =
                    check_multinomial_partition_sum(n, &[k], &p, PartitionWeighting::Nested, TOL)
                        .unwrap();
                let b = check_subset_weight_sum(n, k, &p, TOL).unwrap();
                assert!((a.lhs - b.lhs).abs() < 1e-12);
                let lit =
                    check_multinomial_partition_sum(n, &[k], &p, PartitionWeighting::Literal, TOL)
                        .unwrap();
                assert!((lit.lhs - b.lhs).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn inversion_oracle_examples() {
        let p = qp(0.5);
        // words 12 and 21
        let c = check_multinomial_inversion_oracle(2, &[1, 1], &p, TOL).unwrap();
        assert!((c.lhs - 1.5).abs() < 1e-15);
        // Gaussian polynomial [4 choose 2]_q
        let c = check_multinomial_inversion_oracle(4, &[2], &p, TOL).unwrap();
        assert!((c.lhs - 2.1875).abs() < 1e-14);
        // all-distinct letters give the q-factorial
        use crate::qcore::q_factorial;
        for n in 1..=6u32 {
            let parts: Vec<u32> = vec![1; n as usize];
            let c = check_multinomial_inversion_oracle(n, &parts, &p, TOL).unwrap();
            assert!((c.lhs - q_factorial(n, &p)).abs() < 1e-12);
        }
    }

    #[test]
    fn oracles_agree_over_compositions() {
        // every composition of n <= 7 into at most 4 parts
        for &q in &[0.3, 0.5, 0.9] {
            let p = qp(q);
            for n in 1..=7u32 {
                for parts in compositions(n, 4) {
                    let nested = check_multinomial_partition_sum(
                        n,
                        &parts,
                        &p,
                        PartitionWeighting::Nested,
                        TOL,
                    )
                    .unwrap();
                    assert!(nested.passed, "nested q={q} n={n} parts={parts:?}");
                    let inv = check_multinomial_inversion_oracle(n, &parts, &p, TOL).unwrap();
                    assert!(inv.passed, "inversion q={q} n={n} parts={parts:?}");
                }
            }
        }
    }

    #[test]
    fn rejects_invalid_parts() {
        let p = qp(0.5);
        assert!(
            check_multinomial_partition_sum(3, &[2, 2], &p, PartitionWeighting::Nested, TOL)
                .is_err()
        );
        assert!(check_multinomial_inversion_oracle(3, &[0, 1], &p, TOL).is_err());
    }

    /// All compositions of `n` into at most `max_parts` positive parts.
    pub(super) fn compositions(n: u32, max_parts: usize) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        fn rec(rest: u32, max_parts: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if rest == 0 {
                out.push(prefix.clone());
                return;
            }
            if prefix.len() == max_parts {
                return;
            }
            for k in 1..=rest {
                prefix.push(k);
                rec(rest - k, max_parts, prefix, out);
                prefix.pop();
            }
        }
        rec(n, max_parts, &mut Vec::new(), &mut out);
        out
    }
}
