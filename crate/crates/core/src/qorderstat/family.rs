//! Generic distribution-function formulas over an arbitrary family of
//! per-variable CDFs sharing the geometric support partition.

use std::sync::Arc;

use crate::error::{QError, Result};
use crate::param::QParam;
use crate::qorderstat::OrderStatistic;

/// Shared CDF type: immutable, callable from any thread.
pub type CdfFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

const KTH_GENERIC_CAP: u32 = 12;
const KR_GENERIC_CAP: u32 = 9;

/// The geometric partition of `[0, t]`: `R_j = (q^j t, q^{j-1} t]` for
/// `j = 1..nu-1` and `R_nu = [0, q^{nu-1} t]`. Variable `i` lives on
/// `R_{Y_i} = [0, q^{i-1} t]`, the union of the blocks from `i` on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportPartition {
    t: f64,
    nu: u32,
    q: f64,
}

impl SupportPartition {
    pub fn new(t: f64, nu: u32, qp: &QParam) -> Result<Self> {
        if !t.is_finite() || t <= 0.0 {
            return Err(QError::Domain(format!("t must be positive, got {t}")));
        }
        if nu < 1 {
            return Err(QError::Domain("nu must be at least 1".into()));
        }
        Ok(Self { t, nu, q: qp.q() })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn nu(&self) -> u32 {
        self.nu
    }

    /// Block `R_j` as `(lower, upper)`; half-open below except the last,
    /// which includes 0.
    pub fn interval(&self, j: u32) -> Result<(f64, f64)> {
        if j < 1 || j > self.nu {
            return Err(QError::Domain(format!(
                "block index {j} outside 1..={}",
                self.nu
            )));
        }
        let upper = self.q.powi(j as i32 - 1) * self.t;
        let lower = if j == self.nu {
            0.0
        } else {
            self.q.powi(j as i32) * self.t
        };
        Ok((lower, upper))
    }

    /// Upper end `q^{i-1} t` of variable `i`'s support.
    pub fn variable_support_end(&self, i: u32) -> Result<f64> {
        if i < 1 || i > self.nu {
            return Err(QError::Domain(format!(
                "variable index {i} outside 1..={}",
                self.nu
            )));
        }
        Ok(self.q.powi(i as i32 - 1) * self.t)
    }
}

/// Ordered list of per-variable distribution functions `F_{Y_i}` with their
/// geometric supports; the input to the generic lemma formulas.
///
/// Construction probes each CDF on a grid of its support: `F(0) = 0`,
/// `F(q^{i-1} t) = 1`, nondecreasing.
#[derive(Clone)]
pub struct CdfFamily {
    cdfs: Vec<CdfFn>,
    supports: SupportPartition,
}

impl std::fmt::Debug for CdfFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CdfFamily")
            .field("nu", &self.nu())
            .field("supports", &self.supports)
            .finish()
    }
}

impl CdfFamily {
    pub fn new(cdfs: Vec<CdfFn>, supports: SupportPartition) -> Result<Self> {
        if cdfs.len() as u32 != supports.nu() {
            return Err(QError::Domain(format!(
                "{} CDFs supplied for nu = {}",
                cdfs.len(),
                supports.nu()
            )));
        }
        const PROBES: usize = 64;
        const END_TOL: f64 = 1e-9;
        for (idx, cdf) in cdfs.iter().enumerate() {
            let end = supports.variable_support_end(idx as u32 + 1)?;
            if cdf(0.0).abs() > END_TOL {
                return Err(QError::Domain(format!("F_{{Y_{}}}(0) != 0", idx + 1)));
            }
            if (cdf(end) - 1.0).abs() > END_TOL {
                return Err(QError::Domain(format!(
                    "F_{{Y_{}}}({end}) != 1 at its support end",
                    idx + 1
                )));
            }
            let mut prev = 0.0;
            for p in 0..=PROBES {
                let x = end * p as f64 / PROBES as f64;
                let v = cdf(x);
                if !v.is_finite() || v < prev - 1e-12 {
                    return Err(QError::Domain(format!(
                        "F_{{Y_{}}} not nondecreasing near x = {x}",
                        idx + 1
                    )));
                }
                prev = v;
            }
        }
        Ok(Self { cdfs, supports })
    }

    /// The family of q-uniform laws on `[0, q^{i-1} t]`, clamped to `[0, 1]`
    /// outside their supports.
    pub fn q_uniform(nu: u32, t: f64, qp: &QParam) -> Result<Self> {
        let supports = SupportPartition::new(t, nu, qp)?;
        let mut cdfs: Vec<CdfFn> = Vec::with_capacity(nu as usize);
        for i in 1..=nu {
            let end = supports.variable_support_end(i)?;
            cdfs.push(Arc::new(move |x: f64| (x / end).clamp(0.0, 1.0)));
        }
        Self::new(cdfs, supports)
    }

    pub fn nu(&self) -> u32 {
        self.supports.nu()
    }

    pub fn t(&self) -> f64 {
        self.supports.t()
    }

    pub fn supports(&self) -> &SupportPartition {
        &self.supports
    }

    /// Evaluate `F_{Y_i}` (1-based `i`).
    pub fn cdf(&self, i: u32, x: f64) -> f64 {
        (self.cdfs[i as usize - 1])(x)
    }
}

/// Generic q-distribution function of the maximum, minimum, or k-th
/// q-ordered variable over a [`CdfFamily`].
///
/// Max: `prod_i F_{Y_i}(q^{i-1} y)`. Min: `1 - prod_i (1 - F_{Y_i}(y))`.
/// Kth: the double sum over r-combinations, with the complementary factors
/// `1 - F_{Y_{i_m}}(q^{i_m - (m - r)} y)`.
pub fn ord_cdf_generic(fam: &CdfFamily, which: OrderStatistic, y: f64) -> Result<f64> {
    let nu = fam.nu();
    let t = fam.t();
    let q = fam.supports.q;
    if !(0.0..=t).contains(&y) {
        return Err(QError::Domain(format!("y = {y} outside [0, {t}]")));
    }
    match which {
        OrderStatistic::Max => {
            let mut prod = 1.0;
            let mut shift = 1.0;
            for i in 1..=nu {
                prod *= fam.cdf(i, shift * y);
                shift *= q;
            }
            Ok(prod)
        }
        OrderStatistic::Min => {
            let mut prod = 1.0;
            for i in 1..=nu {
                prod *= 1.0 - fam.cdf(i, y);
            }
            Ok(1.0 - prod)
        }
        OrderStatistic::Kth(k) => {
            if k < 1 || k > nu {
                return Err(QError::Domain(format!("k = {k} outside 1..={nu}")));
            }
            if nu > KTH_GENERIC_CAP {
                return Err(QError::Size(format!(
                    "nu = {nu} exceeds the 2^nu enumeration cap {KTH_GENERIC_CAP}"
                )));
            }
            let mut total = 0.0;
            for mask in 0u32..(1 << nu) {
                let r = mask.count_ones();
                if r < k {
                    continue;
                }
                let mut term = 1.0;
                let mut pos_in = 0i32;
                let mut pos_out = 0i32;
                for i in 1..=nu as i32 {
                    if mask & (1 << (i - 1)) != 0 {
                        // j-th selected variable gets argument q^{j-1} y
                        term *= fam.cdf(i as u32, q.powi(pos_in) * y);
                        pos_in += 1;
                    } else {
                        // p-th complementary variable: exponent i_m - (m - r) = i - p
                        pos_out += 1;
                        term *= 1.0 - fam.cdf(i as u32, q.powi(i - pos_out) * y);
                    }
                }
                total += term;
            }
            Ok(total)
        }
    }
}

/// Generic joint q-distribution function of `(min, max)`:
/// `prod_i F_{Y_i}(q^{i-1} z) - prod_i (F_{Y_i}(q^{i-1} z) - F_{Y_i}(y))`,
/// valid on `y < q^{nu-1} z`. Outside that region the formula does not
/// apply and a domain error is raised.
pub fn joint_minmax_cdf_generic(fam: &CdfFamily, y: f64, z: f64) -> Result<f64> {
    let nu = fam.nu();
    let t = fam.t();
    let q = fam.supports.q;
    check_joint_support(y, z, t, q.powi(nu as i32 - 1))?;
    let mut first = 1.0;
    let mut second = 1.0;
    let mut shift = 1.0;
    for i in 1..=nu {
        let fz = fam.cdf(i, shift * z);
        first *= fz;
        second *= fz - fam.cdf(i, y);
        shift *= q;
    }
    Ok(first - second)
}

/// Generic joint q-distribution function of `(Y_(k), Y_(r))` by explicit
/// enumeration, valid on `y < q^{r-k} z`.
///
/// The blocks of variables falling in `[0, y]`, `(y, z]`, and `(z, t]` are
/// chosen sequentially with the remaining ground set relabeled to
/// `{1..m}` before each stage, the same convention under which the
/// ordered-set-partition expansion reproduces the q-multinomial. Reading
/// the three blocks off one fixed labeling instead fails hand checks
/// against the (min, max) joint at `(k, r) = (1, nu)`.
pub fn joint_kr_cdf_generic(fam: &CdfFamily, k: u32, r: u32, y: f64, z: f64) -> Result<f64> {
    let nu = fam.nu();
    let t = fam.t();
    let q = fam.supports.q;
    if k < 1 || k >= r || r > nu {
        return Err(QError::Domain(format!(
            "need 1 <= k < r <= nu, got k={k} r={r} nu={nu}"
        )));
    }
    if nu > KR_GENERIC_CAP {
        return Err(QError::Size(format!(
            "nu = {nu} exceeds the 3^nu enumeration cap {KR_GENERIC_CAP}"
        )));
    }
    check_joint_support(y, z, t, q.powi((r - k) as i32))?;

    let mut total = 0.0;
    // stage 1: the variables at or below y, an s-subset of {1..nu}
    for mask_a in 0u32..(1 << nu) {
        let s = mask_a.count_ones();
        if s < k {
            continue;
        }
        let mut prod_a = 1.0;
        let mut pos = 0i32;
        for i in 1..=nu {
            if mask_a & (1 << (i - 1)) != 0 {
                prod_a *= fam.cdf(i, q.powi(pos) * y);
                pos += 1;
            }
        }
        if prod_a == 0.0 {
            continue;
        }
        // stage 2: relabel the nu - s remaining slots to ranks 1..nu-s and
        // choose which fall in (y, z]; the rest stay above z
        let m = nu - s;
        let mut inner = 0.0;
        for mask_b in 0u32..(1 << m) {
            let b = mask_b.count_ones();
            if s + b < r {
                continue;
            }
            let mut term = 1.0;
            let mut pos_b = 0i32;
            let mut pos_c = 0i32;
            for rank in 1..=m as i32 {
                if mask_b & (1 << (rank - 1)) != 0 {
                    term *= fam.cdf(rank as u32, q.powi(pos_b) * z) - fam.cdf(rank as u32, y);
                    pos_b += 1;
                } else {
                    pos_c += 1;
                    term *= 1.0 - fam.cdf(rank as u32, q.powi(rank - pos_c) * z);
                }
            }
            inner += term;
        }
        total += prod_a * inner;
    }
    Ok(total)
}

fn check_joint_support(y: f64, z: f64, t: f64, shift: f64) -> Result<()> {
    if !(0.0..=t).contains(&y) || !(0.0..=t).contains(&z) {
        return Err(QError::Domain(format!(
            "(y, z) = ({y}, {z}) outside [0, {t}]^2"
        )));
    }
    if y >= shift * z {
        return Err(QError::Domain(format!(
            "support violation: y = {y} not below {shift} * z = {}",
            shift * z
        )));
    }
    Ok(())
}
