//! Order-K range space properties (uniform and non-uniform recovery of
//! K-sparse nonnegative vectors) by exhaustive subset certification, and a
//! recovery oracle that decides the same questions by actually running
//! ℓ1 minimization.
//!
//! | property | supports checked                        |
//! |----------|-----------------------------------------|
//! | RSP      | every `S` with `1 ≤ |S| ≤ K`            |
//! | WRSP     | `|S| ≤ K` and `A_S` full column rank, plus some full-rank `K`-subset must exist |
//! | PRSP     | every `S` with `|S| = K`                |
//! | PWRSP    | `|S| = K` and `A_S` full column rank    |
//!
//! Subsets are visited by increasing size, lexicographically within a size.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::{SearchLimits, ToleranceConfig};
use crate::error::{Error, Result};
use crate::l0;
use crate::linalg::{self, norm_inf, DenseMatrix, IndexSet};
use crate::parallel;
use crate::rsp;
use crate::simplex::{self, LpStatus, StandardLp};
use crate::subsets;
use crate::Verdict;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Property {
    #[serde(rename = "RSP_K")]
    Rsp,
    #[serde(rename = "WRSP_K")]
    Wrsp,
    #[serde(rename = "PRSP_K")]
    Prsp,
    #[serde(rename = "PWRSP_K")]
    Pwrsp,
}

impl Property {
    fn exact_size_only(self) -> bool {
        matches!(self, Property::Prsp | Property::Pwrsp)
    }

    fn full_rank_only(self) -> bool {
        matches!(self, Property::Wrsp | Property::Pwrsp)
    }

    fn sizes(self, k: usize) -> std::ops::RangeInclusive<usize> {
        if self.exact_size_only() {
            k..=k
        } else {
            1..=k
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Property::Rsp => "rsp",
            Property::Wrsp => "wrsp",
            Property::Prsp => "prsp",
            Property::Pwrsp => "pwrsp",
        })
    }
}

impl FromStr for Property {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "rsp" => Ok(Property::Rsp),
            "wrsp" => Ok(Property::Wrsp),
            "prsp" => Ok(Property::Prsp),
            "pwrsp" => Ok(Property::Pwrsp),
            other => Err(format!(
                "unknown property '{other}' (expected rsp, wrsp, prsp or pwrsp)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrderFailure {
    /// Some support failed its RSP check; see `counterexample`.
    SubsetFailed,
    /// No `K` columns are linearly independent (WRSP clause (i)).
    NoFullRankSubset,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryReport {
    pub property: Property,
    pub k: usize,
    pub holds: Verdict,
    /// Lexicographically first failing support.
    pub counterexample: Option<IndexSet>,
    pub failure: Option<OrderFailure>,
    pub subsets_checked: u64,
    /// Rank-deficient supports excluded by WRSP/PWRSP.
    pub subsets_skipped: u64,
    pub marginal_subsets: Vec<IndexSet>,
    /// Failing supports per size, index 0 is size 1.
    pub failures_by_size: Vec<u64>,
}

impl RecoveryReport {
    /// Some size below `K` failed while size `K` had no failure.
    pub fn fails_only_below_k(&self) -> bool {
        let (last, below) = self.failures_by_size.split_last().unwrap_or((&0, &[]));
        *last == 0 && below.iter().any(|&f| f > 0)
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum SubsetOutcome {
    Skipped,
    Pass,
    Fail,
    Marginal,
}

fn validate_order(a: &DenseMatrix, k: usize) -> Result<()> {
    if k == 0 || k > a.cols() {
        Err(Error::InvalidOrder { k, n: a.cols() })
    } else {
        Ok(())
    }
}

/// Visits the supports selected by `property` and `k` in canonical order.
fn for_each_support<T, F>(
    n: usize,
    property: Property,
    k: usize,
    limits: &SearchLimits,
    f: F,
) -> Result<Vec<(IndexSet, T)>>
where
    T: Send,
    F: Fn(u64, &IndexSet) -> T + Sync + Send,
{
    let sizes = property.sizes(k);
    let total = subsets::count_range(n, *sizes.start(), *sizes.end());
    limits.check(total)?;
    let mut offsets = Vec::new();
    let mut acc = 0u64;
    for size in sizes.clone() {
        offsets.push((size, acc));
        acc += subsets::binomial(n, size);
    }
    let locate = |g: u64| {
        let &(size, off) = offsets
            .iter()
            .rev()
            .find(|(_, off)| *off <= g)
            .expect("offset table covers range");
        IndexSet::from_sorted(subsets::unrank(n, size, g - off))
    };
    Ok(parallel::map_range(total, limits.parallelism, |g| {
        let s = locate(g);
        let v = f(g, &s);
        (s, v)
    }))
}

/// Certifies `property` of order `k` for `Aᵀ`.
pub fn order_k(
    a: &DenseMatrix,
    property: Property,
    k: usize,
    tol: &ToleranceConfig,
    limits: &SearchLimits,
) -> Result<RecoveryReport> {
    validate_order(a, k)?;
    let n = a.cols();
    let outcomes = for_each_support(n, property, k, limits, |_, s| -> Result<SubsetOutcome> {
        if property.full_rank_only() && linalg::rank(a, s, tol)? < s.len() {
            return Ok(SubsetOutcome::Skipped);
        }
        Ok(match rsp::check_rsp_at(a, s, tol)?.holds {
            Verdict::Yes => SubsetOutcome::Pass,
            Verdict::No => SubsetOutcome::Fail,
            Verdict::Marginal => SubsetOutcome::Marginal,
        })
    })?;

    let mut report = RecoveryReport {
        property,
        k,
        holds: Verdict::Yes,
        counterexample: None,
        failure: None,
        subsets_checked: 0,
        subsets_skipped: 0,
        marginal_subsets: Vec::new(),
        failures_by_size: vec![0; k],
    };
    for (s, outcome) in outcomes {
        match outcome? {
            SubsetOutcome::Skipped => report.subsets_skipped += 1,
            SubsetOutcome::Pass => report.subsets_checked += 1,
            SubsetOutcome::Marginal => {
                report.subsets_checked += 1;
                report.holds = report.holds.and(Verdict::Marginal);
                report.marginal_subsets.push(s);
            }
            SubsetOutcome::Fail => {
                report.subsets_checked += 1;
                report.holds = Verdict::No;
                report.failures_by_size[s.len() - 1] += 1;
                if report.counterexample.is_none() {
                    report.counterexample = Some(s);
                    report.failure = Some(OrderFailure::SubsetFailed);
                }
            }
        }
    }
    if property == Property::Wrsp && linalg::rank(a, &IndexSet::full(n), tol)? < k {
        report.holds = Verdict::No;
        if report.counterexample.is_none() {
            report.failure = Some(OrderFailure::NoFullRankSubset);
        }
    }
    Ok(report)
}

pub fn rsp_order_k(
    a: &DenseMatrix,
    k: usize,
    tol: &ToleranceConfig,
    limits: &SearchLimits,
) -> Result<RecoveryReport> {
    order_k(a, Property::Rsp, k, tol, limits)
}

pub fn wrsp_order_k(
    a: &DenseMatrix,
    k: usize,
    tol: &ToleranceConfig,
    limits: &SearchLimits,
) -> Result<RecoveryReport> {
    order_k(a, Property::Wrsp, k, tol, limits)
}

pub fn prsp_order_k(
    a: &DenseMatrix,
    k: usize,
    tol: &ToleranceConfig,
    limits: &SearchLimits,
) -> Result<RecoveryReport> {
    order_k(a, Property::Prsp, k, tol, limits)
}

pub fn pwrsp_order_k(
    a: &DenseMatrix,
    k: usize,
    tol: &ToleranceConfig,
    limits: &SearchLimits,
) -> Result<RecoveryReport> {
    order_k(a, Property::Pwrsp, k, tol, limits)
}

/// Reconstruction must match the planted vector to this accuracy.
pub const RECOVERY_TOL: f64 = 1e-6;
/// Largest off-support mass tolerated on the optimal face.
const FACE_MASS_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub property: Property,
    pub k: usize,
    pub recovered: bool,
    pub failing_support: Option<IndexSet>,
    pub supports_checked: u64,
    pub failures: u64,
    pub trials_per_support: usize,
    pub seed: u64,
}

fn random_on_support(n: usize, s: &IndexSet, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut x = vec![0.0; n];
    for j in s.iter() {
        x[j] = rng.random_range(0.1..=1.0);
    }
    x
}

/// Whether ℓ1 minimization returns `x` and `x` is the only minimizer.
///
/// Uniqueness is established without any range-space argument: the
/// optimal face `{z ≥ 0 : Az = Ax, eᵀz = d*}` must carry no mass off the
/// support of `x`, and `A_S` must have full column rank.
fn recovers(a: &DenseMatrix, x: &[f64], s: &IndexSet, tol: &ToleranceConfig) -> Result<bool> {
    let y = a.mul_vec(x)?;
    let x_hat = match rsp::solve_l1(a, &y, tol) {
        Ok(v) => v,
        Err(Error::CertificateUnavailable(_)) => return Ok(false),
        Err(e) => return Err(e),
    };
    let err = norm_inf(&x_hat.iter().zip(x).map(|(p, q)| p - q).collect::<Vec<_>>());
    if err > RECOVERY_TOL {
        return Ok(false);
    }
    if linalg::rank(a, s, tol)? < s.len() {
        return Ok(false);
    }
    let n = a.cols();
    let d_star: f64 = x_hat.iter().sum();
    let face = a.append_row(&vec![1.0; n])?;
    let mut rhs = y;
    rhs.push(d_star);
    let off_cost: Vec<f64> = (0..n)
        .map(|j| if s.contains(j) { 0.0 } else { -1.0 })
        .collect();
    let lp = StandardLp::nonnegative(off_cost, face, rhs)?;
    let sol = simplex::solve(&lp, tol)?;
    Ok(match sol.status {
        LpStatus::Optimal => -sol.objective_value <= FACE_MASS_TOL,
        // x itself lies on the face, so anything else is a numerical failure.
        _ => false,
    })
}

/// Independent ground truth for [`order_k`]: plants random vectors on each
/// selected support and runs ℓ1 minimization on their measurements.
pub fn recovery_oracle(
    a: &DenseMatrix,
    property: Property,
    k: usize,
    trials_per_support: usize,
    seed: u64,
    tol: &ToleranceConfig,
    limits: &SearchLimits,
) -> Result<OracleReport> {
    validate_order(a, k)?;
    let n = a.cols();
    let trials = trials_per_support.max(1);
    let results = for_each_support(n, property, k, limits, |g, s| -> Result<Option<bool>> {
        if property.full_rank_only() && linalg::rank(a, s, tol)? < s.len() {
            return Ok(None);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(g);
        for _ in 0..trials {
            let x = random_on_support(n, s, &mut rng);
            if !recovers(a, &x, s, tol)? {
                return Ok(Some(false));
            }
        }
        Ok(Some(true))
    })?;
    let mut report = OracleReport {
        property,
        k,
        recovered: true,
        failing_support: None,
        supports_checked: 0,
        failures: 0,
        trials_per_support: trials,
        seed,
    };
    for (s, r) in results {
        match r? {
            None => {}
            Some(ok) => {
                report.supports_checked += 1;
                if !ok {
                    report.recovered = false;
                    report.failures += 1;
                    report.failing_support.get_or_insert(s);
                }
            }
        }
    }
    if property == Property::Wrsp && linalg::rank(a, &IndexSet::full(n), tol)? < k {
        report.recovered = false;
    }
    Ok(report)
}

/// [`recovery_oracle`] for uniform recovery of all K-sparse vectors.
pub fn uniform_recovery_oracle(
    a: &DenseMatrix,
    k: usize,
    trials_per_support: usize,
    seed: u64,
    tol: &ToleranceConfig,
    limits: &SearchLimits,
) -> Result<OracleReport> {
    recovery_oracle(a, Property::Rsp, k, trials_per_support, seed, tol, limits)
}

/// If the RSP of order `k` holds then `k < spark(A)`.
pub fn spark_consistency(
    a: &DenseMatrix,
    k: usize,
    tol: &ToleranceConfig,
    limits: &SearchLimits,
) -> Result<bool> {
    if rsp_order_k(a, k, tol, limits)?.holds != Verdict::Yes {
        return Ok(true);
    }
    Ok(k < linalg::spark(a, tol, limits)?)
}

/// If the RSP of order `k` holds, every planted vector with at most `k`
/// nonzeros must be the unique sparsest nonnegative solution of its
/// measurements.
pub fn unique_sparsest_consequence(
    a: &DenseMatrix,
    k: usize,
    seed: u64,
    tol: &ToleranceConfig,
    limits: &SearchLimits,
) -> Result<bool> {
    if rsp_order_k(a, k, tol, limits)?.holds != Verdict::Yes {
        return Ok(true);
    }
    let n = a.cols();
    let inner = SearchLimits {
        parallelism: crate::Parallelism::Sequential,
        ..*limits
    };
    let checks = for_each_support(n, Property::Rsp, k, limits, |g, s| -> Result<bool> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(g);
        let x = random_on_support(n, s, &mut rng);
        let b = a.mul_vec(&x)?;
        let report = l0::sparsest_supports(a, &b, s.len(), tol, &inner)?;
        Ok(report.k_star == s.len() && report.supports.len() == 1 && report.supports[0] == *s)
    })?;
    let mut all = true;
    for (_, ok) in checks {
        all &= ok?;
    }
    Ok(all)
}
