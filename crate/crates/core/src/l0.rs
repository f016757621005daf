//! Exhaustive ℓ0 ground truth: all sparsest nonnegative solutions, the
//! G1/G2/G3 classification, and the ℓ0/ℓ1 equivalence verdict.

use serde::{Deserialize, Serialize};

use crate::config::{SearchLimits, ToleranceConfig};
use crate::error::{Error, Result};
use crate::linalg::{self, norm_inf, DenseMatrix, IndexSet};
use crate::parallel;
use crate::rsp::{self, UniquenessVerdict};
use crate::simplex::{self, LpStatus, StandardLp};
use crate::subsets;
use crate::Verdict;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparsestReport {
    pub k_star: usize,
    /// Sorted, pairwise distinct, all of size `k_star`.
    pub supports: Vec<IndexSet>,
    /// One nonnegative solution per support, length `n`.
    pub representatives: Vec<Vec<f64>>,
    /// `A_S` has full column rank, so the solution on `S` is unique.
    pub unique_within_support: Vec<bool>,
    pub subsets_checked: u64,
}

/// Nonnegative solution of `A_S z = b` lifted to length `n`, if any.
fn feasible_on(
    a: &DenseMatrix,
    s: &IndexSet,
    b: &[f64],
    tol: &ToleranceConfig,
) -> Result<Option<Vec<f64>>> {
    let sub = a.submatrix(s)?;
    let lp = StandardLp::nonnegative(vec![0.0; s.len()], sub, b.to_vec())?;
    let sol = simplex::solve(&lp, tol)?;
    if sol.status != LpStatus::Optimal || !simplex::verify_certificate(&lp, &sol, tol) {
        return Ok(None);
    }
    let mut x = vec![0.0; a.cols()];
    for (z, j) in sol.x.iter().zip(s.iter()) {
        x[j] = z.max(0.0);
    }
    Ok(Some(x))
}

/// Enumerates supports by increasing size and stops at the first size that
/// admits a nonnegative solution.
pub fn sparsest_supports(
    a: &DenseMatrix,
    b: &[f64],
    max_k: usize,
    tol: &ToleranceConfig,
    limits: &SearchLimits,
) -> Result<SparsestReport> {
    let (m, n) = (a.rows(), a.cols());
    if b.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "b has {} entries for {m} rows",
            b.len()
        )));
    }
    if norm_inf(b) <= tol.feas_tol {
        return Ok(SparsestReport {
            k_star: 0,
            supports: vec![IndexSet::empty()],
            representatives: vec![vec![0.0; n]],
            unique_within_support: vec![true],
            subsets_checked: 1,
        });
    }
    let max_k = max_k.min(n);
    let mut checked: u64 = 1;
    for k in 1..=max_k {
        let count = subsets::binomial(n, k);
        limits.check(checked.saturating_add(count))?;
        checked += count;
        let found = parallel::map_range(count, limits.parallelism, |r| {
            let s = IndexSet::from_sorted(subsets::unrank(n, k, r));
            feasible_on(a, &s, b, tol)
        });
        let mut hits: Vec<(IndexSet, Vec<f64>)> = Vec::new();
        for rep in found {
            if let Some(x) = rep? {
                let exact =
                    IndexSet::from_sorted((0..n).filter(|&j| x[j] > tol.zero_tol).collect());
                hits.push((exact, x));
            }
        }
        let Some(k_star) = hits.iter().map(|(s, _)| s.len()).min() else {
            continue;
        };
        // Accidental zeros attribute a solution to its exact support; the
        // first enumerated subset producing a support supplies the representative.
        let mut best: Vec<(IndexSet, Vec<f64>)> = Vec::new();
        for (s, x) in hits.into_iter().filter(|(s, _)| s.len() == k_star) {
            if !best.iter().any(|(t, _)| *t == s) {
                best.push((s, x));
            }
        }
        best.sort_by(|p, q| p.0.cmp(&q.0));
        let unique_within_support = best
            .iter()
            .map(|(s, _)| linalg::rank(a, s, tol).map(|r| r == s.len()))
            .collect::<Result<Vec<_>>>()?;
        let (supports, representatives) = best.into_iter().unzip();
        return Ok(SparsestReport {
            k_star,
            supports,
            representatives,
            unique_within_support,
            subsets_checked: checked,
        });
    }
    Err(Error::NoSolutionWithin(max_k))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClassKind {
    /// Unique ℓ1 optimum and unique sparsest solution.
    G1,
    /// Unique ℓ1 optimum, several sparsest solutions.
    G2,
    /// Several ℓ1 optima.
    G3,
    /// The ℓ1 uniqueness verdict was marginal.
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemClass {
    pub class: ClassKind,
    pub l1_unique: bool,
    pub sparsest_count: usize,
    pub l1_solution: Vec<f64>,
    pub l1_verdict: UniquenessVerdict,
    pub sparsest: SparsestReport,
}

pub fn classify_system(
    a: &DenseMatrix,
    b: &[f64],
    tol: &ToleranceConfig,
    limits: &SearchLimits,
) -> Result<SystemClass> {
    let (l1_solution, l1_verdict) = rsp::solve_and_certify(a, b, tol)?;
    let sparsest = sparsest_supports(a, b, a.cols(), tol, limits)?;
    Ok(class_from_parts(l1_solution, l1_verdict, sparsest))
}

pub fn class_from_parts(
    l1_solution: Vec<f64>,
    l1_verdict: UniquenessVerdict,
    sparsest: SparsestReport,
) -> SystemClass {
    let sparsest_count = sparsest.supports.len();
    let class = match l1_verdict.unique {
        Verdict::Marginal => ClassKind::Indeterminate,
        Verdict::No => ClassKind::G3,
        Verdict::Yes if sparsest_count == 1 => ClassKind::G1,
        Verdict::Yes => ClassKind::G2,
    };
    SystemClass {
        class,
        l1_unique: l1_verdict.unique == Verdict::Yes,
        sparsest_count,
        l1_solution,
        l1_verdict,
        sparsest,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Equivalence {
    Equivalent,
    /// Equivalent, and the sparsest solution is unique.
    StronglyEquivalent,
    NotEquivalent,
    Indeterminate,
}

impl Equivalence {
    pub fn is_equivalent(self) -> bool {
        matches!(
            self,
            Equivalence::Equivalent | Equivalence::StronglyEquivalent
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub verdict: Equivalence,
    /// RSP verdict per sparsest support, aligned with `sparsest.supports`.
    pub rsp_per_support: Vec<Verdict>,
    pub passing_support: Option<IndexSet>,
    pub sparsest: SparsestReport,
}

/// ℓ0 and ℓ1 are equivalent iff the RSP holds at some sparsest support; at
/// most one such support can exist.
pub fn equivalence_verdict(
    a: &DenseMatrix,
    b: &[f64],
    tol: &ToleranceConfig,
    limits: &SearchLimits,
) -> Result<EquivalenceReport> {
    let sparsest = sparsest_supports(a, b, a.cols(), tol, limits)?;
    equivalence_from_report(a, sparsest, tol)
}

pub fn equivalence_from_report(
    a: &DenseMatrix,
    sparsest: SparsestReport,
    tol: &ToleranceConfig,
) -> Result<EquivalenceReport> {
    let rsp_per_support = sparsest
        .supports
        .iter()
        .map(|s| rsp::check_rsp_at(a, s, tol).map(|c| c.holds))
        .collect::<Result<Vec<_>>>()?;
    let passing_support = rsp_per_support
        .iter()
        .position(|v| *v == Verdict::Yes)
        .map(|p| sparsest.supports[p].clone());
    let verdict = if passing_support.is_some() {
        if sparsest.supports.len() == 1 {
            Equivalence::StronglyEquivalent
        } else {
            Equivalence::Equivalent
        }
    } else if rsp_per_support.contains(&Verdict::Marginal) {
        Equivalence::Indeterminate
    } else {
        Equivalence::NotEquivalent
    };
    Ok(EquivalenceReport {
        verdict,
        rsp_per_support,
        passing_support,
        sparsest,
    })
}
