//! Range space property (RSP) at a support and the uniqueness certificates
//! built on it.
//!
//! The RSP at `S` asks for `η = Aᵀy` with `η_i = 1` on `S` and `η_i < 1`
//! off `S`. It is decided by the LP
//!
//! ```text
//! t* = min t  s.t.  (A_S)ᵀ y = e_S,  (A_Sc)ᵀ y ≤ t e,  t ≥ −1,  y free
//! ```
//!
//! which holds exactly when `t* < 1`. A nonnegative solution `x` of
//! `Ax = b` is the unique least-ℓ1 nonnegative solution iff the RSP holds at
//! its support and `A_S` has full column rank.

use serde::{Deserialize, Serialize};

use crate::config::ToleranceConfig;
use crate::error::{Error, Result};
use crate::linalg::{self, norm_inf, DenseMatrix, IndexSet, RankInfo};
use crate::simplex::{self, LpStatus, StandardLp};
use crate::Verdict;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RspCertificate {
    pub holds: Verdict,
    pub support: IndexSet,
    /// `Aᵀy`; present unless the equality system on `S` is infeasible.
    pub witness_eta: Option<Vec<f64>>,
    pub witness_y: Option<Vec<f64>>,
    /// Optimal value of the check LP (`None` when infeasible).
    pub t_star: Option<f64>,
    pub lp_status: LpStatus,
}

impl RspCertificate {
    /// Largest witness entry off the support (`−∞` if `S` is everything).
    pub fn max_off_support(&self) -> Option<f64> {
        let eta = self.witness_eta.as_ref()?;
        Some(
            (0..eta.len())
                .filter(|j| !self.support.contains(*j))
                .fold(f64::NEG_INFINITY, |acc, j| acc.max(eta[j])),
        )
    }
}

/// Checks the witness conditions without solving anything: `η = Aᵀy`,
/// `η_S = 1` and `η_Sc ≤ 1 − rsp_margin`.
pub fn witness_is_valid(a: &DenseMatrix, cert: &RspCertificate, tol: &ToleranceConfig) -> bool {
    let (Some(eta), Some(y)) = (&cert.witness_eta, &cert.witness_y) else {
        return false;
    };
    let Ok(recomputed) = a.tr_mul_vec(y) else {
        return false;
    };
    if eta.len() != a.cols() {
        return false;
    }
    let scale = norm_inf(y).max(1.0);
    recomputed
        .iter()
        .zip(eta)
        .all(|(r, e)| (r - e).abs() <= tol.feas_tol * scale)
        && eta.iter().enumerate().all(|(j, &e)| {
            if cert.support.contains(j) {
                (e - 1.0).abs() <= tol.feas_tol
            } else {
                e <= 1.0 - tol.rsp_margin
            }
        })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FailureReason {
    RspFailed,
    RankDeficient,
    Both,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniquenessVerdict {
    pub unique: Verdict,
    pub rsp: RspCertificate,
    pub full_column_rank: bool,
    pub rank_found: usize,
    pub rank_marginal: bool,
    /// Rank of `A_S` stacked over a row of ones.
    pub augmented_rank: usize,
    pub augmented_full_rank: bool,
    pub reason: FailureReason,
}

/// Indices with `x_i > zero_tol`; entries below `−zero_tol` are rejected.
pub fn support_of(x: &[f64], tol: &ToleranceConfig) -> Result<IndexSet> {
    let mut idx = Vec::new();
    for (i, &v) in x.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFinite { row: i, col: 0 });
        }
        if v < -tol.zero_tol {
            return Err(Error::NotNonnegative { index: i, value: v });
        }
        if v > tol.zero_tol {
            idx.push(i);
        }
    }
    Ok(IndexSet::from_sorted(idx))
}

/// Classifies an optimal `t*`.
///
/// The exact condition is `t* < 1`, so `t*` equal to 1 at solver accuracy
/// (within `feas_tol`) is a failure; only the band strictly between
/// `1 − rsp_margin` and `1 − feas_tol` is left undecided.
fn classify_margin(t: f64, tol: &ToleranceConfig) -> Verdict {
    if t <= 1.0 - tol.rsp_margin {
        Verdict::Yes
    } else if t >= 1.0 - tol.feas_tol {
        Verdict::No
    } else {
        Verdict::Marginal
    }
}

/// Decides the RSP of `Aᵀ` at support `S`.
pub fn check_rsp_at(
    a: &DenseMatrix,
    s: &IndexSet,
    tol: &ToleranceConfig,
) -> Result<RspCertificate> {
    s.check_bounds(a.cols())?;
    let (m, n) = (a.rows(), a.cols());
    if s.is_empty() {
        return Ok(RspCertificate {
            holds: Verdict::Yes,
            support: s.clone(),
            witness_eta: Some(vec![0.0; n]),
            witness_y: Some(vec![0.0; m]),
            t_star: Some(-1.0),
            lp_status: LpStatus::Optimal,
        });
    }
    let off = s.complement(n);
    // Variables: y (m, free), u = t + 1 >= 0, one slack per off-support column.
    // Rows: a_iᵀy = 1 for i in S; a_jᵀy − u + σ_j = −1 for j off S.
    let nvars = m + 1 + off.len();
    let mut data = Vec::with_capacity(n * nvars);
    let mut rhs = Vec::with_capacity(n);
    for i in s.iter() {
        data.extend(a.column(i));
        data.extend(std::iter::repeat_n(0.0, 1 + off.len()));
        rhs.push(1.0);
    }
    for (k, j) in off.iter().enumerate() {
        data.extend(a.column(j));
        data.push(-1.0);
        data.extend((0..off.len()).map(|p| if p == k { 1.0 } else { 0.0 }));
        rhs.push(-1.0);
    }
    let matrix = DenseMatrix::from_row_major(n, nvars, data)?;
    let mut objective = vec![0.0; nvars];
    objective[m] = 1.0;
    let mut free = vec![false; nvars];
    free[..m].iter_mut().for_each(|f| *f = true);
    let lp = StandardLp::new(objective, matrix, rhs, free)?;

    let sol = simplex::solve(&lp, tol).map_err(|e| Error::CertificateUnavailable(e.to_string()))?;
    match sol.status {
        LpStatus::Infeasible => Ok(RspCertificate {
            holds: Verdict::No,
            support: s.clone(),
            witness_eta: None,
            witness_y: None,
            t_star: None,
            lp_status: LpStatus::Infeasible,
        }),
        LpStatus::Unbounded => Err(Error::CertificateUnavailable(
            "check LP reported unbounded despite t >= -1".into(),
        )),
        LpStatus::Optimal => {
            let check = simplex::check_certificate(&lp, &sol, tol);
            if !check.passed {
                return Err(Error::CertificateUnavailable(format!(
                    "check LP optimality certificate failed: {check:?}"
                )));
            }
            let y = sol.x[..m].to_vec();
            let eta = a.tr_mul_vec(&y)?;
            let t_lp = sol.x[m] - 1.0;
            let max_off = off.iter().fold(f64::NEG_INFINITY, |acc, j| acc.max(eta[j]));
            // The witness itself must respect the margin, not only t*.
            let decisive = t_lp.max(max_off);
            Ok(RspCertificate {
                holds: classify_margin(decisive, tol),
                support: s.clone(),
                witness_eta: Some(eta),
                witness_y: Some(y),
                t_star: Some(t_lp),
                lp_status: LpStatus::Optimal,
            })
        }
    }
}

fn validate_solution(
    a: &DenseMatrix,
    b: &[f64],
    x: &[f64],
    tol: &ToleranceConfig,
) -> Result<IndexSet> {
    if b.len() != a.rows() {
        return Err(Error::DimensionMismatch(format!(
            "b has {} entries for {} rows",
            b.len(),
            a.rows()
        )));
    }
    let ax = a.mul_vec(x)?;
    let residual = norm_inf(&ax.iter().zip(b).map(|(p, q)| p - q).collect::<Vec<_>>());
    if residual.is_nan() || residual > tol.feas_tol * norm_inf(b).max(1.0) {
        return Err(Error::NotASolution { residual });
    }
    support_of(x, tol)
}

fn combine(rsp: RspCertificate, rank: RankInfo, augmented: RankInfo) -> UniquenessVerdict {
    let k = rsp.support.len();
    let full = rank.rank == k;
    let rsp_failed = rsp.holds == Verdict::No;
    let reason = match (rsp_failed, full) {
        (true, false) => FailureReason::Both,
        (true, true) => FailureReason::RspFailed,
        (false, false) => FailureReason::RankDeficient,
        (false, true) => FailureReason::None,
    };
    let unique = match (rsp.holds, full) {
        (_, false) | (Verdict::No, _) => Verdict::No,
        (Verdict::Yes, true) => {
            if rank.marginal {
                Verdict::Marginal
            } else {
                Verdict::Yes
            }
        }
        (Verdict::Marginal, true) => Verdict::Marginal,
    };
    UniquenessVerdict {
        unique,
        rsp,
        full_column_rank: full,
        rank_found: rank.rank,
        rank_marginal: rank.marginal,
        augmented_rank: augmented.rank,
        augmented_full_rank: augmented.rank == k,
        reason,
    }
}

/// Decides whether the nonnegative solution `x` of `Ax = b` is the unique
/// least-ℓ1-norm nonnegative solution.
pub fn certify_uniqueness(
    a: &DenseMatrix,
    b: &[f64],
    x: &[f64],
    tol: &ToleranceConfig,
) -> Result<UniquenessVerdict> {
    let s = validate_solution(a, b, x, tol)?;
    let rsp = check_rsp_at(a, &s, tol)?;
    let rank = linalg::rank_info(a, &s, tol)?;
    let augmented = linalg::augmented_rank_info(a, &s, tol)?;
    Ok(combine(rsp, rank, augmented))
}

/// An optimal vertex of `min eᵀx, Ax = b, x ≥ 0`.
pub fn solve_l1(a: &DenseMatrix, b: &[f64], tol: &ToleranceConfig) -> Result<Vec<f64>> {
    solve_linear_objective(a, b, &vec![1.0; a.cols()], tol).map(|(x, _)| x)
}

/// `min cᵀx, Ax = b, x ≥ 0`, returning the verified optimum and its value.
pub fn solve_linear_objective(
    a: &DenseMatrix,
    b: &[f64],
    c: &[f64],
    tol: &ToleranceConfig,
) -> Result<(Vec<f64>, f64)> {
    let lp = StandardLp::nonnegative(c.to_vec(), a.clone(), b.to_vec())?;
    let sol = simplex::solve(&lp, tol)?;
    match sol.status {
        LpStatus::Infeasible => Err(Error::Infeasible),
        LpStatus::Unbounded => Err(Error::Unbounded),
        LpStatus::Optimal => {
            let check = simplex::check_certificate(&lp, &sol, tol);
            if !check.passed {
                return Err(Error::CertificateUnavailable(format!(
                    "LP certificate failed: {check:?}"
                )));
            }
            Ok((sol.x, sol.objective_value))
        }
    }
}

/// Solves the ℓ1 problem and certifies the returned vertex.
pub fn solve_and_certify(
    a: &DenseMatrix,
    b: &[f64],
    tol: &ToleranceConfig,
) -> Result<(Vec<f64>, UniquenessVerdict)> {
    let x = solve_l1(a, b, tol)?;
    let verdict = certify_uniqueness(a, b, &x, tol)?;
    Ok((x, verdict))
}

fn check_weights(w: &[f64], n: usize) -> Result<Vec<f64>> {
    if w.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} weights for {n} columns",
            w.len()
        )));
    }
    if let Some(index) = w.iter().position(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::NonpositiveWeight {
            index,
            value: w[index],
        });
    }
    Ok(w.iter().map(|v| 1.0 / v).collect())
}

/// Weighted RSP: `η ∈ R(Aᵀ)`, `η_i = w_i` on `S`, `η_i < w_i` off `S`,
/// decided as the plain RSP of `(A W⁻¹)ᵀ`. The witness returned is that of
/// the scaled matrix.
pub fn check_weighted_rsp_at(
    a: &DenseMatrix,
    s: &IndexSet,
    w: &[f64],
    tol: &ToleranceConfig,
) -> Result<RspCertificate> {
    let inv = check_weights(w, a.cols())?;
    check_rsp_at(&a.scale_columns(&inv)?, s, tol)
}

/// Uniqueness for the weighted problem `min wᵀx, Ax = b, x ≥ 0`.
pub fn certify_weighted_uniqueness(
    a: &DenseMatrix,
    b: &[f64],
    w: &[f64],
    x: &[f64],
    tol: &ToleranceConfig,
) -> Result<UniquenessVerdict> {
    let inv = check_weights(w, a.cols())?;
    let s = validate_solution(a, b, x, tol)?;
    let scaled = a.scale_columns(&inv)?;
    let rsp = check_rsp_at(&scaled, &s, tol)?;
    let rank = linalg::rank_info(a, &s, tol)?;
    let augmented = linalg::augmented_rank_info(&scaled, &s, tol)?;
    Ok(combine(rsp, rank, augmented))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpSparsestReport {
    pub d_star: f64,
    pub augmented_matrix: DenseMatrix,
    pub augmented_rhs: Vec<f64>,
    pub x: Vec<f64>,
    pub verdict: UniquenessVerdict,
}

/// Reduces "sparsest optimal solution of `min cᵀx, Ax = b, x ≥ 0`" to an
/// ℓ1 problem on `[A; cᵀ] x = [b; d*]` and certifies its solution there.
pub fn lp_sparsest_pipeline(
    a: &DenseMatrix,
    b: &[f64],
    c: &[f64],
    tol: &ToleranceConfig,
) -> Result<LpSparsestReport> {
    let (_, d_star) = solve_linear_objective(a, b, c, tol)?;
    let augmented_matrix = a.append_row(c)?;
    let mut augmented_rhs = b.to_vec();
    augmented_rhs.push(d_star);
    let (x, verdict) = solve_and_certify(&augmented_matrix, &augmented_rhs, tol)?;
    Ok(LpSparsestReport {
        d_star,
        augmented_matrix,
        augmented_rhs,
        x,
        verdict,
    })
}
