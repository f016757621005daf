//! Two-phase dense tableau simplex for `min cᵀx, Bx = p` with per-variable
//! sign restrictions, returning primal/dual pairs that can be re-checked
//! independently with [`verify_certificate`].
//!
//! Free variables are split into a difference of nonnegative columns. Rows
//! with negative right-hand side are negated so that phase 1 can start from
//! an all-artificial basis. Pricing is Dantzig's rule until a run of
//! degenerate pivots, after which Bland's rule is used for the rest of the
//! phase.

use serde::{Deserialize, Serialize};

use crate::config::ToleranceConfig;
use crate::error::{Error, Result};
use crate::linalg::{dot, norm_inf, solve_square, DenseMatrix};

/// Consecutive zero-step pivots before switching to Bland's rule.
const BLAND_AFTER: usize = 10;
const PIVOT_EPS: f64 = 1e-9;
const STEP_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardLp {
    pub objective: Vec<f64>,
    pub matrix: DenseMatrix,
    pub rhs: Vec<f64>,
    /// `true` marks a variable unrestricted in sign.
    pub free: Vec<bool>,
}

impl StandardLp {
    pub fn new(
        objective: Vec<f64>,
        matrix: DenseMatrix,
        rhs: Vec<f64>,
        free: Vec<bool>,
    ) -> Result<Self> {
        let (m, n) = (matrix.rows(), matrix.cols());
        if objective.len() != n || free.len() != n || rhs.len() != m {
            return Err(Error::DimensionMismatch(format!(
                "LP with {m}x{n} matrix, objective {}, rhs {}, free mask {}",
                objective.len(),
                rhs.len(),
                free.len()
            )));
        }
        for (row, v) in objective.iter().chain(&rhs).enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite { row, col: 0 });
            }
        }
        Ok(Self {
            objective,
            matrix,
            rhs,
            free,
        })
    }

    /// All variables nonnegative.
    pub fn nonnegative(objective: Vec<f64>, matrix: DenseMatrix, rhs: Vec<f64>) -> Result<Self> {
        let n = matrix.cols();
        Self::new(objective, matrix, rhs, vec![false; n])
    }

    pub fn num_vars(&self) -> usize {
        self.matrix.cols()
    }

    pub fn num_rows(&self) -> usize {
        self.matrix.rows()
    }

    pub fn default_pivot_limit(&self) -> usize {
        50 * (self.num_rows() + self.num_vars())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Primal point; for `Infeasible` the phase-1 terminal point.
    pub x: Vec<f64>,
    /// Dual vector; for `Infeasible` a Farkas vector with `Bᵀy ≤ 0`, `pᵀy > 0`
    /// over the nonnegative variables.
    pub y: Vec<f64>,
    /// `c − Bᵀy`.
    pub reduced_costs: Vec<f64>,
    pub objective_value: f64,
    /// Improving direction when `Unbounded`.
    pub ray: Option<Vec<f64>>,
    pub phase1_objective: f64,
    pub pivots: usize,
}

/// Maps a tableau column back to an original variable.
#[derive(Clone, Copy)]
struct Column {
    var: usize,
    sign: f64,
}

struct Tableau {
    m: usize,
    /// structural + artificial columns
    width: usize,
    structural: usize,
    t: Vec<f64>,
    basis: Vec<usize>,
}

enum Outcome {
    Optimal,
    Unbounded(usize),
}

impl Tableau {
    fn idx(&self, i: usize, j: usize) -> usize {
        i * (self.width + 1) + j
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[self.idx(i, j)]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.at(i, self.width)
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let stride = self.width + 1;
        let p = self.at(r, q);
        for j in 0..stride {
            self.t[r * stride + j] /= p;
        }
        self.t[r * stride + q] = 1.0;
        for i in 0..=self.m {
            if i == r {
                continue;
            }
            let f = self.t[i * stride + q];
            if f == 0.0 {
                continue;
            }
            for j in 0..stride {
                self.t[i * stride + j] -= f * self.t[r * stride + j];
            }
            self.t[i * stride + q] = 0.0;
        }
        for i in 0..self.m {
            let k = i * stride + self.width;
            if self.t[k] < 0.0 && self.t[k] > -1e-11 {
                self.t[k] = 0.0;
            }
        }
        self.basis[r] = q;
    }

    fn entering(&self, cost_eps: f64, bland: bool) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for j in 0..self.structural {
            let d = self.at(self.m, j);
            if d < -cost_eps {
                if bland {
                    return Some(j);
                }
                if best.is_none_or(|(_, bd)| d < bd) {
                    best = Some((j, d));
                }
            }
        }
        best.map(|(j, _)| j)
    }

    /// Minimum ratio; ties go to the smallest basic variable index.
    fn leaving(&self, q: usize) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for i in 0..self.m {
            let a = self.at(i, q);
            if a <= PIVOT_EPS {
                continue;
            }
            let ratio = self.rhs(i).max(0.0) / a;
            best = match best {
                None => Some((i, ratio)),
                Some((bi, br)) => {
                    if ratio < br - STEP_EPS
                        || (ratio <= br + STEP_EPS && self.basis[i] < self.basis[bi])
                    {
                        Some((i, ratio))
                    } else {
                        Some((bi, br))
                    }
                }
            };
        }
        best.map(|(i, _)| i)
    }

    fn run(&mut self, cost_eps: f64, pivots: &mut usize, limit: usize) -> Result<Outcome> {
        let mut degenerate_run = 0;
        let mut bland = false;
        loop {
            let Some(q) = self.entering(cost_eps, bland) else {
                return Ok(Outcome::Optimal);
            };
            let Some(r) = self.leaving(q) else {
                return Ok(Outcome::Unbounded(q));
            };
            if *pivots >= limit {
                return Err(Error::IterationLimit(limit));
            }
            if self.rhs(r).max(0.0) / self.at(r, q) <= STEP_EPS {
                degenerate_run += 1;
                if degenerate_run >= BLAND_AFTER {
                    bland = true;
                }
            } else {
                degenerate_run = 0;
            }
            self.pivot(r, q);
            *pivots += 1;
        }
    }

    fn set_objective(&mut self, costs: &[f64]) {
        let stride = self.width + 1;
        for j in 0..=self.width {
            let base = if j < self.width { costs[j] } else { 0.0 };
            let s: f64 = (0..self.m)
                .map(|i| costs[self.basis[i]] * self.at(i, j))
                .sum();
            self.t[self.m * stride + j] = base - s;
        }
    }
}

/// Solves with the default pivot limit `50 (m + n)`.
pub fn solve(lp: &StandardLp, tol: &ToleranceConfig) -> Result<LpSolution> {
    solve_with_limit(lp, tol, lp.default_pivot_limit())
}

pub fn solve_with_limit(
    lp: &StandardLp,
    tol: &ToleranceConfig,
    pivot_limit: usize,
) -> Result<LpSolution> {
    let (m, n) = (lp.num_rows(), lp.num_vars());
    let row_sign: Vec<f64> = lp
        .rhs
        .iter()
        .map(|&p| if p < 0.0 { -1.0 } else { 1.0 })
        .collect();
    let rhs: Vec<f64> = lp.rhs.iter().zip(&row_sign).map(|(p, s)| p * s).collect();

    let mut columns = Vec::with_capacity(n + lp.free.iter().filter(|f| **f).count());
    for j in 0..n {
        columns.push(Column { var: j, sign: 1.0 });
        if lp.free[j] {
            columns.push(Column { var: j, sign: -1.0 });
        }
    }
    let structural = columns.len();
    let width = structural + m;
    let stride = width + 1;

    let entry = |i: usize, col: &Column| col.sign * row_sign[i] * lp.matrix.get(i, col.var);
    let mut t = vec![0.0; (m + 1) * stride];
    for i in 0..m {
        for (k, col) in columns.iter().enumerate() {
            t[i * stride + k] = entry(i, col);
        }
        t[i * stride + structural + i] = 1.0;
        t[i * stride + width] = rhs[i];
    }
    let mut tab = Tableau {
        m,
        width,
        structural,
        t,
        basis: (structural..width).collect(),
    };

    let mut pivots = 0;
    let mut phase1_costs = vec![0.0; width];
    phase1_costs[structural..].iter_mut().for_each(|c| *c = 1.0);
    tab.set_objective(&phase1_costs);
    // Phase 1 is bounded below by zero, so it cannot report a ray.
    tab.run(1e-11, &mut pivots, pivot_limit)?;
    let phase1_objective = -tab.rhs(m);

    let internal_x = |tab: &Tableau| {
        let mut x = vec![0.0; n];
        for (i, &b) in tab.basis.iter().enumerate() {
            if b < structural {
                x[columns[b].var] += columns[b].sign * tab.rhs(i);
            }
        }
        x
    };

    if phase1_objective > tol.feas_tol * norm_inf(&lp.rhs).max(1.0) {
        // y'_i = 1 − d_i on the artificial columns.
        let y: Vec<f64> = (0..m)
            .map(|i| row_sign[i] * (1.0 - tab.at(m, structural + i)))
            .collect();
        let reduced_costs = reduced_costs(lp, &y);
        let x = internal_x(&tab);
        return Ok(LpSolution {
            status: LpStatus::Infeasible,
            objective_value: dot(&lp.objective, &x),
            x,
            y,
            reduced_costs,
            ray: None,
            phase1_objective,
            pivots,
        });
    }

    // Drive remaining artificials out of the basis; rows where that is
    // impossible are redundant and keep a zero artificial.
    for r in 0..m {
        if tab.basis[r] < structural {
            continue;
        }
        let best = (0..structural)
            .map(|j| (j, tab.at(r, j).abs()))
            .filter(|&(_, a)| a > PIVOT_EPS)
            .fold(None::<(usize, f64)>, |acc, c| match acc {
                Some(b) if b.1 >= c.1 => Some(b),
                _ => Some(c),
            });
        if let Some((q, _)) = best {
            tab.pivot(r, q);
            pivots += 1;
        }
    }

    let mut costs = vec![0.0; width];
    for (k, col) in columns.iter().enumerate() {
        costs[k] = col.sign * lp.objective[col.var];
    }
    tab.set_objective(&costs);
    let cost_eps = 1e-10 * norm_inf(&lp.objective).max(1.0);
    let outcome = tab.run(cost_eps, &mut pivots, pivot_limit)?;

    if let Outcome::Unbounded(q) = outcome {
        let mut ray = vec![0.0; n];
        ray[columns[q].var] += columns[q].sign;
        for (i, &b) in tab.basis.iter().enumerate() {
            if b < structural {
                ray[columns[b].var] -= columns[b].sign * tab.at(i, q);
            }
        }
        let x = internal_x(&tab);
        let y = vec![0.0; m];
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            objective_value: dot(&lp.objective, &x),
            reduced_costs: reduced_costs(lp, &y),
            x,
            y,
            ray: Some(ray),
            phase1_objective,
            pivots,
        });
    }

    // Re-solve the final basis against the original data so that the
    // certificate does not inherit tableau drift.
    let column_of = |k: usize| -> Vec<f64> {
        if k < structural {
            (0..m).map(|i| entry(i, &columns[k])).collect()
        } else {
            (0..m)
                .map(|i| if i == k - structural { 1.0 } else { 0.0 })
                .collect()
        }
    };
    let mut basis_mat = vec![0.0; m * m];
    for (c, &k) in tab.basis.iter().enumerate() {
        for (i, v) in column_of(k).into_iter().enumerate() {
            basis_mat[i * m + c] = v;
        }
    }
    let mut basis_tr = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..m {
            basis_tr[j * m + i] = basis_mat[i * m + j];
        }
    }
    let cb: Vec<f64> = tab.basis.iter().map(|&k| costs[k]).collect();
    let refined_x = solve_square(basis_mat, m, rhs.clone());
    let refined_y = solve_square(basis_tr, m, cb);

    let x_basic: Vec<f64> = match refined_x {
        Some(v) if v.iter().all(|x| x.is_finite()) => v,
        _ => (0..m).map(|i| tab.rhs(i)).collect(),
    };
    let mut x = vec![0.0; n];
    for (i, &b) in tab.basis.iter().enumerate() {
        if b < structural {
            let v = if x_basic[i] < 0.0 && x_basic[i] >= -tol.feas_tol {
                0.0
            } else {
                x_basic[i]
            };
            x[columns[b].var] += columns[b].sign * v;
        }
    }
    let y: Vec<f64> = match refined_y {
        Some(v) if v.iter().all(|x| x.is_finite()) => {
            v.iter().zip(&row_sign).map(|(a, s)| a * s).collect()
        }
        // d_j = 0 − y'_j on artificial columns in phase 2.
        _ => (0..m)
            .map(|i| -row_sign[i] * tab.at(m, structural + i))
            .collect(),
    };
    Ok(LpSolution {
        status: LpStatus::Optimal,
        objective_value: dot(&lp.objective, &x),
        reduced_costs: reduced_costs(lp, &y),
        x,
        y,
        ray: None,
        phase1_objective,
        pivots,
    })
}

fn reduced_costs(lp: &StandardLp, y: &[f64]) -> Vec<f64> {
    let bty = lp.matrix.tr_mul_vec(y).expect("dual length matches rows");
    lp.objective.iter().zip(bty).map(|(c, v)| c - v).collect()
}

/// Residuals of an optimality certificate, evaluated from scratch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertificateCheck {
    pub primal_residual: f64,
    pub min_nonneg_x: f64,
    pub min_nonneg_reduced_cost: f64,
    pub max_free_reduced_cost: f64,
    pub reported_reduced_cost_error: f64,
    pub complementarity: f64,
    pub duality_gap: f64,
    pub passed: bool,
}

pub fn check_certificate(
    lp: &StandardLp,
    sol: &LpSolution,
    tol: &ToleranceConfig,
) -> CertificateCheck {
    let n = lp.num_vars();
    let shapes_ok =
        sol.x.len() == n && sol.y.len() == lp.num_rows() && sol.reduced_costs.len() == n;
    if !shapes_ok || sol.status != LpStatus::Optimal {
        return CertificateCheck {
            primal_residual: f64::INFINITY,
            min_nonneg_x: f64::NEG_INFINITY,
            min_nonneg_reduced_cost: f64::NEG_INFINITY,
            max_free_reduced_cost: f64::INFINITY,
            reported_reduced_cost_error: f64::INFINITY,
            complementarity: f64::INFINITY,
            duality_gap: f64::INFINITY,
            passed: false,
        };
    }
    let bx = lp.matrix.mul_vec(&sol.x).expect("shape checked");
    let primal_residual = norm_inf(
        &bx.iter()
            .zip(&lp.rhs)
            .map(|(a, b)| a - b)
            .collect::<Vec<_>>(),
    );
    let s = reduced_costs(lp, &sol.y);
    let mut min_nonneg_x = f64::INFINITY;
    let mut min_nonneg_reduced_cost = f64::INFINITY;
    let mut max_free_reduced_cost: f64 = 0.0;
    for ((&free, &sj), &xj) in lp.free.iter().zip(&s).zip(&sol.x) {
        if free {
            max_free_reduced_cost = max_free_reduced_cost.max(sj.abs());
        } else {
            min_nonneg_x = min_nonneg_x.min(xj);
            min_nonneg_reduced_cost = min_nonneg_reduced_cost.min(sj);
        }
    }
    let reported_reduced_cost_error = s
        .iter()
        .zip(&sol.reduced_costs)
        .fold(0.0_f64, |acc, (a, b)| acc.max((a - b).abs()));
    let complementarity = sol
        .x
        .iter()
        .zip(&s)
        .fold(0.0_f64, |acc, (x, s)| acc.max((x * s).abs()));
    let primal_obj = dot(&lp.objective, &sol.x);
    let dual_obj = dot(&lp.rhs, &sol.y);
    let duality_gap = (primal_obj - dual_obj).abs();

    let passed = primal_residual <= tol.feas_tol * norm_inf(&lp.rhs).max(1.0)
        && (min_nonneg_x >= -tol.feas_tol || min_nonneg_x == f64::INFINITY)
        && (min_nonneg_reduced_cost >= -tol.feas_tol || min_nonneg_reduced_cost == f64::INFINITY)
        && max_free_reduced_cost <= tol.feas_tol
        && reported_reduced_cost_error <= tol.feas_tol
        && complementarity <= tol.gap_tol
        && duality_gap <= tol.gap_tol * primal_obj.abs().max(1.0)
        && (sol.objective_value - primal_obj).abs() <= tol.gap_tol * primal_obj.abs().max(1.0);
    CertificateCheck {
        primal_residual,
        min_nonneg_x,
        min_nonneg_reduced_cost,
        max_free_reduced_cost,
        reported_reduced_cost_error,
        complementarity,
        duality_gap,
        passed,
    }
}

/// Re-checks primal feasibility, dual feasibility, complementary slackness
/// and the duality gap of an `Optimal` solution.
pub fn verify_certificate(lp: &StandardLp, sol: &LpSolution, tol: &ToleranceConfig) -> bool {
    check_certificate(lp, sol, tol).passed
}
