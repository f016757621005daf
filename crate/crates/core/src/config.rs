//! Numerical tolerances and enumeration limits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Thresholds used to turn exact-arithmetic statements into floating-point
/// decisions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    /// LP feasibility residual.
    pub feas_tol: f64,
    /// Relative pivot threshold for numerical rank.
    pub rank_tol: f64,
    /// Required gap below 1 for the off-support entries of an RSP witness.
    pub rsp_margin: f64,
    /// Duality gap and complementary slackness.
    pub gap_tol: f64,
    /// Entries above this count as nonzero.
    pub zero_tol: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            feas_tol: 1e-8,
            rank_tol: 1e-8,
            rsp_margin: 1e-7,
            gap_tol: 1e-7,
            zero_tol: 1e-9,
        }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("feas_tol", self.feas_tol),
            ("rank_tol", self.rank_tol),
            ("rsp_margin", self.rsp_margin),
            ("gap_tol", self.gap_tol),
            ("zero_tol", self.zero_tol),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidTolerance(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if self.rsp_margin <= self.feas_tol {
            return Err(Error::InvalidTolerance(format!(
                "rsp_margin ({}) must exceed feas_tol ({})",
                self.rsp_margin, self.feas_tol
            )));
        }
        Ok(())
    }
}

/// How subset enumerations are executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Parallelism {
    Sequential,
    /// Uses the rayon pool when the `parallel` feature is enabled and runs
    /// sequentially otherwise.
    #[default]
    Parallel,
}

pub const DEFAULT_SUBSET_BUDGET: u64 = 10_000_000;

/// Limits for exhaustive subset searches (spark, sparsest supports, order-K).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchLimits {
    pub subset_budget: u64,
    pub parallelism: Parallelism,
}

impl Default for SearchLimits {
    fn default() -> Self {
        Self {
            subset_budget: DEFAULT_SUBSET_BUDGET,
            parallelism: Parallelism::default(),
        }
    }
}

impl SearchLimits {
    pub fn sequential() -> Self {
        Self {
            parallelism: Parallelism::Sequential,
            ..Self::default()
        }
    }

    pub(crate) fn check(&self, needed: u64) -> Result<()> {
        if needed > self.subset_budget {
            Err(Error::BudgetExceeded {
                needed,
                budget: self.subset_budget,
            })
        } else {
            Ok(())
        }
    }
}
