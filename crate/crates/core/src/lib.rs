//! Certificates for nonnegative sparse recovery by ℓ1 minimization.
//!
//! The crate decides, with witnesses that can be re-checked without any
//! solver, whether
//!
//! * a nonnegative solution of `Ax = b` is the unique least-ℓ1-norm
//!   nonnegative solution ([`rsp::certify_uniqueness`]);
//! * the ℓ0 and ℓ1 problems agree on a given system
//!   ([`l0::equivalence_verdict`]);
//! * a sensing matrix recovers every (or every full-rank) K-sparse
//!   nonnegative vector ([`order_k`]).
//!
//! All decisions reduce to small linear programs, solved by the dense
//! simplex in [`simplex`], and to pivoted-QR rank tests in [`linalg`].
//! Subset enumerations run on rayon when the `parallel` feature is on.
//!
//! Indices are 0-based throughout.

pub mod config;
pub mod error;
pub mod l0;
pub mod linalg;
pub mod order_k;
mod parallel;
pub mod rsp;
pub mod simplex;
pub mod subsets;

use serde::{Deserialize, Serialize};

pub use config::{Parallelism, SearchLimits, ToleranceConfig};
pub use error::{Error, Result};
pub use linalg::{DenseMatrix, IndexSet};

/// Three-valued decision. `Marginal` marks answers that a perturbation of
/// the size of the configured tolerances could flip.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Yes,
    No,
    Marginal,
}

impl Verdict {
    pub fn is_yes(self) -> bool {
        self == Verdict::Yes
    }

    /// `No` dominates `Marginal`, which dominates `Yes`.
    pub fn and(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (No, _) | (_, No) => No,
            (Marginal, _) | (_, Marginal) => Marginal,
            _ => Yes,
        }
    }
}
