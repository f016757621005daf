//! Dense matrices, column index sets, numerical rank, spark and mutual
//! coherence.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::config::{SearchLimits, ToleranceConfig};
use crate::error::{Error, Result};
use crate::parallel;
use crate::subsets;

/// Row-major dense `rows x cols` matrix with finite entries.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMatrix", into = "RawMatrix")]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl TryFrom<RawMatrix> for DenseMatrix {
    type Error = Error;

    fn try_from(raw: RawMatrix) -> Result<Self> {
        DenseMatrix::from_row_major(raw.rows, raw.cols, raw.data)
    }
}

impl From<DenseMatrix> for RawMatrix {
    fn from(m: DenseMatrix) -> Self {
        RawMatrix {
            rows: m.rows,
            cols: m.cols,
            data: m.data,
        }
    }
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix({}x{})", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        Ok(())
    }
}

impl DenseMatrix {
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyMatrix { rows, cols });
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / cols,
                col: pos % cols,
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|r| r.len() != n) {
            return Err(Error::DimensionMismatch(format!(
                "row {bad} has {} entries, expected {n}",
                rows[bad].len()
            )));
        }
        Self::from_row_major(m, n, rows.concat())
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Self::from_row_major(n, n, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn as_row_major(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// Columns `S` in ascending index order.
    pub fn submatrix(&self, s: &IndexSet) -> Result<DenseMatrix> {
        s.check_bounds(self.cols)?;
        let mut data = Vec::with_capacity(self.rows * s.len());
        for i in 0..self.rows {
            data.extend(s.iter().map(|j| self.get(i, j)));
        }
        DenseMatrix::from_row_major(self.rows, s.len(), data)
    }

    /// `A x`.
    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} against {} columns",
                x.len(),
                self.cols
            )));
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), x)).collect())
    }

    /// `Aᵀ y`.
    pub fn tr_mul_vec(&self, y: &[f64]) -> Result<Vec<f64>> {
        if y.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} against {} rows",
                y.len(),
                self.rows
            )));
        }
        let mut out = vec![0.0; self.cols];
        for (i, &yi) in y.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += a * yi;
            }
        }
        Ok(out)
    }

    /// `A · diag(scale)`.
    pub fn scale_columns(&self, scale: &[f64]) -> Result<DenseMatrix> {
        if scale.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "{} column scales for {} columns",
                scale.len(),
                self.cols
            )));
        }
        let data = self
            .data
            .iter()
            .enumerate()
            .map(|(p, v)| v * scale[p % self.cols])
            .collect();
        DenseMatrix::from_row_major(self.rows, self.cols, data)
    }

    /// Stacks `row` under the matrix.
    pub fn append_row(&self, row: &[f64]) -> Result<DenseMatrix> {
        if row.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "appended row has {} entries, expected {}",
                row.len(),
                self.cols
            )));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(row);
        DenseMatrix::from_row_major(self.rows + 1, self.cols, data)
    }

    fn max_abs_in(&self, s: &IndexSet) -> f64 {
        (0..self.rows)
            .flat_map(|i| s.iter().map(move |j| (i, j)))
            .fold(0.0, |acc, (i, j)| acc.max(self.get(i, j).abs()))
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Sorted set of distinct 0-based column indices.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct IndexSet(Vec<usize>);

impl IndexSet {
    pub fn empty() -> Self {
        IndexSet(Vec::new())
    }

    /// Sorts the indices; duplicates are rejected.
    pub fn new(mut indices: Vec<usize>) -> Result<Self> {
        indices.sort_unstable();
        if let Some(w) = indices.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateIndex(w[0]));
        }
        Ok(IndexSet(indices))
    }

    pub fn full(n: usize) -> Self {
        IndexSet((0..n).collect())
    }

    pub(crate) fn from_sorted(indices: Vec<usize>) -> Self {
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        IndexSet(indices)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn contains(&self, j: usize) -> bool {
        self.0.binary_search(&j).is_ok()
    }

    pub fn is_subset_of(&self, other: &IndexSet) -> bool {
        self.iter().all(|j| other.contains(j))
    }

    /// `{0..n} \ S`.
    pub fn complement(&self, n: usize) -> IndexSet {
        IndexSet((0..n).filter(|j| !self.contains(*j)).collect())
    }

    pub fn check_bounds(&self, n: usize) -> Result<()> {
        match self.0.last() {
            Some(&last) if last >= n => Err(Error::IndexOutOfRange { index: last, n }),
            _ => Ok(()),
        }
    }
}

impl TryFrom<Vec<usize>> for IndexSet {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        IndexSet::new(v)
    }
}

impl From<IndexSet> for Vec<usize> {
    fn from(s: IndexSet) -> Self {
        s.0
    }
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (p, j) in self.0.iter().enumerate() {
            if p > 0 {
                write!(f, ",")?;
            }
            write!(f, "{j}")?;
        }
        write!(f, "}}")
    }
}

/// Outcome of a pivoted QR rank computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankInfo {
    pub rank: usize,
    /// Pivot acceptance threshold actually used.
    pub threshold: f64,
    /// Set when an accepted or rejected pivot lies within a factor 10 of the
    /// threshold.
    pub marginal: bool,
}

/// Householder QR with column pivoting on a column-major `m x k` buffer.
/// A pivot is the norm of the largest remaining column, i.e. `|R_jj|`.
fn pivoted_rank(mut cols: Vec<Vec<f64>>, m: usize, threshold: f64) -> RankInfo {
    let k = cols.len();
    let mut rank = 0;
    let mut marginal = false;
    for step in 0..k.min(m) {
        let (best, pivot) = (step..k)
            .map(|j| (j, cols[j][step..].iter().map(|v| v * v).sum::<f64>().sqrt()))
            .fold((step, -1.0), |acc, c| if c.1 > acc.1 { c } else { acc });
        if pivot > threshold / 10.0 && pivot <= threshold * 10.0 {
            marginal = true;
        }
        if pivot <= threshold {
            break;
        }
        cols.swap(step, best);
        // Householder vector v = x + sign(x0)|x| e0 for the pivot column.
        let x0 = cols[step][step];
        let alpha = if x0 >= 0.0 { -pivot } else { pivot };
        let mut v: Vec<f64> = cols[step][step..].to_vec();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|t| t * t).sum();
        if vnorm2 > 0.0 {
            for col in cols.iter_mut().skip(step) {
                let proj = dot(&v, &col[step..]) * 2.0 / vnorm2;
                for (c, vi) in col[step..].iter_mut().zip(&v) {
                    *c -= proj * vi;
                }
            }
        }
        rank += 1;
    }
    RankInfo {
        rank,
        threshold,
        marginal,
    }
}

fn rank_of_columns(
    a: &DenseMatrix,
    s: &IndexSet,
    extra_ones_row: bool,
    tol: &ToleranceConfig,
) -> RankInfo {
    let mut scale = a.max_abs_in(s);
    if extra_ones_row && !s.is_empty() {
        scale = scale.max(1.0);
    }
    let threshold = tol.rank_tol * scale.max(1.0);
    if s.is_empty() {
        return RankInfo {
            rank: 0,
            threshold,
            marginal: false,
        };
    }
    let m = a.rows() + usize::from(extra_ones_row);
    let cols = s
        .iter()
        .map(|j| {
            let mut c = a.column(j);
            if extra_ones_row {
                c.push(1.0);
            }
            c
        })
        .collect();
    pivoted_rank(cols, m, threshold)
}

/// Numerical rank of `A_S`, with the marginality flag.
pub fn rank_info(a: &DenseMatrix, s: &IndexSet, tol: &ToleranceConfig) -> Result<RankInfo> {
    s.check_bounds(a.cols())?;
    Ok(rank_of_columns(a, s, false, tol))
}

/// Numerical rank of `A_S`; `rank(A, ∅) = 0`.
pub fn rank(a: &DenseMatrix, s: &IndexSet, tol: &ToleranceConfig) -> Result<usize> {
    rank_info(a, s, tol).map(|r| r.rank)
}

pub fn augmented_rank_info(
    a: &DenseMatrix,
    s: &IndexSet,
    tol: &ToleranceConfig,
) -> Result<RankInfo> {
    s.check_bounds(a.cols())?;
    Ok(rank_of_columns(a, s, true, tol))
}

/// Rank of `A_S` stacked over a row of ones.
pub fn augmented_rank(a: &DenseMatrix, s: &IndexSet, tol: &ToleranceConfig) -> Result<usize> {
    augmented_rank_info(a, s, tol).map(|r| r.rank)
}

/// `max_{i≠j} |a_iᵀa_j| / (‖a_i‖‖a_j‖)`.
pub fn mutual_coherence(a: &DenseMatrix, tol: &ToleranceConfig) -> Result<f64> {
    let n = a.cols();
    if n < 2 {
        return Err(Error::TooFewColumns);
    }
    let cols: Vec<Vec<f64>> = (0..n).map(|j| a.column(j)).collect();
    let norms: Vec<f64> = cols.iter().map(|c| dot(c, c).sqrt()).collect();
    if let Some(j) = norms.iter().position(|&v| v <= tol.rank_tol) {
        return Err(Error::ZeroColumn(j));
    }
    let mut mu: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            mu = mu.max(dot(&cols[i], &cols[j]).abs() / (norms[i] * norms[j]));
        }
    }
    // Rounding can push a parallel pair slightly above 1.
    Ok(mu.min(1.0))
}

/// `(1 + 1/μ)/2`, or `+∞` for orthogonal columns.
pub fn coherence_bound(a: &DenseMatrix, tol: &ToleranceConfig) -> Result<f64> {
    let mu = mutual_coherence(a, tol)?;
    Ok(if mu == 0.0 {
        f64::INFINITY
    } else {
        0.5 * (1.0 + 1.0 / mu)
    })
}

/// Whether `‖x‖₀ < (1 + 1/μ(A))/2`, counting entries above `zero_tol`.
pub fn coherence_bound_holds(a: &DenseMatrix, x: &[f64], tol: &ToleranceConfig) -> Result<bool> {
    if let Some(p) = x.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { row: p, col: 0 });
    }
    let bound = coherence_bound(a, tol)?;
    let nnz = x.iter().filter(|&&v| v > tol.zero_tol).count();
    Ok((nnz as f64) < bound)
}

/// Smallest number of linearly dependent columns; `n + 1` when all columns
/// are independent.
pub fn spark(a: &DenseMatrix, tol: &ToleranceConfig, limits: &SearchLimits) -> Result<usize> {
    let n = a.cols();
    let mut enumerated: u64 = 0;
    for k in 1..=n {
        let count = subsets::binomial(n, k);
        enumerated = enumerated.saturating_add(count);
        limits.check(enumerated)?;
        let dependent = parallel::any_in_range(count, limits.parallelism, |r| {
            let s = IndexSet::from_sorted(subsets::unrank(n, k, r));
            rank_of_columns(a, &s, false, tol).rank < k
        });
        if dependent {
            return Ok(k);
        }
    }
    Ok(n + 1)
}

/// Solves the square system `M z = rhs` by LU with partial pivoting.
/// `None` if a pivot falls below `1e-14` relative to the largest entry.
pub(crate) fn solve_square(mut mat: Vec<f64>, n: usize, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let scale = norm_inf(&mat).max(1e-300);
    for col in 0..n {
        let piv =
            (col..n).max_by(|&i, &j| mat[i * n + col].abs().total_cmp(&mat[j * n + col].abs()))?;
        if mat[piv * n + col].abs() <= 1e-14 * scale {
            return None;
        }
        if piv != col {
            for j in 0..n {
                mat.swap(piv * n + j, col * n + j);
            }
            rhs.swap(piv, col);
        }
        let d = mat[col * n + col];
        for i in col + 1..n {
            let f = mat[i * n + col] / d;
            if f != 0.0 {
                for j in col..n {
                    mat[i * n + j] -= f * mat[col * n + j];
                }
                rhs[i] -= f * rhs[col];
            }
        }
    }
    let mut z = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| mat[i * n + j] * z[j]).sum();
        z[i] = (rhs[i] - s) / mat[i * n + i];
    }
    Some(z)
}
