//! Exact two-phase simplex over the rationals, Bland's rule throughout.
//! Used only as a reference for the floating-point solver.

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

#[derive(Debug, Clone, PartialEq)]
pub enum ExactOutcome {
    Infeasible,
    Unbounded,
    Optimal(BigRational),
}

impl ExactOutcome {
    pub fn is_feasible(&self) -> bool {
        !matches!(self, ExactOutcome::Infeasible)
    }
}

fn q(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

struct Tableau {
    t: Vec<Vec<BigRational>>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.t[r][c].clone();
        for v in self.t[r].iter_mut() {
            *v = &*v / &p;
        }
        let pivot_row = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                *v = &*v - &f * pv;
            }
        }
        self.basis[r] = c;
    }

    fn rhs(&self, i: usize) -> &BigRational {
        &self.t[i][self.width]
    }

    /// Minimises `cost` over columns `< allowed`. Returns false if unbounded.
    fn run(&mut self, cost: &[BigRational], allowed: usize) -> bool {
        loop {
            let reduced = |j: usize| {
                let mut r = cost[j].clone();
                for (i, &b) in self.basis.iter().enumerate() {
                    r -= &cost[b] * &self.t[i][j];
                }
                r
            };
            let entering =
                (0..allowed).find(|&j| !self.basis.contains(&j) && reduced(j).is_negative());
            let Some(j) = entering else { return true };
            let mut best: Option<(BigRational, usize)> = None;
            for i in 0..self.t.len() {
                if self.t[i][j].is_positive() {
                    let ratio = self.rhs(i) / &self.t[i][j];
                    let better = match &best {
                        None => true,
                        Some((r, bi)) => {
                            ratio < *r || (ratio == *r && self.basis[i] < self.basis[*bi])
                        }
                    };
                    if better {
                        best = Some((ratio, i));
                    }
                }
            }
            match best {
                None => return false,
                Some((_, i)) => self.pivot(i, j),
            }
        }
    }
}

/// Solves min cᵀx s.t. Ax = b, x ≥ 0 exactly for integer data.
pub fn solve_exact(a: &[Vec<i64>], b: &[i64], c: &[i64]) -> ExactOutcome {
    let m = a.len();
    let n = c.len();
    let width = n + m;
    let mut t = Vec::with_capacity(m);
    for i in 0..m {
        let sign = if b[i] < 0 { -1 } else { 1 };
        let mut row: Vec<BigRational> = a[i].iter().map(|&v| q(sign * v)).collect();
        row.extend((0..m).map(|k| {
            if k == i {
                BigRational::one()
            } else {
                BigRational::zero()
            }
        }));
        row.push(q(sign * b[i]));
        t.push(row);
    }
    let mut tab = Tableau {
        t,
        basis: (n..n + m).collect(),
        width,
    };

    let phase1: Vec<BigRational> = (0..width)
        .map(|j| if j < n { q(0) } else { q(1) })
        .collect();
    tab.run(&phase1, width);
    let infeas: BigRational = (0..m)
        .filter(|&i| tab.basis[i] >= n)
        .map(|i| tab.rhs(i).clone())
        .sum();
    if infeas.is_positive() {
        return ExactOutcome::Infeasible;
    }
    for i in 0..m {
        if tab.basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| !tab.t[i][j].is_zero()) {
                tab.pivot(i, j);
            }
        }
    }

    let mut cost: Vec<BigRational> = c.iter().map(|&v| q(v)).collect();
    cost.extend((0..m).map(|_| q(0)));
    if !tab.run(&cost, n) {
        return ExactOutcome::Unbounded;
    }
    let value = (0..m).map(|i| &cost[tab.basis[i]] * tab.rhs(i)).sum();
    ExactOutcome::Optimal(value)
}

pub fn to_f64(v: &BigRational) -> f64 {
    v.to_f64().unwrap()
}
