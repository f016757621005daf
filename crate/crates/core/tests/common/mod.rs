#![allow(dead_code)]

pub mod rational;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rspcert_core::DenseMatrix;

pub fn matrix(rows: &[&[f64]]) -> DenseMatrix {
    DenseMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
}

pub fn unique_pair() -> (DenseMatrix, Vec<f64>) {
    (
        matrix(&[
            &[1.0, 0.0, -1.0, -1.0],
            &[0.0, -1.0, -1.0, 6.0],
            &[0.0, 0.0, -1.0, 1.0],
        ]),
        vec![0.5, -0.5, 0.0],
    )
}

pub fn rank_deficient() -> (DenseMatrix, Vec<f64>) {
    (
        matrix(&[
            &[1.0, 0.0, -1.0, 1.0],
            &[1.0, -0.1, 0.0, -0.2],
            &[0.0, 0.0, -1.0, 1.0],
        ]),
        vec![0.5, -0.5, 0.0],
    )
}

pub fn coherent_pair() -> (DenseMatrix, Vec<f64>) {
    let r3 = 1.0 / 3f64.sqrt();
    let r2 = 1.0 / 2f64.sqrt();
    (
        matrix(&[
            &[0.0, -1.0, r3, 0.0, r2, -r2],
            &[0.0, 0.0, r3, -1.0, 0.0, 0.0],
            &[-1.0, 0.0, r3, 0.0, r2, -r2],
        ]),
        vec![1.0, 1.0, 0.0],
    )
}

pub fn three_sparsest() -> (DenseMatrix, Vec<f64>) {
    (
        matrix(&[
            &[0.2, 0.0, -0.3, -0.1, 0.5, -0.25],
            &[0.0, 0.2, 0.5, 0.2, -0.9, 0.05],
            &[0.2, 0.0, -0.3, -0.1, 0.5, -0.25],
        ]),
        vec![0.1, -0.1, 0.1],
    )
}

/// ℓ1 recovers a 2-sparse solution although a 1-sparse one exists.
pub fn dense_recovery() -> (DenseMatrix, Vec<f64>) {
    (
        matrix(&[
            &[6.0, 4.0, 1.5, 4.0, -1.0],
            &[6.0, 4.0, -0.5, 4.0, 0.0],
            &[0.0, -2.0, 31.5, -1.0, -1.5],
        ]),
        vec![4.0, 4.0, -1.0],
    )
}

pub fn gaussian(m: usize, n: usize, rng: &mut ChaCha8Rng) -> DenseMatrix {
    let data = (0..m * n)
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect();
    DenseMatrix::from_row_major(m, n, data).unwrap()
}

pub fn gaussian_batch(count: usize, m: usize, n: usize, seed: u64) -> Vec<DenseMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| gaussian(m, n, &mut rng)).collect()
}

pub fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

/// Integer standard-form LP: (A, b, c).
pub type IntLp = (Vec<Vec<i64>>, Vec<i64>, Vec<i64>);

/// Random LP with entries in [-5, 5], m ≤ 6, n ≤ 12. When `feasible` is set
/// the right-hand side is A·x0 for a random integer x0 ≥ 0.
pub fn random_int_lp(rng: &mut ChaCha8Rng, feasible: bool) -> IntLp {
    let m = rng.random_range(1..=6);
    let n = rng.random_range(1..=12);
    let a: Vec<Vec<i64>> = (0..m)
        .map(|_| (0..n).map(|_| rng.random_range(-5..=5)).collect())
        .collect();
    let b = if feasible {
        let x0: Vec<i64> = (0..n)
            .map(|_| {
                if rng.random_bool(0.5) {
                    0
                } else {
                    rng.random_range(0..=3)
                }
            })
            .collect();
        a.iter()
            .map(|row| row.iter().zip(&x0).map(|(p, q)| p * q).sum())
            .collect()
    } else {
        (0..m).map(|_| rng.random_range(-5..=5)).collect()
    };
    let c = (0..n).map(|_| rng.random_range(-5..=5)).collect();
    (a, b, c)
}

pub fn int_lp_to_float(lp: &IntLp) -> rspcert_core::simplex::StandardLp {
    let (a, b, c) = lp;
    let rows: Vec<Vec<f64>> = a
        .iter()
        .map(|r| r.iter().map(|&v| v as f64).collect())
        .collect();
    rspcert_core::simplex::StandardLp::nonnegative(
        c.iter().map(|&v| v as f64).collect(),
        DenseMatrix::from_rows(&rows).unwrap(),
        b.iter().map(|&v| v as f64).collect(),
    )
    .unwrap()
}
