#![allow(dead_code)]

use factor_bench::{DesignSystem, Matrix};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random design with an intercept column and `p - 1` regressors.
pub fn random_design(rng: &mut ChaCha8Rng, n: usize, p: usize) -> DesignSystem {
    let x = Matrix::from_fn(n, p, |_, c| if c == 0 { 1.0 } else { rng.random_range(-1.0..1.0) });
    let y = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    DesignSystem::new(y, x).unwrap()
}

pub fn to_na(x: &Matrix) -> DMatrix<f64> {
    DMatrix::from_fn(x.rows(), x.cols(), |r, c| x[(r, c)])
}

/// Least squares through an SVD, independent of the library's QR path.
pub fn na_lstsq(x: &DMatrix<f64>, y: &[f64]) -> Vec<f64> {
    let y = DVector::from_column_slice(y);
    x.clone().svd(true, true).solve(&y, 1e-14).unwrap().iter().copied().collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
