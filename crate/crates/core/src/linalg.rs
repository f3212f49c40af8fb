//! Small dense linear algebra for the `p <= 4` systems the estimators solve.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Builds a matrix from equal-length rows.
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    actual: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<T> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn scaled(&self, s: T) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| v * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                actual: other.rows * other.cols,
            });
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a + b)
                .collect(),
        })
    }

    pub fn mul_vec(&self, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                actual: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|r| dot(self.row(r), v))
            .collect())
    }

    /// `self' * v`.
    pub fn tr_mul_vec(&self, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                actual: v.len(),
            });
        }
        let mut out = vec![T::zero(); self.cols];
        for (r, &vr) in v.iter().enumerate() {
            for (o, &a) in out.iter_mut().zip(self.row(r)) {
                *o = *o + a * vr;
            }
        }
        Ok(out)
    }

    /// `self' * self`.
    pub fn gram(&self) -> Self {
        let p = self.cols;
        let mut g = Self::zeros(p, p);
        for r in 0..self.rows {
            let row = self.row(r);
            for i in 0..p {
                for j in i..p {
                    g[(i, j)] = g[(i, j)] + row[i] * row[j];
                }
            }
        }
        for i in 0..p {
            for j in 0..i {
                g[(i, j)] = g[(j, i)];
            }
        }
        g
    }

    /// Keeps the rows for which `keep` is true.
    pub fn select_rows(&self, keep: impl Fn(usize) -> bool) -> Self {
        let mut data = Vec::new();
        let mut rows = 0;
        for r in 0..self.rows {
            if keep(r) {
                data.extend_from_slice(self.row(r));
                rows += 1;
            }
        }
        Matrix {
            rows,
            cols: self.cols,
            data,
        }
    }

    fn one_norm(&self) -> T {
        (0..self.cols)
            .map(|c| (0..self.rows).map(|r| self[(r, c)].abs()).sum::<T>())
            .fold(T::zero(), T::max)
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (r, c): (usize, usize)) -> &T {
        &self.data[r * self.cols + c]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut T {
        &mut self.data[r * self.cols + c]
    }
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub fn norm2<T: Scalar>(a: &[T]) -> T {
    // scaled to avoid overflow on large residual vectors
    let scale = a.iter().fold(T::zero(), |m, &x| m.max(x.abs()));
    if scale == T::zero() {
        return T::zero();
    }
    let s: T = a.iter().map(|&x| (x / scale) * (x / scale)).sum();
    scale * s.sqrt()
}

/// Least-squares solution of `x * theta ~= y` by Householder QR on the
/// column-equilibrated design.
///
/// Fails with [`Error::CollinearDesign`] when the reciprocal 1-norm condition
/// number of the triangular factor falls below [`Scalar::rcond_floor`].
pub fn least_squares<T: Scalar>(x: &Matrix<T>, y: &[T]) -> Result<Vec<T>> {
    let (n, p) = (x.rows(), x.cols());
    if y.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: y.len(),
        });
    }
    if n < p {
        return Err(Error::InsufficientObservations { n, p });
    }

    let scales: Vec<T> = (0..p).map(|c| norm2(&x.column(c))).collect();
    if scales.iter().any(|&s| s == T::zero() || !s.is_finite()) {
        return Err(Error::CollinearDesign { rcond: 0.0 });
    }
    let mut a = Matrix::from_fn(n, p, |r, c| x[(r, c)] / scales[c]);
    let mut b = y.to_vec();

    for k in 0..p {
        let col: Vec<T> = (k..n).map(|r| a[(r, k)]).collect();
        let alpha = norm2(&col);
        if alpha == T::zero() {
            continue;
        }
        let alpha = if a[(k, k)] > T::zero() { -alpha } else { alpha };
        let mut v = col;
        v[0] = v[0] - alpha;
        let vtv = dot(&v, &v);
        if vtv == T::zero() {
            continue;
        }
        let two = T::lit(2.0);
        for c in k..p {
            let s: T = (k..n).map(|r| v[r - k] * a[(r, c)]).sum();
            let f = two * s / vtv;
            for r in k..n {
                a[(r, c)] = a[(r, c)] - f * v[r - k];
            }
        }
        let s: T = (k..n).map(|r| v[r - k] * b[r]).sum();
        let f = two * s / vtv;
        for r in k..n {
            b[r] = b[r] - f * v[r - k];
        }
    }

    let r_factor = Matrix::from_fn(p, p, |i, j| if j >= i { a[(i, j)] } else { T::zero() });
    let rcond = upper_triangular_rcond(&r_factor);
    if !(rcond >= T::rcond_floor()) {
        return Err(Error::CollinearDesign {
            rcond: rcond.as_f64(),
        });
    }
    let z = back_substitute(&r_factor, &b[..p]);
    Ok(z.iter().zip(&scales).map(|(&zi, &s)| zi / s).collect())
}

fn back_substitute<T: Scalar>(r: &Matrix<T>, b: &[T]) -> Vec<T> {
    let p = r.rows();
    let mut z = vec![T::zero(); p];
    for i in (0..p).rev() {
        let s: T = ((i + 1)..p).map(|j| r[(i, j)] * z[j]).sum();
        z[i] = (b[i] - s) / r[(i, i)];
    }
    z
}

fn upper_triangular_rcond<T: Scalar>(r: &Matrix<T>) -> T {
    let p = r.rows();
    if (0..p).any(|i| r[(i, i)] == T::zero()) {
        return T::zero();
    }
    let mut inv = Matrix::zeros(p, p);
    for c in 0..p {
        let e: Vec<T> = (0..p).map(|i| if i == c { T::one() } else { T::zero() }).collect();
        let col = back_substitute(r, &e);
        for (i, v) in col.into_iter().enumerate() {
            inv[(i, c)] = v;
        }
    }
    T::one() / (r.one_norm() * inv.one_norm())
}

/// LU factorization with partial pivoting of a square matrix.
struct Lu<T> {
    lu: Matrix<T>,
    perm: Vec<usize>,
}

impl<T: Scalar> Lu<T> {
    fn factor(a: &Matrix<T>) -> Option<Self> {
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let pivot = (k..n)
                .max_by(|&i, &j| {
                    lu[(i, k)]
                        .abs()
                        .partial_cmp(&lu[(j, k)].abs())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .unwrap_or(k);
            if lu[(pivot, k)] == T::zero() || !lu[(pivot, k)].is_finite() {
                return None;
            }
            if pivot != k {
                for c in 0..n {
                    let tmp = lu[(k, c)];
                    lu[(k, c)] = lu[(pivot, c)];
                    lu[(pivot, c)] = tmp;
                }
                perm.swap(k, pivot);
            }
            for i in (k + 1)..n {
                let f = lu[(i, k)] / lu[(k, k)];
                lu[(i, k)] = f;
                for c in (k + 1)..n {
                    lu[(i, c)] = lu[(i, c)] - f * lu[(k, c)];
                }
            }
        }
        Some(Lu { lu, perm })
    }

    fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.lu.rows();
        let mut y: Vec<T> = self.perm.iter().map(|&i| b[i]).collect();
        for i in 0..n {
            let s: T = (0..i).map(|j| self.lu[(i, j)] * y[j]).sum();
            y[i] = y[i] - s;
        }
        for i in (0..n).rev() {
            let s: T = ((i + 1)..n).map(|j| self.lu[(i, j)] * y[j]).sum();
            y[i] = (y[i] - s) / self.lu[(i, i)];
        }
        y
    }

    fn inverse(&self) -> Matrix<T> {
        let n = self.lu.rows();
        let mut inv = Matrix::zeros(n, n);
        for c in 0..n {
            let e: Vec<T> = (0..n).map(|i| if i == c { T::one() } else { T::zero() }).collect();
            for (r, v) in self.solve(&e).into_iter().enumerate() {
                inv[(r, c)] = v;
            }
        }
        inv
    }
}

/// Solves the square system `a * x = b`, rejecting numerically singular `a`.
pub fn solve<T: Scalar>(a: &Matrix<T>, b: &[T]) -> Result<Vec<T>> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: a.cols(),
        });
    }
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: b.len(),
        });
    }
    let lu = Lu::factor(a).ok_or(Error::Singular { rcond: 0.0 })?;
    let rcond = T::one() / (a.one_norm() * lu.inverse().one_norm());
    if !(rcond >= T::rcond_floor()) {
        return Err(Error::Singular {
            rcond: rcond.as_f64(),
        });
    }
    Ok(lu.solve(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn least_squares_exact_line() {
        let x = Matrix::from_rows(&[vec![1.0, 0.0], vec![1.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let y = [2.0f64, 5.0, 8.0];
        let theta = least_squares(&x, &y).unwrap();
        assert!((theta[0] - 2.0).abs() < 1e-14);
        assert!((theta[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn least_squares_rejects_duplicate_columns() {
        let x = Matrix::from_rows(&[vec![1.0, 0.5], vec![1.0, 0.5], vec![1.0, 0.5]]).unwrap();
        let err = least_squares(&x, &[1.0, 2.0, 3.0]).unwrap_err();
        assert!(matches!(err, Error::CollinearDesign { .. }));
    }

    #[test]
    fn least_squares_rejects_zero_column() {
        let x = Matrix::from_rows(&[vec![1.0, 0.0], vec![1.0, 0.0], vec![1.0, 0.0]]).unwrap();
        assert!(matches!(
            least_squares(&x, &[1.0, 2.0, 3.0]),
            Err(Error::CollinearDesign { .. })
        ));
    }

    #[test]
    fn solve_and_singular() {
        let a = Matrix::from_rows(&[vec![4.0, 1.0], vec![2.0, 3.0]]).unwrap();
        let x = solve(&a, &[1.0f64, 2.0]).unwrap();
        assert!((4.0 * x[0] + x[1] - 1.0).abs() < 1e-14);
        assert!((2.0 * x[0] + 3.0 * x[1] - 2.0).abs() < 1e-14);

        let s = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(matches!(solve(&s, &[1.0, 2.0]), Err(Error::Singular { .. })));
    }

    #[test]
    fn solve_needs_pivoting() {
        let a = Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(solve(&a, &[3.0, 7.0]).unwrap(), vec![7.0, 3.0]);
    }

    #[test]
    fn gram_matches_explicit_product() {
        let x = Matrix::from_rows(&[vec![1.0, 2.0], vec![1.0, -1.0], vec![1.0, 0.5]]).unwrap();
        let g = x.gram();
        let xt = x.transpose();
        for i in 0..2 {
            for j in 0..2 {
                let e: f64 = (0..3).map(|k| xt[(i, k)] * x[(k, j)]).sum();
                assert!((g[(i, j)] - e).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn norm2_handles_large_values() {
        assert!((norm2(&[3e200f64, 4e200]) / 5e200 - 1.0).abs() < 1e-15);
        assert_eq!(norm2::<f64>(&[0.0, 0.0]), 0.0);
    }

    #[test]
    fn least_squares_in_f32() {
        let x = Matrix::from_rows(&[vec![1.0f32, 0.0], vec![1.0, 1.0], vec![1.0, 2.0], vec![1.0, 3.0]]).unwrap();
        let theta = least_squares(&x, &[1.0f32, 3.0, 5.0, 7.0]).unwrap();
        assert!((theta[0] - 1.0).abs() < 1e-5);
        assert!((theta[1] - 2.0).abs() < 1e-5);
    }
}
