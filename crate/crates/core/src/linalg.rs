//! Dense matrices and determinants.

use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone> Matrix<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == m), "ragged rows");
        Self {
            rows: n,
            cols: m,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    /// Sub-matrix on the given row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])].clone())
    }
}

impl<T: Scalar> Matrix<T> {
    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| T::zero())
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "shape mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] = out[(i, j)].clone() + a.clone() * b.clone();
                    }
                }
            }
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| {
            self[(i, j)].clone() - rhs[(i, j)].clone()
        })
    }

    /// Determinant by Gaussian elimination. Floats pivot on the largest
    /// magnitude in the column; exact scalars take the first non-zero entry.
    pub fn det(&self) -> T {
        eliminate(self).0
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Returns the determinant and the absolute pivots used.
fn eliminate<T: Scalar>(m: &Matrix<T>) -> (T, Vec<f64>) {
    assert_eq!(m.rows, m.cols, "determinant of a non-square matrix");
    let n = m.rows;
    let mut a = m.clone();
    let mut det = T::one();
    let mut pivots = Vec::with_capacity(n);
    for col in 0..n {
        let pivot_row = if T::EXACT {
            (col..n).find(|&r| !a[(r, col)].is_zero())
        } else {
            (col..n)
                .max_by(|&r, &s| {
                    a[(r, col)]
                        .magnitude()
                        .total_cmp(&a[(s, col)].magnitude())
                })
                .filter(|&r| !a[(r, col)].is_zero())
        };
        let Some(p) = pivot_row else {
            pivots.push(0.0);
            return (T::zero(), pivots);
        };
        if p != col {
            for j in 0..n {
                a.data.swap(p * n + j, col * n + j);
            }
            det = -det;
        }
        let pivot = a[(col, col)].clone();
        pivots.push(pivot.magnitude());
        det = det * pivot.clone();
        for r in col + 1..n {
            if a[(r, col)].is_zero() {
                continue;
            }
            let factor = a[(r, col)].clone() / pivot.clone();
            for j in col..n {
                let delta = factor.clone() * a[(col, j)].clone();
                a[(r, j)] = a[(r, j)].clone() - delta;
            }
        }
    }
    (det, pivots)
}

/// Determinant of a float matrix with a conditioning summary.
#[derive(Clone, Debug, PartialEq)]
pub struct DetReport {
    pub value: f64,
    /// Smallest absolute pivot divided by the largest absolute entry.
    pub min_pivot_ratio: f64,
    /// Rough relative error bound: `n * eps / min_pivot_ratio`.
    pub relative_error_bound: f64,
}

pub fn det_with_report(m: &Matrix<f64>) -> DetReport {
    let scale = m.data.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let (value, pivots) = eliminate(m);
    if m.rows == 0 {
        return DetReport {
            value,
            min_pivot_ratio: 1.0,
            relative_error_bound: 0.0,
        };
    }
    let min_pivot = pivots.iter().cloned().fold(f64::INFINITY, f64::min);
    let ratio = if scale > 0.0 { min_pivot / scale } else { 0.0 };
    DetReport {
        value,
        min_pivot_ratio: ratio,
        relative_error_bound: if ratio > 0.0 {
            m.rows as f64 * f64::EPSILON / ratio
        } else {
            f64::INFINITY
        },
    }
}

/// Fraction-free (Bareiss) determinant of an integer matrix.
pub fn bareiss_det(m: &Matrix<BigInt>) -> BigInt {
    assert_eq!(m.rows, m.cols, "determinant of a non-square matrix");
    let n = m.rows;
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.clone();
    let mut sign = 1;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[(k, k)].is_zero() {
            let Some(p) = (k + 1..n).find(|&r| !a[(r, k)].is_zero()) else {
                return BigInt::zero();
            };
            for j in 0..n {
                a.data.swap(p * n + j, k * n + j);
            }
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)];
                a[(i, j)] = v / &prev;
            }
        }
        prev = a[(k, k)].clone();
    }
    let d = a[(n - 1, n - 1)].clone();
    if sign < 0 {
        -d
    } else {
        d
    }
}
