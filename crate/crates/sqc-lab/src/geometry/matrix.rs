//! Small dense square matrices: just enough linear algebra for the affine
//! domain images. Matrices here stay tiny (n <= 16 in practice), so a
//! hand-rolled Gauss-Jordan inverse and power iteration beat pulling in a
//! solver.

use crate::error::Error;

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct SquareMatrix {
    n: usize,
    /// Row-major entries.
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, Error> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidParameter {
                name: "rows",
                reason: "matrix must be square and nonempty".into(),
            });
        }
        let data: Vec<f64> = rows.iter().flatten().copied().collect();
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "rows",
                reason: "matrix entries must be finite".into(),
            });
        }
        Ok(SquareMatrix { n, data })
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        SquareMatrix { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    fn matvec_transpose(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self.get(i, j) * v[i]).sum())
            .collect()
    }

    /// Gauss-Jordan with partial pivoting. Fails only on (numerically) exact
    /// singularity; near-singularity is caught by the singular value check in
    /// `LinearMap::new`.
    pub fn inverse(&self) -> Result<SquareMatrix, Error> {
        let n = self.n;
        let mut a = self.data.clone();
        let mut inv = SquareMatrix::identity(n).data;
        for col in 0..n {
            let pivot_row = (col..n)
                .max_by(|&r, &s| {
                    a[r * n + col]
                        .abs()
                        .partial_cmp(&a[s * n + col].abs())
                        .unwrap()
                })
                .unwrap();
            let pivot = a[pivot_row * n + col];
            if pivot.abs() < 1e-280 {
                return Err(Error::SingularMap);
            }
            if pivot_row != col {
                for j in 0..n {
                    a.swap(col * n + j, pivot_row * n + j);
                    inv.swap(col * n + j, pivot_row * n + j);
                }
            }
            let inv_pivot = 1.0 / a[col * n + col];
            for j in 0..n {
                a[col * n + j] *= inv_pivot;
                inv[col * n + j] *= inv_pivot;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a[r * n + col];
                if factor == 0.0 {
                    continue;
                }
                for j in 0..n {
                    a[r * n + j] -= factor * a[col * n + j];
                    inv[r * n + j] -= factor * inv[col * n + j];
                }
            }
        }
        Ok(SquareMatrix { n, data: inv })
    }

    /// Largest singular value via power iteration on `A^T A`.
    ///
    /// `tol` is the relative change in the Rayleigh quotient below which the
    /// iteration stops. Fails after 10^4 steps without convergence.
    pub fn largest_singular_value(&self, tol: f64) -> Result<f64, Error> {
        const MAX_ITERS: usize = 10_000;
        let n = self.n;
        // Decaying start vector: nonzero overlap with every coordinate axis.
        let mut v: Vec<f64> = (0..n).map(|i| 1.0 / (i + 1) as f64).collect();
        let norm: f64 = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        v.iter_mut().for_each(|c| *c /= norm);

        let mut lambda_prev = f64::NAN;
        for _ in 0..MAX_ITERS {
            let w = self.matvec(&v);
            let u = self.matvec_transpose(&w);
            // Rayleigh quotient of A^T A at the unit vector v.
            let lambda: f64 = v.iter().zip(&u).map(|(a, b)| a * b).sum();
            let u_norm: f64 = u.iter().map(|c| c * c).sum::<f64>().sqrt();
            if u_norm == 0.0 {
                return Ok(0.0);
            }
            v = u.iter().map(|c| c / u_norm).collect();
            if lambda_prev.is_finite() {
                let change = (lambda - lambda_prev).abs();
                if change <= tol * lambda.abs().max(f64::MIN_POSITIVE) {
                    return Ok(lambda.max(0.0).sqrt());
                }
            }
            lambda_prev = lambda;
        }
        Err(Error::PowerIterationDiverged {
            iterations: MAX_ITERS,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_inverse_roundtrip() {
        let m = SquareMatrix::from_rows(&[vec![2.0, 1.0], vec![0.0, 3.0]]).unwrap();
        let inv = m.inverse().unwrap();
        let v = vec![5.0, -2.0];
        let back = inv.matvec(&m.matvec(&v));
        for (a, b) in v.iter().zip(&back) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_matrix_rejected() {
        let m = SquareMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(matches!(m.inverse(), Err(Error::SingularMap)));
    }

    #[test]
    fn singular_values_of_diagonal_matrices() {
        // Exact singular values of diagonal matrices are the |entries|.
        let m = SquareMatrix::from_rows(&[vec![2.0, 0.0], vec![0.0, 2.0]]).unwrap();
        assert!((m.largest_singular_value(1e-12).unwrap() - 2.0).abs() < 1e-10);
        let m = SquareMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 3.0]]).unwrap();
        assert!((m.largest_singular_value(1e-12).unwrap() - 3.0).abs() < 1e-10);
        let m = SquareMatrix::identity(5);
        assert!((m.largest_singular_value(1e-12).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn singular_value_of_rotation_is_one() {
        let c = 0.6f64;
        let s = 0.8f64;
        let m = SquareMatrix::from_rows(&[vec![c, -s], vec![s, c]]).unwrap();
        assert!((m.largest_singular_value(1e-12).unwrap() - 1.0).abs() < 1e-10);
    }
}
