//! Small dense matrices, stored row-major for readable spec files. Heavy
//! lifting (solves, spectral norms) goes through nalgebra.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::Vector;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        if n_rows == 0 || n_cols == 0 {
            return Err(Error::InvalidParameter("matrix must be nonempty".into()));
        }
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(Error::InvalidParameter("matrix rows have unequal lengths".into()));
        }
        let data: Vec<f64> = rows.into_iter().flatten().collect();
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("matrix entries must be finite".into()));
        }
        Ok(Matrix {
            rows: n_rows,
            cols: n_cols,
            data,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self::scaled_identity(n, 1.0)
    }

    pub fn scaled_identity(n: usize, factor: f64) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = factor;
        }
        Matrix { rows: n, cols: n, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn mul_vec(&self, x: &Vector) -> Result<Vector> {
        if x.dim() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: x.dim(),
            });
        }
        let xs = x.as_slice();
        Ok(Vector::from_raw(
            self.data
                .chunks(self.cols)
                .map(|row| row.iter().zip(xs).map(|(a, b)| a * b).sum())
                .collect(),
        ))
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> f64 {
        self.to_nalgebra()
            .singular_values()
            .iter()
            .fold(0.0f64, |acc, &s| acc.max(s))
    }

    /// Smallest eigenvalue of the symmetric part `(A + A^T) / 2`.
    pub fn min_symmetric_eigenvalue(&self) -> f64 {
        let a = self.to_nalgebra();
        let sym = (&a + a.transpose()) * 0.5;
        sym.symmetric_eigenvalues()
            .iter()
            .fold(f64::INFINITY, |acc, &s| acc.min(s))
    }
}

impl TryFrom<Vec<Vec<f64>>> for Matrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Matrix::from_rows(rows)
    }
}

impl From<Matrix> for Vec<Vec<f64>> {
    fn from(m: Matrix) -> Self {
        m.data.chunks(m.cols).map(<[f64]>::to_vec).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norms_and_products() {
        let m = Matrix::from_rows(vec![vec![3.0, 0.0], vec![0.0, -4.0]]).unwrap();
        assert!((m.spectral_norm() - 4.0).abs() < 1e-12);
        assert!((m.min_symmetric_eigenvalue() + 4.0).abs() < 1e-12);
        let y = m.mul_vec(&Vector::new(vec![1.0, 1.0]).unwrap()).unwrap();
        assert_eq!(y.as_slice(), &[3.0, -4.0]);
        assert!(Matrix::from_rows(vec![vec![1.0], vec![1.0, 2.0]]).is_err());
    }
}
