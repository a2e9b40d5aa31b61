//! Dense column-major storage.
//!
//! Every hot loop in the solver is a per-column inner product, so columns are
//! stored contiguously.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Builds a matrix from column-major data.
    pub fn from_col_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from a list of equally long rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        let mut out = Self::zeros(m, n);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "row {r} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (c, &v) in row.iter().enumerate() {
                out.set(r, c, v);
            }
        }
        Ok(out)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[c * self.rows + r]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[c * self.rows + r] = v;
    }

    #[inline]
    pub fn col(&self, c: usize) -> &[f64] {
        &self.data[c * self.rows..(c + 1) * self.rows]
    }

    pub fn col_mut(&mut self, c: usize) -> &mut [f64] {
        let rows = self.rows;
        &mut self.data[c * rows..(c + 1) * rows]
    }

    pub fn row(&self, r: usize) -> Vec<f64> {
        (0..self.cols).map(|c| self.get(r, c)).collect()
    }

    pub fn as_col_major(&self) -> &[f64] {
        &self.data
    }

    /// `A x`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        let mut out = vec![0.0; self.rows];
        for (c, &xc) in x.iter().enumerate() {
            if xc != 0.0 {
                axpy(xc, self.col(c), &mut out);
            }
        }
        out
    }

    /// `Aᵀ u`.
    pub fn tr_mul_vec(&self, u: &[f64]) -> Vec<f64> {
        assert_eq!(u.len(), self.rows);
        (0..self.cols).map(|c| dot(self.col(c), u)).collect()
    }

    /// Sub-matrix made of the listed columns, in order.
    pub fn select_columns(&self, idx: &[usize]) -> DenseMatrix {
        let mut data = Vec::with_capacity(self.rows * idx.len());
        for &c in idx {
            data.extend_from_slice(self.col(c));
        }
        DenseMatrix {
            rows: self.rows,
            cols: idx.len(),
            data,
        }
    }

    /// Squared Euclidean norm of every column.
    pub fn column_norms_sq(&self) -> Vec<f64> {
        (0..self.cols).map(|c| dot(self.col(c), self.col(c))).collect()
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `y += alpha * x`
#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}
