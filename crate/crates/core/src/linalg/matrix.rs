use crate::linalg::{vector::dot, vector::norm, LinalgError, Support, Vector};
use crate::scalar::Real;

/// Dense column-major matrix with finite entries and at least one row and
/// one column.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Matrix<T> {
    /// Builds an `rows x cols` matrix from row-major entries.
    pub fn from_row_major(rows: usize, cols: usize, entries: &[T]) -> Result<Self, LinalgError> {
        if rows == 0 || cols == 0 {
            return Err(LinalgError::EmptyDimension);
        }
        if entries.len() != rows * cols {
            return Err(LinalgError::DimensionMismatch {
                expected: rows * cols,
                found: entries.len(),
            });
        }
        let mut data = vec![T::zero(); rows * cols];
        for i in 0..rows {
            for j in 0..cols {
                let x = entries[i * cols + j];
                if !x.is_finite() {
                    return Err(LinalgError::NonFinite { index: i * cols + j });
                }
                data[j * rows + i] = x;
            }
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self, LinalgError> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(LinalgError::DimensionMismatch { expected: n, found: bad.len() });
        }
        let flat: Vec<T> = rows.iter().flatten().copied().collect();
        Self::from_row_major(m, n, &flat)
    }

    /// Builds a matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(columns: &[Vec<T>]) -> Result<Self, LinalgError> {
        let n = columns.len();
        let m = columns.first().map_or(0, Vec::len);
        if m == 0 || n == 0 {
            return Err(LinalgError::EmptyDimension);
        }
        if let Some(bad) = columns.iter().find(|c| c.len() != m) {
            return Err(LinalgError::DimensionMismatch { expected: m, found: bad.len() });
        }
        let data: Vec<T> = columns.iter().flatten().copied().collect();
        if let Some(index) = data.iter().position(|x| !x.is_finite()) {
            return Err(LinalgError::NonFinite { index });
        }
        Ok(Self { rows: m, cols: n, data })
    }

    pub fn from_columns_f64(columns: &[&[f64]]) -> Result<Self, LinalgError> {
        let cols: Vec<Vec<T>> =
            columns.iter().map(|c| c.iter().map(|&x| T::lit(x)).collect()).collect();
        Self::from_columns(&cols)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = T::one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[j * self.rows + i]
    }

    pub fn column(&self, j: usize) -> &[T] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[T]> + '_ {
        self.data.chunks_exact(self.rows)
    }

    pub fn column_vector(&self, j: usize) -> Vector<T> {
        Vector::from_vec(self.column(j).to_vec())
    }

    pub fn column_norm(&self, j: usize) -> T {
        norm(self.column(j))
    }

    /// Entries in row-major order.
    pub fn to_row_major(&self) -> Vec<T> {
        let mut out = Vec::with_capacity(self.data.len());
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.push(self.get(i, j));
            }
        }
        out
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, x| acc.max(x.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// `A x`
    pub fn mul_vec(&self, x: &Vector<T>) -> Vector<T> {
        assert_eq!(x.len(), self.cols, "matrix-vector dimension mismatch");
        let mut out = vec![T::zero(); self.rows];
        for (col, &xj) in self.columns().zip(x.iter()) {
            if xj.is_zero() {
                continue;
            }
            for (o, &a) in out.iter_mut().zip(col) {
                *o = *o + a * xj;
            }
        }
        Vector::from_vec(out)
    }

    /// `Aᵀ y`
    pub fn tr_mul_vec(&self, y: &Vector<T>) -> Vector<T> {
        assert_eq!(y.len(), self.rows, "matrix-vector dimension mismatch");
        Vector::from_vec(self.columns().map(|c| dot(c, y.as_slice())).collect())
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for i in 0..self.rows {
            for j in 0..self.cols {
                data.push(self.get(i, j));
            }
        }
        Self { rows: self.cols, cols: self.rows, data }
    }

    /// Column submatrix `A_S`. Panics on an empty support.
    pub fn select_columns(&self, support: &Support) -> Self {
        assert!(!support.is_empty(), "cannot select an empty column set");
        let mut data = Vec::with_capacity(self.rows * support.len());
        for &j in support.indices() {
            data.extend_from_slice(self.column(j));
        }
        Self { rows: self.rows, cols: support.len(), data }
    }

    pub(crate) fn column_mut(&mut self, j: usize) -> &mut [T] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub(crate) fn swap_columns(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(a * self.rows + i, b * self.rows + i);
        }
    }

    pub fn map<U: Real>(&self, f: impl Fn(T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| f(x)).collect() }
    }
}
