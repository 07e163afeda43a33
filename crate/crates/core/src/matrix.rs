//! Dense row-major `f64` matrices.
//!
//! This is the only numeric carrier in the workspace: activations, weights
//! and gradients are all `Matrix` values. Batches are stored column-wise
//! (one column per instance) so a single matmul advances a whole batch.

use alloc::vec;
use alloc::vec::Vec;

use crate::math;

/// Error for shape-incompatible operands.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShapeError {
    pub op: &'static str,
    pub lhs: (usize, usize),
    pub rhs: (usize, usize),
}

impl core::fmt::Display for ShapeError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(
            f,
            "{}: incompatible shapes {}x{} and {}x{}",
            self.op, self.lhs.0, self.lhs.1, self.rhs.0, self.rhs.1
        )
    }
}

/// Elementwise nonlinearities applied to matrices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Activation {
    Tanh,
    Sigmoid,
    /// `atanh(clip((1 - eps) * x))`; see [`crate::math::atanh_clamped`].
    AtanhClamped,
}

impl Activation {
    #[inline]
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Tanh => math::tanh(x),
            Activation::Sigmoid => math::sigmoid(x),
            Activation::AtanhClamped => math::atanh_clamped(x),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn filled(rows: usize, cols: usize, value: f64) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Matrix { rows, cols, data: vec![value; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "data length must be rows*cols");
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        assert!(r > 0, "need at least one row");
        let c = rows[0].len();
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Matrix::from_vec(r, c, data)
    }

    /// Column vector from a slice.
    pub fn col_vec(values: &[f64]) -> Self {
        Matrix::from_vec(values.len(), 1, values.to_vec())
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
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.at(i, j)).collect()
    }

    /// Single entry of a 1x1 matrix.
    pub fn scalar(&self) -> f64 {
        assert_eq!((self.rows, self.cols), (1, 1), "scalar() on non-1x1 matrix");
        self.data[0]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Standard product `self * other`.
    pub fn matmul(&self, other: &Matrix) -> Result<Matrix, ShapeError> {
        if self.cols != other.rows {
            return Err(ShapeError { op: "matmul", lhs: self.shape(), rhs: other.shape() });
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        let oc = other.cols;
        for i in 0..self.rows {
            let arow = self.row(i);
            let orow = &mut out.data[i * oc..(i + 1) * oc];
            for (k, &aik) in arow.iter().enumerate() {
                let brow = &other.data[k * oc..(k + 1) * oc];
                for (o, &b) in orow.iter_mut().zip(brow) {
                    *o += aik * b;
                }
            }
        }
        Ok(out)
    }

    /// `self^T * other` without materializing the transpose.
    pub fn matmul_tn(&self, other: &Matrix) -> Result<Matrix, ShapeError> {
        if self.rows != other.rows {
            return Err(ShapeError { op: "matmul_tn", lhs: self.shape(), rhs: other.shape() });
        }
        let mut out = Matrix::zeros(self.cols, other.cols);
        let oc = other.cols;
        for k in 0..self.rows {
            let arow = self.row(k);
            let brow = other.row(k);
            for (i, &aki) in arow.iter().enumerate() {
                let orow = &mut out.data[i * oc..(i + 1) * oc];
                for (o, &b) in orow.iter_mut().zip(brow) {
                    *o += aki * b;
                }
            }
        }
        Ok(out)
    }

    /// `self * other^T` without materializing the transpose.
    pub fn matmul_nt(&self, other: &Matrix) -> Result<Matrix, ShapeError> {
        if self.cols != other.cols {
            return Err(ShapeError { op: "matmul_nt", lhs: self.shape(), rhs: other.shape() });
        }
        let mut out = Matrix::zeros(self.rows, other.rows);
        for i in 0..self.rows {
            let arow = self.row(i);
            for j in 0..other.rows {
                let brow = other.row(j);
                let dot: f64 = arow.iter().zip(brow).map(|(a, b)| a * b).sum();
                out.data[i * other.rows + j] = dot;
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix, ShapeError> {
        self.zip_with(other, "add", |a, b| a + b)
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix, ShapeError> {
        self.zip_with(other, "sub", |a, b| a - b)
    }

    /// Elementwise (Hadamard) product.
    pub fn hadamard(&self, other: &Matrix) -> Result<Matrix, ShapeError> {
        self.zip_with(other, "hadamard", |a, b| a * b)
    }

    fn zip_with(
        &self,
        other: &Matrix,
        op: &'static str,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<Matrix, ShapeError> {
        if self.shape() != other.shape() {
            return Err(ShapeError { op, lhs: self.shape(), rhs: other.shape() });
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        Ok(Matrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn add_assign(&mut self, other: &Matrix) -> Result<(), ShapeError> {
        if self.shape() != other.shape() {
            return Err(ShapeError { op: "add_assign", lhs: self.shape(), rhs: other.shape() });
        }
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        Ok(())
    }

    /// Elementwise `alpha * x + beta`.
    pub fn scale_add(&self, alpha: f64, beta: f64) -> Matrix {
        self.map(|x| alpha * x + beta)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn apply(&self, act: Activation) -> Matrix {
        self.map(|x| act.apply(x))
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        out
    }

    /// `(self + self^T) / 2`; the effective symmetric weight matrix.
    pub fn symmetrized(&self) -> Result<Matrix, ShapeError> {
        if self.rows != self.cols {
            return Err(ShapeError { op: "symmetrized", lhs: self.shape(), rhs: self.shape() });
        }
        let n = self.rows;
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out.data[i * n + j] = 0.5 * (self.data[i * n + j] + self.data[j * n + i]);
            }
        }
        Ok(out)
    }

    /// Broadcast-add a column vector to every column.
    pub fn add_col_broadcast(&self, col: &Matrix) -> Result<Matrix, ShapeError> {
        if col.cols != 1 || col.rows != self.rows {
            return Err(ShapeError { op: "add_col_broadcast", lhs: self.shape(), rhs: col.shape() });
        }
        let mut out = self.clone();
        for i in 0..self.rows {
            let b = col.data[i];
            for v in &mut out.data[i * self.cols..(i + 1) * self.cols] {
                *v += b;
            }
        }
        Ok(out)
    }

    /// Row sums as a column vector.
    pub fn row_sums(&self) -> Matrix {
        let data = (0..self.rows).map(|i| self.row(i).iter().sum()).collect();
        Matrix { rows: self.rows, cols: 1, data }
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    /// Squared Frobenius norm.
    pub fn frob_sq(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum()
    }

    /// Largest absolute entry of `self - other` (infinity norm of the difference).
    pub fn max_abs_diff(&self, other: &Matrix) -> Result<f64, ShapeError> {
        if self.shape() != other.shape() {
            return Err(ShapeError { op: "max_abs_diff", lhs: self.shape(), rhs: other.shape() });
        }
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Stack `self` on top of `other` (same column count).
    pub fn concat_rows(&self, other: &Matrix) -> Result<Matrix, ShapeError> {
        if self.cols != other.cols {
            return Err(ShapeError { op: "concat_rows", lhs: self.shape(), rhs: other.shape() });
        }
        let mut data = Vec::with_capacity(self.data.len() + other.data.len());
        data.extend_from_slice(&self.data);
        data.extend_from_slice(&other.data);
        Ok(Matrix { rows: self.rows + other.rows, cols: self.cols, data })
    }

    /// Horizontally stack columns taken from `source` at `indices`.
    pub fn select_columns(source: &Matrix, indices: &[usize]) -> Matrix {
        assert!(!indices.is_empty(), "select_columns needs at least one column");
        let mut out = Matrix::zeros(source.rows, indices.len());
        for (jj, &j) in indices.iter().enumerate() {
            for i in 0..source.rows {
                out.data[i * indices.len() + jj] = source.at(i, j);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn matmul_identity_cases() {
        let a = Matrix::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let i = Matrix::identity(2);
        assert_eq!(i.matmul(&a).unwrap(), a);
        assert_eq!(a.matmul(&i).unwrap(), a);
    }

    #[test]
    fn matmul_zero_case() {
        let a = Matrix::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let z = Matrix::zeros(2, 1);
        assert_eq!(a.matmul(&z).unwrap(), Matrix::zeros(2, 1));
    }

    #[test]
    fn matmul_hand_computed() {
        let a = Matrix::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let b = Matrix::from_rows(&[&[5.0], &[6.0]]);
        let c = a.matmul(&b).unwrap();
        assert_eq!(c, Matrix::from_rows(&[&[17.0], &[39.0]]));
    }

    #[test]
    fn matmul_shape_mismatch_is_an_error() {
        let a = Matrix::zeros(2, 3);
        let b = Matrix::zeros(2, 3);
        let err = a.matmul(&b).unwrap_err();
        assert_eq!(err.op, "matmul");
    }

    #[test]
    fn transposed_products_match_naive_transpose() {
        let a = Matrix::from_rows(&[&[1.0, -2.0, 0.5], &[0.25, 3.0, -1.0]]);
        let b = Matrix::from_rows(&[&[2.0, 1.0], &[0.0, -1.0], &[4.0, 0.5]]);
        let tn = a.matmul_tn(&b.transpose()).unwrap();
        assert_eq!(tn, a.transpose().matmul(&b.transpose()).unwrap());
        let nt = a.matmul_nt(&b.transpose()).unwrap();
        assert_eq!(nt, a.matmul(&b).unwrap());
    }

    #[test]
    fn symmetrized_is_symmetric() {
        let m = Matrix::from_rows(&[&[1.0, 2.0], &[5.0, -3.0]]);
        let w = m.symmetrized().unwrap();
        assert_eq!(w.at(0, 1), w.at(1, 0));
        assert_eq!(w.at(0, 1), 3.5);
    }

    #[test]
    fn broadcast_and_row_sums_round_trip() {
        let a = Matrix::from_rows(&[&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]]);
        let b = Matrix::col_vec(&[10.0, 20.0]);
        let c = a.add_col_broadcast(&b).unwrap();
        assert_eq!(c.row(0), &[11.0, 12.0, 13.0]);
        assert_eq!(c.row(1), &[24.0, 25.0, 26.0]);
        assert_eq!(a.row_sums(), Matrix::col_vec(&[6.0, 15.0]));
    }

    #[test]
    fn select_columns_picks_the_right_entries() {
        let a = Matrix::from_rows(&[&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]]);
        let picked = Matrix::select_columns(&a, &[2, 0]);
        assert_eq!(picked, Matrix::from_rows(&[&[3.0, 1.0], &[6.0, 4.0]]));
    }

    #[test]
    fn activation_examples() {
        let m = Matrix::from_rows(&[&[0.0]]);
        assert_eq!(m.apply(Activation::Tanh).at(0, 0), 0.0);
        assert_eq!(m.apply(Activation::AtanhClamped).at(0, 0), 0.0);
        let half = Matrix::from_rows(&[&[0.5]]);
        let x = half.apply(Activation::AtanhClamped).apply(Activation::Tanh);
        assert!((x.at(0, 0) - 0.5).abs() < 1e-5);
    }

    #[test]
    fn concat_rows_stacks() {
        let a = Matrix::from_rows(&[&[1.0, 2.0]]);
        let b = Matrix::from_rows(&[&[3.0, 4.0], &[5.0, 6.0]]);
        let c = a.concat_rows(&b).unwrap();
        assert_eq!(c.shape(), (3, 2));
        assert_eq!(c.row(2), &[5.0, 6.0]);
        let data = vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        assert_eq!(c.data(), &data[..]);
    }
}
