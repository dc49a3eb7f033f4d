//! Dense real matrices and the validated wrappers used throughout the crate.
//!
//! Storage is row-major. Every constructor checks that the shape is positive
//! and every entry is finite, so downstream code never sees NaN or Inf.

use std::fmt;
use std::ops::{Deref, Index};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance for accepting a matrix as symmetric weight.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// A finite real `rows x cols` matrix stored row-major.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyMatrix { rows, cols });
        }
        if data.len() != rows * cols {
            return Err(Error::EntryCount {
                rows,
                cols,
                found: data.len(),
            });
        }
        if let Some(k) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite {
                row: k / cols,
                col: k % cols,
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from a list of rows. Fails on ragged input.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(m * n);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != n {
                return Err(Error::RaggedRow {
                    line: i + 1,
                    expected: n,
                    found: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Self::new(m, n, data)
    }

    /// Panics if `f` produces a non-finite value; intended for internal
    /// constructions where finiteness is guaranteed.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let v = f(i, j);
                assert!(v.is_finite(), "non-finite entry at ({i}, {j})");
                data.push(v);
            }
        }
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| 0.0)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn ones(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| 1.0)
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        Self::from_fn(d.len(), d.len(), |i, j| if i == j { d[i] } else { 0.0 })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)])
            .collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.cols).map(<[f64]>::to_vec).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| f(self[(i, j)]))
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|x| c * x)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other, "add")?;
        Ok(Self::from_fn(self.rows, self.cols, |i, j| {
            self[(i, j)] + other[(i, j)]
        }))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other, "sub")?;
        Ok(Self::from_fn(self.rows, self.cols, |i, j| {
            self[(i, j)] - other[(i, j)]
        }))
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = vec![0.0; self.rows * other.cols];
        for i in 0..self.rows {
            let orow = &mut out[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for (o, b) in orow.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        Self::new(self.rows, other.cols, out)
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.cols, "matvec dimension mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Frobenius inner product `sum_ij A_ij B_ij`.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        self.check_same_shape(other, "inner product")?;
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum())
    }

    pub fn frobenius_norm(&self) -> f64 {
        frobenius_norm(self)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn min_entry(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn trace(&self) -> f64 {
        self.diagonal().iter().sum()
    }

    /// `||A - A^T||_F <= rel_tol * ||A||_F` (exact equality for the zero matrix).
    pub fn is_symmetric(&self, rel_tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        let mut asym = 0.0;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                let d = self[(i, j)] - self[(j, i)];
                asym += 2.0 * d * d;
            }
        }
        asym.sqrt() <= rel_tol * self.frobenius_norm()
    }

    /// `(A + A^T) / 2`; panics on non-square input.
    pub fn symmetrize(&self) -> Self {
        assert!(self.is_square(), "symmetrize needs a square matrix");
        Self::from_fn(self.rows, self.cols, |i, j| {
            0.5 * (self[(i, j)] + self[(j, i)])
        })
    }

    /// Assembles `[[a, b], [c, d]]`.
    pub fn block2x2(a: &Self, b: &Self, c: &Self, d: &Self) -> Result<Self> {
        if a.rows != b.rows || c.rows != d.rows || a.cols != c.cols || b.cols != d.cols {
            return Err(Error::DimensionMismatch(
                "inconsistent block shapes".to_string(),
            ));
        }
        let (m, n) = (a.rows, a.cols);
        Ok(Self::from_fn(m + c.rows, n + b.cols, |i, j| {
            match (i < m, j < n) {
                (true, true) => a[(i, j)],
                (true, false) => b[(i, j - n)],
                (false, true) => c[(i - m, j)],
                (false, false) => d[(i - m, j - n)],
            }
        }))
    }

    /// Copies the `rows x cols` sub-block starting at `(r0, c0)`.
    pub fn sub_block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        assert!(r0 + rows <= self.rows && c0 + cols <= self.cols);
        Self::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub fn from_nalgebra(m: &DMatrix<f64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }

    fn check_same_shape(&self, other: &Self, what: &str) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch(format!(
                "{what}: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

impl TryFrom<Vec<Vec<f64>>> for DenseMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::from_rows(&rows)
    }
}

impl From<DenseMatrix> for Vec<Vec<f64>> {
    fn from(m: DenseMatrix) -> Self {
        m.to_rows()
    }
}

/// An entrywise nonnegative matrix that is not identically zero.
#[derive(Clone, PartialEq, Debug)]
pub struct NonnegMatrix(DenseMatrix);

impl NonnegMatrix {
    pub fn new(m: DenseMatrix) -> Result<Self> {
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let v = m[(i, j)];
                if v < 0.0 {
                    return Err(Error::NegativeEntry {
                        row: i,
                        col: j,
                        value: v,
                    });
                }
            }
        }
        if m.max_abs() == 0.0 {
            return Err(Error::ZeroMatrix);
        }
        Ok(Self(m))
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        Self::new(DenseMatrix::from_rows(rows)?)
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.0
    }

    pub fn into_inner(self) -> DenseMatrix {
        self.0
    }
}

impl Deref for NonnegMatrix {
    type Target = DenseMatrix;

    fn deref(&self) -> &DenseMatrix {
        &self.0
    }
}

/// Symmetric, entrywise nonnegative weight with a strictly positive diagonal.
#[derive(Clone, PartialEq, Debug)]
pub struct SymWeight(DenseMatrix);

impl SymWeight {
    pub fn new(m: DenseMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::InvalidWeight(format!(
                "must be square, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        if !m.is_symmetric(SYMMETRY_TOL) {
            return Err(Error::InvalidWeight("not symmetric".to_string()));
        }
        if m.min_entry() < 0.0 {
            return Err(Error::InvalidWeight("has a negative entry".to_string()));
        }
        if m.diagonal().iter().any(|&d| d <= 0.0) {
            return Err(Error::InvalidWeight(
                "diagonal entries must be strictly positive".to_string(),
            ));
        }
        // Store the exactly symmetric part so downstream blocks are symmetric.
        Ok(Self(m.symmetrize()))
    }

    pub fn identity(n: usize) -> Self {
        Self(DenseMatrix::identity(n))
    }

    pub fn from_diagonal(d: &[f64]) -> Result<Self> {
        Self::new(DenseMatrix::from_diagonal(d))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.0
    }

    pub fn min_diagonal(&self) -> f64 {
        self.0.diagonal().into_iter().fold(f64::INFINITY, f64::min)
    }
}

impl Deref for SymWeight {
    type Target = DenseMatrix;

    fn deref(&self) -> &DenseMatrix {
        &self.0
    }
}

/// `sqrt(sum_ij A_ij^2)`.
pub fn frobenius_norm(a: &DenseMatrix) -> f64 {
    // Scale by the largest entry to avoid overflow on huge inputs.
    let s = a.max_abs();
    if s == 0.0 {
        return 0.0;
    }
    s * a
        .as_slice()
        .iter()
        .map(|x| (x / s) * (x / s))
        .sum::<f64>()
        .sqrt()
}

/// `trace(A^T P A Q)`, the weighted squared norm used as the bound denominator.
pub fn weighted_gram_trace(a: &DenseMatrix, p: &SymWeight, q: &SymWeight) -> Result<f64> {
    if p.dim() != a.rows() || q.dim() != a.cols() {
        return Err(Error::DimensionMismatch(format!(
            "weights {}x{} and {}x{} do not match a {}x{} matrix",
            p.dim(),
            p.dim(),
            q.dim(),
            q.dim(),
            a.rows(),
            a.cols()
        )));
    }
    let pa = p.matrix().matmul(a)?;
    let aq = a.matmul(q.matrix())?;
    pa.inner(&aq)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cohen_rothblum() -> DenseMatrix {
        DenseMatrix::from_rows(&[
            [1.0, 1.0, 0.0, 0.0],
            [1.0, 0.0, 1.0, 0.0],
            [0.0, 1.0, 0.0, 1.0],
            [0.0, 0.0, 1.0, 1.0],
        ])
        .unwrap()
    }

    #[test]
    fn frobenius_examples() {
        assert!((frobenius_norm(&cohen_rothblum()) - 8f64.sqrt()).abs() < 1e-15);
        assert_eq!(frobenius_norm(&DenseMatrix::zeros(2, 2)), 0.0);
        assert!((frobenius_norm(&DenseMatrix::identity(3)) - 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn weighted_gram_trace_examples() {
        let a = cohen_rothblum();
        let i4 = SymWeight::identity(4);
        assert!((weighted_gram_trace(&a, &i4, &i4).unwrap() - 8.0).abs() < 1e-14);

        let b = DenseMatrix::from_rows(&[[1.0, 2.0], [3.0, 4.0]]).unwrap();
        let i2 = SymWeight::identity(2);
        assert!((weighted_gram_trace(&b, &i2, &i2).unwrap() - 30.0).abs() < 1e-14);

        let (n, beta, eps) = (5, 7.0, 0.3);
        let mut d = vec![1.0; n];
        d[0] = beta;
        let a = DenseMatrix::from_diagonal(&d);
        let mut w = vec![1.0; n];
        w[0] = eps;
        let p = SymWeight::from_diagonal(&w).unwrap();
        let expected = (n - 1) as f64 + (beta * eps).powi(2);
        assert!((weighted_gram_trace(&a, &p, &p).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn weighted_gram_trace_rejects_mismatch() {
        let a = DenseMatrix::ones(2, 3);
        let p = SymWeight::identity(2);
        assert!(matches!(
            weighted_gram_trace(&a, &p, &p),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn nonneg_boundary() {
        assert!(NonnegMatrix::from_rows(&[[0.0, 1.0]]).is_ok());
        assert!(matches!(
            NonnegMatrix::from_rows(&[[0.0, -1e-300]]),
            Err(Error::NegativeEntry { row: 0, col: 1, .. })
        ));
        assert!(matches!(
            NonnegMatrix::from_rows(&[[0.0, 0.0]]),
            Err(Error::ZeroMatrix)
        ));
    }

    #[test]
    fn rejects_bad_shapes_and_values() {
        assert!(matches!(
            DenseMatrix::new(2, 2, vec![1.0; 3]),
            Err(Error::EntryCount { .. })
        ));
        assert!(matches!(
            DenseMatrix::new(1, 2, vec![1.0, f64::NAN]),
            Err(Error::NonFinite { row: 0, col: 1 })
        ));
        assert!(DenseMatrix::new(0, 2, vec![]).is_err());
    }

    #[test]
    fn sym_weight_validation() {
        assert!(SymWeight::new(DenseMatrix::from_rows(&[[1.0, 0.5], [0.5, 2.0]]).unwrap()).is_ok());
        assert!(
            SymWeight::new(DenseMatrix::from_rows(&[[1.0, 0.5], [0.4, 2.0]]).unwrap()).is_err()
        );
        assert!(
            SymWeight::new(DenseMatrix::from_rows(&[[1.0, -0.5], [-0.5, 2.0]]).unwrap()).is_err()
        );
        assert!(
            SymWeight::new(DenseMatrix::from_rows(&[[0.0, 0.0], [0.0, 2.0]]).unwrap()).is_err()
        );
    }

    #[test]
    fn block_assembly() {
        let i = DenseMatrix::identity(2);
        let z = DenseMatrix::zeros(2, 3);
        let b = DenseMatrix::block2x2(&i, &z, &z.transpose(), &DenseMatrix::identity(3)).unwrap();
        assert_eq!(b, DenseMatrix::identity(5));
        assert_eq!(b.sub_block(2, 2, 3, 3), DenseMatrix::identity(3));
    }
}
