//! Symmetric eigendecomposition, SVD, and the two cone projections used by the
//! solver and by certificate checks.
//!
//! Outputs are normalized for determinism: eigenvalues ascending, singular
//! values descending, and each eigenvector (resp. right singular vector) has
//! its largest-magnitude component positive.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector of `values[k]`.
    pub vectors: DenseMatrix,
}

impl EigenDecomposition {
    pub fn min_value(&self) -> f64 {
        self.values[0]
    }

    pub fn max_value(&self) -> f64 {
        *self.values.last().unwrap()
    }

    pub fn reconstruct(&self) -> DenseMatrix {
        let n = self.values.len();
        let v = &self.vectors;
        DenseMatrix::from_fn(n, n, |i, j| {
            (0..n).map(|k| v[(i, k)] * self.values[k] * v[(j, k)]).sum()
        })
    }
}

#[derive(Debug, Clone)]
pub struct SvdResult {
    /// Descending, length `min(m, n)`.
    pub values: Vec<f64>,
    /// `m x r` with orthonormal columns.
    pub left: DenseMatrix,
    /// `n x r` with orthonormal columns.
    pub right: DenseMatrix,
}

impl SvdResult {
    pub fn reconstruct(&self) -> DenseMatrix {
        let (u, v) = (&self.left, &self.right);
        DenseMatrix::from_fn(u.rows(), v.rows(), |i, j| {
            self.values
                .iter()
                .enumerate()
                .map(|(k, s)| u[(i, k)] * s * v[(j, k)])
                .sum()
        })
    }
}

/// Index of the largest-magnitude entry of column `k`; ties go to the lowest row.
fn pivot_row(m: &DMatrix<f64>, k: usize) -> usize {
    let mut best = 0;
    for i in 1..m.nrows() {
        if m[(i, k)].abs() > m[(best, k)].abs() * (1.0 + 1e-12) {
            best = i;
        }
    }
    best
}

pub(crate) fn sym_eig_nalgebra(m: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(m);
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = eig.eigenvectors.select_columns(&order);
    for k in 0..n {
        let p = pivot_row(&vectors, k);
        if vectors[(p, k)] < 0.0 {
            vectors.column_mut(k).neg_mut();
        }
    }
    (values, vectors)
}

/// Eigendecomposition of the symmetric part of a square matrix.
pub fn sym_eig(m: &DenseMatrix) -> Result<EigenDecomposition> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let (values, vectors) = sym_eig_nalgebra(m.symmetrize().to_nalgebra());
    Ok(EigenDecomposition {
        values,
        vectors: DenseMatrix::from_nalgebra(&vectors),
    })
}

/// Smallest eigenvalue of the symmetric part of `m`.
pub fn min_eigenvalue(m: &DenseMatrix) -> Result<f64> {
    Ok(sym_eig(m)?.min_value())
}

pub fn svd(a: &DenseMatrix) -> SvdResult {
    let (m, n) = a.shape();
    let r = m.min(n);
    let dec = a.to_nalgebra().svd(true, true);
    let u = dec.u.expect("requested U");
    let vt = dec.v_t.expect("requested V^T");
    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&x, &y| dec.singular_values[y].total_cmp(&dec.singular_values[x]));
    let values: Vec<f64> = order
        .iter()
        .map(|&k| dec.singular_values[k].max(0.0))
        .collect();
    let mut left = u.select_columns(&order);
    let mut right = vt.transpose().select_columns(&order);
    for k in 0..r {
        let p = pivot_row(&right, k);
        if right[(p, k)] < 0.0 {
            right.column_mut(k).neg_mut();
            left.column_mut(k).neg_mut();
        }
    }
    SvdResult {
        values,
        left: DenseMatrix::from_nalgebra(&left),
        right: DenseMatrix::from_nalgebra(&right),
    }
}

pub fn singular_values(a: &DenseMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = a
        .to_nalgebra()
        .singular_values()
        .iter()
        .map(|x| x.max(0.0))
        .collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// In-place Euclidean projection of a symmetric nalgebra matrix onto the PSD cone.
pub(crate) fn project_psd_in_place(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    let eig = SymmetricEigen::new(m.clone());
    let negatives = eig.eigenvalues.iter().filter(|&&l| l < 0.0).count();
    if negatives == 0 {
        return;
    }
    let v = &eig.eigenvectors;
    if negatives <= n / 2 {
        // Subtract the negative part: M - sum_{l<0} l v v^T.
        for (k, &l) in eig.eigenvalues.iter().enumerate() {
            if l < 0.0 {
                let col = v.column(k);
                m.ger(-l, &col, &col, 1.0);
            }
        }
    } else {
        m.fill(0.0);
        for (k, &l) in eig.eigenvalues.iter().enumerate() {
            if l > 0.0 {
                let col = v.column(k);
                m.ger(l, &col, &col, 1.0);
            }
        }
    }
    // Restore exact symmetry lost to rank-one update rounding.
    for i in 0..n {
        for j in (i + 1)..n {
            let s = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = s;
            m[(j, i)] = s;
        }
    }
}

/// Nearest PSD matrix in Frobenius norm to the symmetric part of `m`.
pub fn project_psd(m: &DenseMatrix) -> Result<DenseMatrix> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(
            "PSD projection needs a square matrix".into(),
        ));
    }
    let mut x = m.symmetrize().to_nalgebra();
    project_psd_in_place(&mut x);
    Ok(DenseMatrix::from_nalgebra(&x))
}

/// Entrywise `max(x, 0)`.
pub fn project_nonneg(x: &[f64]) -> Vec<f64> {
    x.iter().map(|&v| v.max(0.0)).collect()
}

pub fn project_nonneg_matrix(m: &DenseMatrix) -> DenseMatrix {
    m.map(|v| v.max(0.0))
}
