//! Standard-form cone programs and a first-order splitting solver for them.
//!
//! Problems have the form
//!
//! ```text
//!   minimize  c^T z   subject to  M z = b,  z in K
//! ```
//!
//! where `K` is a product of zero, free, nonnegative and PSD cones. The dual is
//!
//! ```text
//!   maximize  b^T y   subject to  c - M^T y = s,  s in K*
//! ```
//!
//! PSD blocks use the scaled symmetric vectorization of [`cone::svec`].

mod admm;
pub mod cone;

use std::f64::consts::SQRT_2;
use std::ops::Range;

pub use admm::{solve, solve_with_log};
pub use cone::{smat, svec, svec_index, svec_len, Cone, ConeProduct};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// Compressed sparse rows of the constraint operator `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintMatrix {
    ncols: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl ConstraintMatrix {
    pub fn new(ncols: usize) -> Self {
        Self {
            ncols,
            row_ptr: vec![0],
            cols: Vec::new(),
            vals: Vec::new(),
        }
    }

    /// Appends a row; duplicate columns are summed and exact zeros dropped.
    pub fn push_row(&mut self, entries: impl IntoIterator<Item = (usize, f64)>) {
        let mut e: Vec<(usize, f64)> = entries.into_iter().collect();
        e.sort_by_key(|&(c, _)| c);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(e.len());
        for (c, v) in e {
            assert!(c < self.ncols, "column {c} out of range {}", self.ncols);
            match merged.last_mut() {
                Some((lc, lv)) if *lc == c => *lv += v,
                _ => merged.push((c, v)),
            }
        }
        for (c, v) in merged {
            if v != 0.0 {
                self.cols.push(c);
                self.vals.push(v);
            }
        }
        self.row_ptr.push(self.cols.len());
    }

    pub fn nrows(&self) -> usize {
        self.row_ptr.len() - 1
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[span.clone()]
            .iter()
            .copied()
            .zip(self.vals[span].iter().copied())
    }

    /// `M z`.
    pub fn mul(&self, z: &[f64]) -> Vec<f64> {
        (0..self.nrows())
            .map(|r| self.row(r).map(|(c, v)| v * z[c]).sum())
            .collect()
    }

    /// `M^T y`.
    pub fn tmul(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.ncols];
        self.tmul_add(y, 1.0, &mut out);
        out
    }

    /// `out += alpha * M^T y`.
    pub fn tmul_add(&self, y: &[f64], alpha: f64, out: &mut [f64]) {
        for (r, &yr) in y.iter().enumerate() {
            if yr == 0.0 {
                continue;
            }
            for (c, v) in self.row(r) {
                out[c] += alpha * v * yr;
            }
        }
    }
}

/// How a contiguous range of variables or constraints maps to a matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockShape {
    /// Row-major `rows x cols`, one coordinate per entry.
    Dense { rows: usize, cols: usize },
    /// Upper triangle of a symmetric `side x side` matrix, row-major.
    /// For variables the coordinates are the scaled vectorization; for
    /// constraints each row is written in plain matrix-entry units.
    Sym { side: usize },
}

impl BlockShape {
    pub fn len(&self) -> usize {
        match *self {
            BlockShape::Dense { rows, cols } => rows * cols,
            BlockShape::Sym { side } => svec_len(side),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NamedBlock {
    pub name: String,
    pub start: usize,
    pub shape: BlockShape,
}

impl NamedBlock {
    pub fn range(&self) -> Range<usize> {
        self.start..self.start + self.shape.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConicProblem {
    pub c: Vec<f64>,
    pub a: ConstraintMatrix,
    pub b: Vec<f64>,
    pub cone: ConeProduct,
    /// Named variable blocks, for reading matrices back out of a solution.
    pub variables: Vec<NamedBlock>,
    /// Named constraint blocks, for reading dual matrices.
    pub constraints: Vec<NamedBlock>,
}

impl ConicProblem {
    pub fn validate(&self) -> Result<()> {
        let n = self.cone.len();
        if self.c.len() != n || self.a.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "objective length {} and operator columns {} must equal cone length {n}",
                self.c.len(),
                self.a.ncols()
            )));
        }
        if self.b.len() != self.a.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "right-hand side length {} != constraint count {}",
                self.b.len(),
                self.a.nrows()
            )));
        }
        if self.c.iter().chain(&self.b).any(|v| !v.is_finite())
            || self.a.vals.iter().any(|v| !v.is_finite())
        {
            return Err(Error::InvalidArgument("problem data must be finite".into()));
        }
        for blk in &self.variables {
            if blk.range().end > n {
                return Err(Error::DimensionMismatch(format!(
                    "variable block {} out of range",
                    blk.name
                )));
            }
        }
        for blk in &self.constraints {
            if blk.range().end > self.a.nrows() {
                return Err(Error::DimensionMismatch(format!(
                    "constraint block {} out of range",
                    blk.name
                )));
            }
        }
        Ok(())
    }

    pub fn variable(&self, name: &str) -> Option<&NamedBlock> {
        self.variables.iter().find(|b| b.name == name)
    }

    pub fn constraint(&self, name: &str) -> Option<&NamedBlock> {
        self.constraints.iter().find(|b| b.name == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    MaxIter,
    InfeasibleSuspected,
}

impl SolveStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::MaxIter => "max_iter",
            SolveStatus::InfeasibleSuspected => "infeasible_suspected",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residuals {
    /// `||M z - b|| / (1 + ||b||)`.
    pub primal: f64,
    /// `||c - M^T y - s|| / (1 + ||c||)`.
    pub dual: f64,
    /// `|c^T z - b^T y| / (1 + |c^T z| + |b^T y|)`.
    pub gap: f64,
}

impl Residuals {
    pub fn max(&self) -> f64 {
        self.primal.max(self.dual).max(self.gap)
    }
}

#[derive(Debug, Clone)]
pub struct ConicSolution {
    pub status: SolveStatus,
    /// Primal point, inside the cone.
    pub z: Vec<f64>,
    /// Equality multipliers.
    pub y: Vec<f64>,
    /// Dual slack, inside the dual cone.
    pub s: Vec<f64>,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub residuals: Residuals,
    pub iterations: usize,
}

impl ConicSolution {
    /// Reads a primal variable block back as a matrix.
    pub fn primal_block(&self, block: &NamedBlock) -> DenseMatrix {
        let seg = &self.z[block.range()];
        match block.shape {
            BlockShape::Dense { rows, cols } => {
                DenseMatrix::from_fn(rows, cols, |i, j| seg[i * cols + j])
            }
            BlockShape::Sym { side } => smat(seg, side),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    pub tol: f64,
    pub max_iter: usize,
    /// Over-relaxation parameter in (0, 2).
    pub alpha: f64,
    pub rho: f64,
    /// Penalty is reconsidered at this period.
    pub adapt_interval: usize,
    /// Residual ratio that triggers a penalty change.
    pub adapt_ratio: f64,
    /// Residuals are evaluated at this period.
    pub check_interval: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            tol: 1e-7,
            max_iter: 200_000,
            alpha: 1.5,
            rho: 1.0,
            adapt_interval: 100,
            adapt_ratio: 10.0,
            check_interval: 10,
        }
    }
}

impl SolverSettings {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }
}

/// Reshapes the multipliers of the constraints in `range` into a matrix.
///
/// `Sym` constraint rows are in matrix-entry units, so the off-diagonal
/// multiplier of row `(i, j)` is split evenly between `(i, j)` and `(j, i)`:
/// the returned `Y` satisfies `sum_k y_k row_k = <Y, .>` on symmetric matrices.
pub fn extract_dual_block(
    sol: &ConicSolution,
    range: Range<usize>,
    shape: BlockShape,
) -> Result<DenseMatrix> {
    if range.end > sol.y.len() || range.len() != shape.len() {
        return Err(Error::DimensionMismatch(format!(
            "constraint range {range:?} does not fit {} multipliers with shape {shape:?}",
            sol.y.len()
        )));
    }
    let seg = &sol.y[range];
    Ok(match shape {
        BlockShape::Dense { rows, cols } => {
            DenseMatrix::from_fn(rows, cols, |i, j| seg[i * cols + j])
        }
        BlockShape::Sym { side } => DenseMatrix::from_fn(side, side, |i, j| {
            let v = seg[svec_index(side, i, j)];
            if i == j {
                v
            } else {
                0.5 * v
            }
        }),
    })
}

/// Coefficient on a scaled-vectorization coordinate that reads off the matrix
/// entry `(i, j)` in plain units.
pub fn entry_coefficient(i: usize, j: usize) -> f64 {
    if i == j {
        1.0
    } else {
        1.0 / SQRT_2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constraint_matrix_products() {
        let mut m = ConstraintMatrix::new(3);
        m.push_row([(0, 1.0), (2, 2.0), (0, 1.0)]);
        m.push_row([(1, -1.0), (1, 1.0)]);
        assert_eq!(m.nrows(), 2);
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.mul(&[1.0, 2.0, 3.0]), vec![8.0, 0.0]);
        assert_eq!(m.tmul(&[1.0, 5.0]), vec![2.0, 0.0, 2.0]);
    }

    #[test]
    fn extract_rejects_bad_range() {
        let sol = ConicSolution {
            status: SolveStatus::Optimal,
            z: vec![],
            y: vec![1.0, 2.0],
            s: vec![],
            primal_objective: 0.0,
            dual_objective: 0.0,
            residuals: Residuals {
                primal: 0.0,
                dual: 0.0,
                gap: 0.0,
            },
            iterations: 0,
        };
        assert!(extract_dual_block(&sol, 0..3, BlockShape::Dense { rows: 1, cols: 3 }).is_err());
        assert!(extract_dual_block(&sol, 0..2, BlockShape::Dense { rows: 1, cols: 3 }).is_err());
        let m = extract_dual_block(&sol, 0..2, BlockShape::Dense { rows: 2, cols: 1 }).unwrap();
        assert_eq!(m.to_rows(), vec![vec![1.0], vec![2.0]]);
    }
}
