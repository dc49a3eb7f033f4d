use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::spectral::project_nonneg;

/// `A = sum_i lambda_i u_i v_i^T` with nonnegative unit vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct NonnegFactorization {
    pub lambdas: Vec<f64>,
    pub u: Vec<Vec<f64>>,
    pub v: Vec<Vec<f64>>,
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

impl NonnegFactorization {
    /// Normalizes each pair of nonnegative factors `x_i y_i^T`.
    pub fn from_terms(terms: &[(Vec<f64>, Vec<f64>)]) -> Result<Self> {
        let mut out = Self {
            lambdas: Vec::new(),
            u: Vec::new(),
            v: Vec::new(),
        };
        let dims = terms.first().map(|(x, y)| (x.len(), y.len()));
        for (x, y) in terms {
            if Some((x.len(), y.len())) != dims {
                return Err(Error::DimensionMismatch(
                    "factor lengths differ between terms".into(),
                ));
            }
            if x.iter().chain(y).any(|&t| !(t >= 0.0)) {
                return Err(Error::InvalidArgument("factors must be nonnegative".into()));
            }
            let (nx, ny) = (norm(x), norm(y));
            if nx == 0.0 || ny == 0.0 {
                continue;
            }
            out.lambdas.push(nx * ny);
            out.u.push(x.iter().map(|t| t / nx).collect());
            out.v.push(y.iter().map(|t| t / ny).collect());
        }
        Ok(out)
    }

    /// The terms of `U V` with nonnegative `U` (m x r) and `V` (r x n).
    pub fn from_factors(u: &DenseMatrix, v: &DenseMatrix) -> Result<Self> {
        if u.cols() != v.rows() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                u.rows(),
                u.cols(),
                v.rows(),
                v.cols()
            )));
        }
        let terms: Vec<_> = (0..u.cols())
            .map(|k| (u.column(k), v.row(k).to_vec()))
            .collect();
        Self::from_terms(&terms)
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.lambdas.iter().sum()
    }

    pub fn matrix(&self) -> Option<DenseMatrix> {
        let m = self.u.first()?.len();
        let n = self.v.first()?.len();
        Some(DenseMatrix::from_fn(m, n, |i, j| {
            (0..self.len())
                .map(|k| self.lambdas[k] * self.u[k][i] * self.v[k][j])
                .sum()
        }))
    }
}

/// `max_i max(||u_i - P(W v_i)||_inf, ||v_i - P(W^T u_i)||_inf)` with `P` the
/// projection onto the nonnegative orthant.
///
/// Zero at an optimal `W` when `fact` attains the nonnegative nuclear norm;
/// otherwise only a diagnostic.
pub fn optimal_w_fixed_point_check(w: &DenseMatrix, fact: &NonnegFactorization) -> Result<f64> {
    let wt = w.transpose();
    let mut worst = 0.0f64;
    for (u, v) in fact.u.iter().zip(&fact.v) {
        if u.len() != w.rows() || v.len() != w.cols() {
            return Err(Error::DimensionMismatch(
                "factorization does not match W".into(),
            ));
        }
        let pu = project_nonneg(&w.matvec(v));
        let pv = project_nonneg(&wt.matvec(u));
        for (a, b) in u.iter().zip(&pu).chain(v.iter().zip(&pv)) {
            worst = worst.max((a - b).abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_columns_are_fixed_points() {
        let a = DenseMatrix::from_rows(&[
            [1.0, 1.0, 0.0, 0.0],
            [1.0, 0.0, 1.0, 0.0],
            [0.0, 1.0, 0.0, 1.0],
            [0.0, 0.0, 1.0, 1.0],
        ])
        .unwrap();
        let w = a.map(|t| (2.0 * t - 1.0) / 2f64.sqrt());
        let fact = NonnegFactorization::from_factors(&a, &DenseMatrix::identity(4)).unwrap();
        assert!(fact.lambdas.iter().all(|l| (l - 2f64.sqrt()).abs() < 1e-15));
        assert!(fact.matrix().unwrap().sub(&a).unwrap().max_abs() < 1e-12);
        assert!(optimal_w_fixed_point_check(&w, &fact).unwrap() < 1e-15);
    }

    #[test]
    fn diagonal() {
        let d = [3.0, 1.0, 0.5];
        let a = DenseMatrix::from_diagonal(&d);
        let fact = NonnegFactorization::from_factors(&a, &DenseMatrix::identity(3)).unwrap();
        assert_eq!(fact.total_weight(), 4.5);
        assert_eq!(
            optimal_w_fixed_point_check(&DenseMatrix::identity(3), &fact).unwrap(),
            0.0
        );
    }

    #[test]
    fn rejects_negative_factors() {
        assert!(NonnegFactorization::from_terms(&[(vec![1.0, -1.0], vec![1.0])]).is_err());
    }
}
