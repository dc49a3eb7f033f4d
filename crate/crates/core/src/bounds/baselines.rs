//! Classic spectral baselines: nuclear norm, `(nu / ||A||_F)^2` and rank.

use crate::matrix::DenseMatrix;
use crate::spectral::singular_values;

/// Relative threshold used by [`numerical_rank`] by default.
pub const RANK_REL_TOL: f64 = 1e-9;

/// Sum of the singular values.
pub fn nuclear_norm(a: &DenseMatrix) -> f64 {
    singular_values(a).iter().sum()
}

/// `(nuclear_norm / ||A||_F)^2`, a lower bound on `rank(A)`.
pub fn classic_rank_bound(a: &DenseMatrix) -> f64 {
    let f = a.frobenius_norm();
    if f == 0.0 {
        return 0.0;
    }
    (nuclear_norm(a) / f).powi(2)
}

/// Number of singular values above `rel_tol * sigma_1`.
pub fn numerical_rank(a: &DenseMatrix, rel_tol: f64) -> usize {
    let s = singular_values(a);
    match s.first() {
        Some(&top) if top > 0.0 => s.iter().filter(|&&v| v > rel_tol * top).count(),
        _ => 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn derangement(n: usize) -> DenseMatrix {
        DenseMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { 1.0 })
    }

    #[test]
    fn identity() {
        let i3 = DenseMatrix::identity(3);
        assert!((nuclear_norm(&i3) - 3.0).abs() < 1e-12);
        assert!((classic_rank_bound(&i3) - 3.0).abs() < 1e-12);
        assert_eq!(numerical_rank(&i3, RANK_REL_TOL), 3);
    }

    #[test]
    fn derangement_values() {
        for n in 2..8 {
            let d = derangement(n);
            let nf = n as f64;
            assert!((nuclear_norm(&d) - 2.0 * (nf - 1.0)).abs() < 1e-10);
            assert!((classic_rank_bound(&d) - 4.0 * (1.0 - 1.0 / nf)).abs() < 1e-10);
            assert_eq!(numerical_rank(&d, RANK_REL_TOL), n);
        }
    }

    #[test]
    fn rank_one() {
        let a = DenseMatrix::from_fn(3, 4, |i, j| (i + 1) as f64 * (j + 2) as f64);
        assert!((classic_rank_bound(&a) - 1.0).abs() < 1e-10);
        assert_eq!(numerical_rank(&a, RANK_REL_TOL), 1);
    }

    #[test]
    fn square_slack_has_rank_three() {
        let a = DenseMatrix::from_rows(&[
            [1.0, 1.0, 0.0, 0.0],
            [1.0, 0.0, 1.0, 0.0],
            [0.0, 1.0, 0.0, 1.0],
            [0.0, 0.0, 1.0, 1.0],
        ])
        .unwrap();
        assert_eq!(numerical_rank(&a, RANK_REL_TOL), 3);
        assert!(nuclear_norm(&a) <= 4.0 * 2f64.sqrt() + 1e-12);
        assert_eq!(numerical_rank(&DenseMatrix::zeros(2, 2), RANK_REL_TOL), 0);
    }
}
