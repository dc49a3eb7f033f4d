//! Dual certificates: a matrix `W` together with an explicit split of
//! `[[P, -W], [-W^T, Q]]` into a nonnegative part and a PSD part.
//!
//! Any such `W` is feasible for the copositive program defining
//! `nu_+(A; P, Q)`, so `<A, W>` is a lower bound on it. Numerical
//! certificates are slightly infeasible; [`round_certificate`] shrinks `W`
//! until feasibility is provable from an eigenvalue bound.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, SymWeight};
use crate::spectral::min_eigenvalue;

/// Relative safety margin added to the computed PSD deficit.
pub const EIGEN_SAFETY_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub w: DenseMatrix,
    pub nonneg_part: DenseMatrix,
    pub psd_part: DenseMatrix,
    pub weights: Option<(SymWeight, SymWeight)>,
}

#[derive(Serialize, Deserialize)]
struct WeightsJson {
    #[serde(rename = "P")]
    p: DenseMatrix,
    #[serde(rename = "Q")]
    q: DenseMatrix,
}

#[derive(Serialize, Deserialize)]
struct CertificateJson {
    m: usize,
    n: usize,
    #[serde(rename = "W")]
    w: DenseMatrix,
    nonneg_part: DenseMatrix,
    psd_part: DenseMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weights: Option<WeightsJson>,
}

impl Certificate {
    pub fn new(
        w: DenseMatrix,
        nonneg_part: DenseMatrix,
        psd_part: DenseMatrix,
        weights: Option<(SymWeight, SymWeight)>,
    ) -> Result<Self> {
        let cert = Self {
            w,
            nonneg_part,
            psd_part,
            weights,
        };
        cert.check_shapes()?;
        Ok(cert)
    }

    pub fn m(&self) -> usize {
        self.w.rows()
    }

    pub fn n(&self) -> usize {
        self.w.cols()
    }

    fn check_shapes(&self) -> Result<()> {
        let s = self.m() + self.n();
        if self.nonneg_part.shape() != (s, s) || self.psd_part.shape() != (s, s) {
            return Err(Error::DimensionMismatch(format!(
                "certificate parts must be {s}x{s} for a {}x{} W",
                self.m(),
                self.n()
            )));
        }
        if let Some((p, q)) = &self.weights {
            if p.dim() != self.m() || q.dim() != self.n() {
                return Err(Error::DimensionMismatch(
                    "certificate weights do not match W".into(),
                ));
            }
        }
        Ok(())
    }

    /// `[[P, -W], [-W^T, Q]]`, with identities when unweighted.
    pub fn target_block(&self) -> DenseMatrix {
        let (m, n) = (self.m(), self.n());
        let (p, q) = match &self.weights {
            Some((p, q)) => (p.matrix().clone(), q.matrix().clone()),
            None => (DenseMatrix::identity(m), DenseMatrix::identity(n)),
        };
        let neg_w = self.w.scale(-1.0);
        DenseMatrix::block2x2(&p, &neg_w, &neg_w.transpose(), &q).expect("shapes checked")
    }

    /// Smallest diagonal entry of `blockdiag(P, Q)`; 1 when unweighted.
    pub fn min_weight_diagonal(&self) -> f64 {
        match &self.weights {
            Some((p, q)) => p.min_diagonal().min(q.min_diagonal()),
            None => 1.0,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = CertificateJson {
            m: self.m(),
            n: self.n(),
            w: self.w.clone(),
            nonneg_part: self.nonneg_part.clone(),
            psd_part: self.psd_part.clone(),
            weights: self.weights.as_ref().map(|(p, q)| WeightsJson {
                p: p.matrix().clone(),
                q: q.matrix().clone(),
            }),
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: CertificateJson = serde_json::from_str(text)?;
        if doc.w.shape() != (doc.m, doc.n) {
            return Err(Error::DimensionMismatch(format!(
                "W is {}x{} but the certificate declares {}x{}",
                doc.w.rows(),
                doc.w.cols(),
                doc.m,
                doc.n
            )));
        }
        let weights = match doc.weights {
            Some(wj) => Some((SymWeight::new(wj.p)?, SymWeight::new(wj.q)?)),
            None => None,
        };
        Self::new(doc.w, doc.nonneg_part, doc.psd_part, weights)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertificateCheck {
    /// Largest entry of `|nonneg_part + psd_part - target|`.
    pub decomposition_residual: f64,
    pub nonneg_min: f64,
    /// `lambda_min(psd_part)` as stored.
    pub psd_min_eigenvalue: f64,
    /// `lambda_min(target - nonneg_part)`: the PSD part implied by `W` and the
    /// nonnegative part. This is what rounding relies on.
    pub implied_psd_min_eigenvalue: f64,
    /// `<A, W>`.
    pub objective: f64,
}

impl CertificateCheck {
    /// Exact-arithmetic feasibility up to `tol` on every residual.
    pub fn passes(&self, tol: f64) -> bool {
        self.decomposition_residual <= tol
            && self.nonneg_min >= -tol
            && self.psd_min_eigenvalue >= -tol
            && self.implied_psd_min_eigenvalue >= -tol
    }
}

fn check_matrix(a: &DenseMatrix, cert: &Certificate) -> Result<()> {
    if a.shape() != cert.w.shape() {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {}x{} but the certificate is for {}x{}",
            a.rows(),
            a.cols(),
            cert.m(),
            cert.n()
        )));
    }
    Ok(())
}

/// Deterministic residual report for a certificate; no optimization involved.
pub fn verify_certificate(a: &DenseMatrix, cert: &Certificate) -> Result<CertificateCheck> {
    check_matrix(a, cert)?;
    let target = cert.target_block();
    let decomposition_residual = cert
        .nonneg_part
        .add(&cert.psd_part)?
        .sub(&target)?
        .max_abs();
    Ok(CertificateCheck {
        decomposition_residual,
        nonneg_min: cert.nonneg_part.min_entry(),
        psd_min_eigenvalue: min_eigenvalue(&cert.psd_part)?,
        implied_psd_min_eigenvalue: min_eigenvalue(&target.sub(&cert.nonneg_part)?)?,
        objective: a.inner(&cert.w)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundedBound {
    /// PSD deficit plus safety margin.
    pub delta: f64,
    /// `<A, W>` before shrinking.
    pub objective: f64,
    /// `<A, W> / (1 + delta / p_min)`, a proven lower bound on `nu_+(A; P, Q)`.
    pub certified_value: f64,
}

/// Shrinks `W` until the certificate is provably feasible.
///
/// With `T = [[P, -W], [-W^T, Q]] - N` and `delta >= -lambda_min(T)`,
/// `T + delta I` is PSD. Let `t = delta / p_min` and `D = blockdiag(P, Q)`.
/// Then `(1 + t) D - [[0, W], [W^T, 0]]` splits as
/// `(N + t offdiag(D)) + (T + delta I + (t diag(D) - delta I))`: the first
/// term is entrywise nonnegative because `D >= 0`, the second is PSD because
/// `diag(D) >= p_min`. Dividing by `1 + t` shows `W / (1 + t)` is feasible for
/// the `(P, Q)` program, so its objective is a valid lower bound. For
/// `P = Q = I` this is the plain `W / (1 + delta)` rescaling.
///
/// The nonnegative part is clipped at zero before use.
pub fn round_certificate(a: &DenseMatrix, cert: &Certificate) -> Result<RoundedBound> {
    check_matrix(a, cert)?;
    let nonneg = cert.nonneg_part.map(|v| v.max(0.0)).symmetrize();
    let implied = cert.target_block().sub(&nonneg)?;
    let lambda_min = min_eigenvalue(&implied)?;
    let margin = EIGEN_SAFETY_MARGIN * (1.0 + cert.w.frobenius_norm());
    let delta = (-lambda_min).max(0.0) + margin;
    let objective = a.inner(&cert.w)?;
    Ok(RoundedBound {
        delta,
        objective,
        certified_value: objective / (1.0 + delta / cert.min_weight_diagonal()),
    })
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

    fn antidiag(n: usize) -> DenseMatrix {
        DenseMatrix::from_fn(n, n, |i, j| if i + j == n - 1 { 1.0 } else { 0.0 })
    }

    /// W = (2A - J)/sqrt(2) with the displayed nonnegative/PSD split.
    fn square_certificate() -> Certificate {
        let a = cohen_rothblum();
        let w = DenseMatrix::from_fn(4, 4, |i, j| (2.0 * a[(i, j)] - 1.0) / 2f64.sqrt());
        let n4 = antidiag(4);
        let z = DenseMatrix::zeros(4, 4);
        let nonneg = DenseMatrix::block2x2(&n4, &z, &z, &n4).unwrap();
        let diag = DenseMatrix::identity(4).sub(&n4).unwrap();
        let neg_w = w.scale(-1.0);
        let psd = DenseMatrix::block2x2(&diag, &neg_w, &neg_w.transpose(), &diag).unwrap();
        Certificate::new(w, nonneg, psd, None).unwrap()
    }

    #[test]
    fn square_certificate_is_exactly_feasible() {
        let a = cohen_rothblum();
        let check = verify_certificate(&a, &square_certificate()).unwrap();
        assert!(check.decomposition_residual < 1e-15);
        assert_eq!(check.nonneg_min, 0.0);
        assert!(check.psd_min_eigenvalue > -1e-12);
        assert!((check.objective - 4.0 * 2f64.sqrt()).abs() < 1e-12);
        assert!(check.passes(1e-9));
    }

    #[test]
    fn trivial_certificate() {
        let a = cohen_rothblum();
        let cert = Certificate::new(
            DenseMatrix::zeros(4, 4),
            DenseMatrix::zeros(8, 8),
            DenseMatrix::identity(8),
            None,
        )
        .unwrap();
        let check = verify_certificate(&a, &cert).unwrap();
        assert!(check.passes(0.0));
        assert_eq!(check.objective, 0.0);
    }

    #[test]
    fn rounding_scales_by_deficit() {
        // [[1, -1.01], [-1.01, 1]] has lambda_min = -0.01.
        let a = DenseMatrix::from_rows(&[[1.0]]).unwrap();
        let w = DenseMatrix::from_rows(&[[1.01]]).unwrap();
        let cert = Certificate::new(
            w.clone(),
            DenseMatrix::zeros(2, 2),
            DenseMatrix::from_rows(&[[1.0, -1.01], [-1.01, 1.0]]).unwrap(),
            None,
        )
        .unwrap();
        let r = round_certificate(&a, &cert).unwrap();
        let margin = EIGEN_SAFETY_MARGIN * (1.0 + 1.01);
        assert!((r.delta - (0.01 + margin)).abs() < 1e-14);
        assert!((r.certified_value - 1.01 / (1.01 + margin)).abs() < 1e-14);
    }

    #[test]
    fn rounding_exact_certificate_keeps_value() {
        let a = cohen_rothblum();
        let r = round_certificate(&a, &square_certificate()).unwrap();
        assert!(r.delta < 1e-8);
        assert!((r.certified_value - 4.0 * 2f64.sqrt()).abs() < 1e-7);
        assert!(r.certified_value <= r.objective);
    }

    #[test]
    fn json_round_trip_and_shape_errors() {
        let cert = square_certificate();
        let back = Certificate::from_json(&cert.to_json().unwrap()).unwrap();
        assert_eq!(back, cert);
        assert!(verify_certificate(&DenseMatrix::ones(3, 4), &cert).is_err());
        assert!(Certificate::new(
            DenseMatrix::zeros(2, 2),
            DenseMatrix::zeros(3, 3),
            DenseMatrix::zeros(4, 4),
            None
        )
        .is_err());
    }
}
