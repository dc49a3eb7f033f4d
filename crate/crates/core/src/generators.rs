//! The example matrices, with closed-form certificates where they exist.
//!
//! Entries are assembled from integers and scaled last, so identities such as
//! `W_hat W_hat^T = 2^n (I - N_F)` hold exactly.

use crate::bounds::{Certificate, NonnegFactorization};
use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, NonnegMatrix, SymWeight};

/// Largest hypercube dimension accepted by [`hypercube_slack`].
pub const HYPERCUBE_MAX_N: usize = 12;

fn from_integers(rows: &[[i32; 4]]) -> NonnegMatrix {
    NonnegMatrix::new(DenseMatrix::from_fn(rows.len(), 4, |i, j| {
        rows[i][j] as f64
    }))
    .expect("nonnegative literal")
}

/// The 4x4 slack matrix of the square, in its classical row order.
pub fn cohen_rothblum() -> NonnegMatrix {
    from_integers(&[[1, 1, 0, 0], [1, 0, 1, 0], [0, 1, 0, 1], [0, 0, 1, 1]])
}

/// `cohen_rothblum() + eps J`.
pub fn perturbed_cohen_rothblum(eps: f64) -> Result<NonnegMatrix> {
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "eps must be finite and >= 0, got {eps}"
        )));
    }
    NonnegMatrix::new(cohen_rothblum().map(|v| v + eps))
}

/// 4x4 matrix with rectangle covering number 2 and nonnegative rank 3.
pub fn boolean_rank_example() -> NonnegMatrix {
    from_integers(&[[0, 1, 1, 1], [1, 1, 1, 1], [1, 1, 0, 0], [1, 1, 0, 0]])
}

/// Nonnegative factors `(U, V)` (4x3 and 3x4) with `U V = boolean_rank_example()`.
pub fn boolean_rank_factors() -> (DenseMatrix, DenseMatrix) {
    let u = DenseMatrix::from_rows(&[
        [1.0, 1.0, 0.0],
        [1.0, 1.0, 1.0],
        [0.0, 1.0, 1.0],
        [0.0, 1.0, 1.0],
    ])
    .unwrap();
    let v = DenseMatrix::from_rows(&[
        [0.0, 0.0, 1.0, 1.0],
        [0.0, 1.0, 0.0, 0.0],
        [1.0, 0.0, 0.0, 0.0],
    ])
    .unwrap();
    (u, v)
}

/// `J - I`.
pub fn derangement(n: usize) -> Result<NonnegMatrix> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "derangement needs n >= 2, got {n}"
        )));
    }
    NonnegMatrix::new(DenseMatrix::from_fn(
        n,
        n,
        |i, j| if i == j { 0.0 } else { 1.0 },
    ))
}

/// Upper bound on `nu_+(D_n)`.
///
/// Restricting to `W = b J + (a - b) I` and testing copositivity on disjoint
/// 0/1 vectors `u`, `v` with `p` and `q` ones gives `b p q <= (p + q) / 2`,
/// and `nu_+(D_n) = (n^2 - n) b_n`. Even `n` uses `p = q = n/2`, giving
/// `2(n - 1)`. Odd `n` uses `p = (n-1)/2`, `q = (n+1)/2`, giving
/// `2n^2 / (n + 1)`; the ratio `(nu_+ / ||D_n||_F)^2` stays below 4 in both
/// cases.
pub fn derangement_nu_upper(n: usize) -> f64 {
    let nf = n as f64;
    if n.is_multiple_of(2) {
        2.0 * (nf - 1.0)
    } else {
        2.0 * nf * nf / (nf + 1.0)
    }
}

/// `diag(beta, 1, ..., 1)` of size `n`.
pub fn scaled_diagonal(n: usize, beta: f64) -> Result<NonnegMatrix> {
    if n == 0 || !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "need n >= 1 and beta > 0, got n={n}, beta={beta}"
        )));
    }
    let mut d = vec![1.0; n];
    d[0] = beta;
    NonnegMatrix::new(DenseMatrix::from_diagonal(&d))
}

/// `P = Q = diag(eps, 1, ..., 1)`.
pub fn scaled_diagonal_weights(n: usize, eps: f64) -> Result<(SymWeight, SymWeight)> {
    if n == 0 {
        return Err(Error::InvalidArgument("need n >= 1".into()));
    }
    let mut d = vec![1.0; n];
    d[0] = eps;
    let p = SymWeight::from_diagonal(&d)?;
    Ok((p.clone(), p))
}

/// Slack matrix of `[0, 1]^n` with the closed-form level-0 certificate.
///
/// Facets are ordered `x_1 >= 0, ..., x_n >= 0, x_1 <= 1, ..., x_n <= 1` and
/// vertex `v` has `x_k` equal to bit `k - 1` of `v`. Facet `k` is opposite to
/// facet `n + k` and vertex `v` to vertex `2^n - 1 - v`.
#[derive(Debug, Clone)]
pub struct HypercubeCertificate {
    pub n: usize,
    /// 0/1 slack matrix, `2n x 2^n`.
    pub slack: NonnegMatrix,
    /// `gamma (2 S - J)`.
    pub w: DenseMatrix,
    /// `1 / sqrt(2^(n-1))`.
    pub gamma: f64,
    slack_int: Vec<Vec<i64>>,
}

fn slack_entry(n: usize, facet: usize, vertex: usize) -> i64 {
    let k = facet % n;
    let bit = (vertex >> k & 1) as i64;
    if facet < n {
        bit
    } else {
        1 - bit
    }
}

pub fn hypercube_slack(n: usize) -> Result<HypercubeCertificate> {
    if n == 0 || n > HYPERCUBE_MAX_N {
        return Err(Error::InvalidArgument(format!(
            "hypercube dimension must be in 1..={HYPERCUBE_MAX_N}, got {n}"
        )));
    }
    let (f, v) = (2 * n, 1usize << n);
    let slack_int: Vec<Vec<i64>> = (0..f)
        .map(|r| (0..v).map(|c| slack_entry(n, r, c)).collect())
        .collect();
    let slack = NonnegMatrix::new(DenseMatrix::from_fn(f, v, |r, c| slack_int[r][c] as f64))?;
    let gamma = 1.0 / ((1u64 << (n - 1)) as f64).sqrt();
    let w = DenseMatrix::from_fn(f, v, |r, c| gamma * (2 * slack_int[r][c] - 1) as f64);
    let cert = HypercubeCertificate {
        n,
        slack,
        w,
        gamma,
        slack_int,
    };
    cert.check_invariants()?;
    Ok(cert)
}

impl HypercubeCertificate {
    pub fn facets(&self) -> usize {
        2 * self.n
    }

    pub fn vertices(&self) -> usize {
        1 << self.n
    }

    /// Index of the opposite facet.
    pub fn opposite_facet(&self, f: usize) -> usize {
        (f + self.n) % (2 * self.n)
    }

    /// Index of the opposite vertex.
    pub fn opposite_vertex(&self, v: usize) -> usize {
        self.vertices() - 1 - v
    }

    /// `2 S - J` with integer entries.
    pub fn w_hat(&self) -> Vec<Vec<i64>> {
        self.slack_int
            .iter()
            .map(|r| r.iter().map(|&s| 2 * s - 1).collect())
            .collect()
    }

    /// `N_F`, the facet negation permutation.
    pub fn facet_negation(&self) -> DenseMatrix {
        let f = self.facets();
        DenseMatrix::from_fn(f, f, |i, j| {
            if j == self.opposite_facet(i) {
                1.0
            } else {
                0.0
            }
        })
    }

    /// `N_V`, the vertex negation permutation.
    pub fn vertex_negation(&self) -> DenseMatrix {
        let v = self.vertices();
        DenseMatrix::from_fn(v, v, |i, j| {
            if j == self.opposite_vertex(i) {
                1.0
            } else {
                0.0
            }
        })
    }

    /// `blockdiag(N_F, N_V)`.
    pub fn nonneg_part(&self) -> DenseMatrix {
        let (f, v) = (self.facets(), self.vertices());
        DenseMatrix::block2x2(
            &self.facet_negation(),
            &DenseMatrix::zeros(f, v),
            &DenseMatrix::zeros(v, f),
            &self.vertex_negation(),
        )
        .expect("block shapes")
    }

    /// `[[I - N_F, -W], [-W^T, I - N_V]]`.
    pub fn psd_part(&self) -> DenseMatrix {
        let (f, v) = (self.facets(), self.vertices());
        let top = DenseMatrix::identity(f)
            .sub(&self.facet_negation())
            .unwrap();
        let bottom = DenseMatrix::identity(v)
            .sub(&self.vertex_negation())
            .unwrap();
        let neg_w = self.w.scale(-1.0);
        DenseMatrix::block2x2(&top, &neg_w, &neg_w.transpose(), &bottom).expect("block shapes")
    }

    pub fn certificate(&self) -> Certificate {
        Certificate::new(self.w.clone(), self.nonneg_part(), self.psd_part(), None)
            .expect("consistent shapes")
    }

    /// `sqrt(2^(n-1)) * 2n`.
    pub fn objective(&self) -> f64 {
        2.0 * self.n as f64 / self.gamma
    }

    /// One term per facet: `S = sum_F e_F s_F^T`.
    pub fn facet_factorization(&self) -> NonnegFactorization {
        let f = self.facets();
        let terms: Vec<_> = (0..f)
            .map(|r| {
                let mut e = vec![0.0; f];
                e[r] = 1.0;
                (e, self.slack.row(r).to_vec())
            })
            .collect();
        NonnegFactorization::from_terms(&terms).expect("nonnegative slack rows")
    }

    /// Checks, in integer arithmetic, that every vertex lies on `n` facets,
    /// that both negation maps are fixed-point-free involutions, that
    /// `W_hat N_V = -W_hat`, and that `W_hat W_hat^T = 2^n (I - N_F)`.
    ///
    /// The last two make the Schur complement of `I - N_V` in the PSD part
    /// vanish, so the PSD part is positive semidefinite.
    pub fn check_invariants(&self) -> Result<()> {
        let (n, f, v) = (self.n, self.facets(), self.vertices());
        let fail = |what: &str| {
            Err(Error::InvalidArgument(format!(
                "hypercube invariant violated: {what}"
            )))
        };
        for c in 0..v {
            if (0..f).filter(|&r| self.slack_int[r][c] == 0).count() != n {
                return fail("vertex not on exactly n facets");
            }
        }
        if (0..f).any(|i| {
            self.opposite_facet(i) == i || self.opposite_facet(self.opposite_facet(i)) != i
        }) || (0..v).any(|i| {
            self.opposite_vertex(i) == i || self.opposite_vertex(self.opposite_vertex(i)) != i
        }) {
            return fail("negation map is not a fixed-point-free involution");
        }
        let wh = self.w_hat();
        for row in &wh {
            if (0..v).any(|c| row[self.opposite_vertex(c)] != -row[c]) {
                return fail("W_hat N_V != -W_hat");
            }
        }
        let scale = 1i64 << n;
        for i in 0..f {
            for j in 0..f {
                let dot: i64 = wh[i].iter().zip(&wh[j]).map(|(a, b)| a * b).sum();
                let expect = if i == j {
                    scale
                } else if j == self.opposite_facet(i) {
                    -scale
                } else {
                    0
                };
                if dot != expect {
                    return fail("W_hat W_hat^T != 2^n (I - N_F)");
                }
            }
        }
        Ok(())
    }
}
