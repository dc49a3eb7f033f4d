//! Level-0 programs: the nonnegative-plus-PSD relaxation of the copositive
//! cone, and the plain nuclear-norm SDP pair used as a solver sanity check.

use super::{CompiledRelaxation, RelaxationKind};
use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, NonnegMatrix, SymWeight};
use crate::solver::{
    entry_coefficient, svec_index, svec_len, BlockShape, Cone, ConeProduct, ConicProblem,
    ConstraintMatrix, NamedBlock,
};

pub(crate) fn check_weights(
    a: &DenseMatrix,
    weights: Option<&(SymWeight, SymWeight)>,
) -> Result<()> {
    if let Some((p, q)) = weights {
        if p.dim() != a.rows() || q.dim() != a.cols() {
            return Err(Error::DimensionMismatch(format!(
                "weights are {}x{} and {}x{}, matrix is {}x{}",
                p.dim(),
                p.dim(),
                q.dim(),
                q.dim(),
                a.rows(),
                a.cols()
            )));
        }
    }
    Ok(())
}

/// `blockdiag(P, Q)`, identities when unweighted.
pub(crate) fn diagonal_weight_block(
    m: usize,
    n: usize,
    weights: Option<&(SymWeight, SymWeight)>,
) -> DenseMatrix {
    DenseMatrix::from_fn(m + n, m + n, |i, j| match weights {
        Some((p, _)) if i < m && j < m => p[(i, j)],
        Some((_, q)) if i >= m && j >= m => q[(i - m, j - m)],
        Some(_) => 0.0,
        None if i == j => 1.0,
        None => 0.0,
    })
}

/// Compiles
///
/// ```text
///   maximize <A, W>  s.t.  N + S = [[P, -W], [-W^T, Q]],  N >= 0,  S PSD
/// ```
///
/// as a minimization of `-<A, W>`. Variables are `W` (free, row-major),
/// `N` (nonnegative, scaled vectorization) and `S` (PSD). There is one
/// equality per upper-triangular entry of the `(m+n)`-sided block, in plain
/// matrix-entry units; its multipliers `Y` give the doubly-nonnegative
/// witness `[[X, A], [A^T, Y]] = -2 Y`.
pub fn build_level0(
    a: &NonnegMatrix,
    weights: Option<&(SymWeight, SymWeight)>,
) -> Result<CompiledRelaxation> {
    check_weights(a, weights)?;
    let (m, n) = a.shape();
    let side = m + n;
    let mut cone = ConeProduct::new();
    let w0 = cone.push(Cone::Free(m * n));
    let n0 = cone.push(Cone::Nonneg(svec_len(side)));
    let s0 = cone.push(Cone::Psd(side));

    let mut c = vec![0.0; cone.len()];
    for i in 0..m {
        for j in 0..n {
            c[w0 + i * n + j] = -a[(i, j)];
        }
    }

    let rhs_block = diagonal_weight_block(m, n, weights);
    let mut op = ConstraintMatrix::new(cone.len());
    let mut b = Vec::with_capacity(svec_len(side));
    for i in 0..side {
        for j in i..side {
            let k = svec_index(side, i, j);
            let e = entry_coefficient(i, j);
            let mut row = vec![(n0 + k, e), (s0 + k, e)];
            if i < m && j >= m {
                row.push((w0 + i * n + (j - m), 1.0));
            }
            op.push_row(row);
            b.push(rhs_block[(i, j)]);
        }
    }

    let problem = ConicProblem {
        c,
        a: op,
        b,
        cone,
        variables: vec![
            NamedBlock {
                name: "W".into(),
                start: w0,
                shape: BlockShape::Dense { rows: m, cols: n },
            },
            NamedBlock {
                name: "N".into(),
                start: n0,
                shape: BlockShape::Sym { side },
            },
            NamedBlock {
                name: "S".into(),
                start: s0,
                shape: BlockShape::Sym { side },
            },
        ],
        constraints: vec![NamedBlock {
            name: "block".into(),
            start: 0,
            shape: BlockShape::Sym { side },
        }],
    };
    Ok(CompiledRelaxation {
        problem,
        kind: RelaxationKind::Level0 { m, n },
        weights: weights.cloned(),
    })
}

/// The nuclear-norm SDP pair for an arbitrary matrix:
///
/// ```text
///   minimize (tr X + tr Y)/2  s.t.  [[X, A], [A^T, Y]] PSD
/// ```
///
/// whose dual is `max <A, W>` over `[[I, -W], [-W^T, I]]` PSD. The
/// multipliers of the off-diagonal block constraints (named `"offdiag"`)
/// are `W` itself.
pub fn build_nuclear_norm_sdp(a: &DenseMatrix) -> ConicProblem {
    let (m, n) = a.shape();
    let side = m + n;
    let mut cone = ConeProduct::new();
    let z0 = cone.push(Cone::Psd(side));
    let mut c = vec![0.0; cone.len()];
    for i in 0..side {
        c[z0 + svec_index(side, i, i)] = 0.5;
    }
    let mut op = ConstraintMatrix::new(cone.len());
    let mut b = Vec::with_capacity(m * n);
    for i in 0..m {
        for j in 0..n {
            op.push_row([(z0 + svec_index(side, i, m + j), entry_coefficient(i, m + j))]);
            b.push(a[(i, j)]);
        }
    }
    ConicProblem {
        c,
        a: op,
        b,
        cone,
        variables: vec![NamedBlock {
            name: "Z".into(),
            start: z0,
            shape: BlockShape::Sym { side },
        }],
        constraints: vec![NamedBlock {
            name: "offdiag".into(),
            start: 0,
            shape: BlockShape::Dense { rows: m, cols: n },
        }],
    }
}
