//! Level-0 program for symmetric `A` with two half-size PSD blocks:
//!
//! ```text
//!   maximize <A, W>  s.t.  R - W PSD,  R + W PSD,  P - R >= 0
//! ```
//!
//! A feasible `(R, W)` gives the split
//! `[[P, -W], [-W, P]] = blockdiag(P - R, P - R) + [[R, -W], [-W, R]]`.

use super::{CompiledRelaxation, RelaxationKind};
use crate::error::{Error, Result};
use crate::matrix::{NonnegMatrix, SymWeight};
use crate::solver::{
    entry_coefficient, svec, svec_index, svec_len, BlockShape, Cone, ConeProduct, ConicProblem,
    ConstraintMatrix, NamedBlock,
};

/// Symmetry tolerance (relative Frobenius) for the reduced formulation.
pub const REDUCTION_SYMMETRY_TOL: f64 = 1e-10;

/// `weight` is the common `P = Q`, identity when `None`.
pub fn build_symmetric_reduced(
    a: &NonnegMatrix,
    weight: Option<&SymWeight>,
) -> Result<CompiledRelaxation> {
    if !a.is_square() || !a.is_symmetric(REDUCTION_SYMMETRY_TOL) {
        return Err(Error::InvalidArgument(
            "the symmetric reduction needs a square symmetric matrix".into(),
        ));
    }
    let n = a.rows();
    if let Some(p) = weight {
        if p.dim() != n {
            return Err(Error::DimensionMismatch(format!(
                "weight is {0}x{0}, matrix is {n}x{n}",
                p.dim()
            )));
        }
    }
    let len = svec_len(n);
    let mut cone = ConeProduct::new();
    let w0 = cone.push(Cone::Free(len));
    let r0 = cone.push(Cone::Free(len));
    let s1 = cone.push(Cone::Psd(n));
    let s2 = cone.push(Cone::Psd(n));
    let n0 = cone.push(Cone::Nonneg(len));

    let mut c = vec![0.0; cone.len()];
    for (k, v) in svec(&a.symmetrize()).into_iter().enumerate() {
        c[w0 + k] = -v;
    }

    let mut op = ConstraintMatrix::new(cone.len());
    let mut b = Vec::with_capacity(3 * len);
    // S1 = R - W
    for i in 0..n {
        for j in i..n {
            let (k, e) = (svec_index(n, i, j), entry_coefficient(i, j));
            op.push_row([(s1 + k, e), (r0 + k, -e), (w0 + k, e)]);
            b.push(0.0);
        }
    }
    // S2 = R + W
    for i in 0..n {
        for j in i..n {
            let (k, e) = (svec_index(n, i, j), entry_coefficient(i, j));
            op.push_row([(s2 + k, e), (r0 + k, -e), (w0 + k, -e)]);
            b.push(0.0);
        }
    }
    // N + R = P
    for i in 0..n {
        for j in i..n {
            let (k, e) = (svec_index(n, i, j), entry_coefficient(i, j));
            op.push_row([(n0 + k, e), (r0 + k, e)]);
            b.push(match weight {
                Some(p) => p[(i, j)],
                None if i == j => 1.0,
                None => 0.0,
            });
        }
    }

    let sym = BlockShape::Sym { side: n };
    let problem = ConicProblem {
        c,
        a: op,
        b,
        cone,
        variables: vec![
            NamedBlock {
                name: "W".into(),
                start: w0,
                shape: sym,
            },
            NamedBlock {
                name: "R".into(),
                start: r0,
                shape: sym,
            },
            NamedBlock {
                name: "S1".into(),
                start: s1,
                shape: sym,
            },
            NamedBlock {
                name: "S2".into(),
                start: s2,
                shape: sym,
            },
            NamedBlock {
                name: "N".into(),
                start: n0,
                shape: sym,
            },
        ],
        constraints: vec![
            NamedBlock {
                name: "minus".into(),
                start: 0,
                shape: sym,
            },
            NamedBlock {
                name: "plus".into(),
                start: len,
                shape: sym,
            },
            NamedBlock {
                name: "nonneg".into(),
                start: 2 * len,
                shape: sym,
            },
        ],
    };
    Ok(CompiledRelaxation {
        problem,
        kind: RelaxationKind::SymmetricReduced { n },
        weights: weight.map(|p| (p.clone(), p.clone())),
    })
}
