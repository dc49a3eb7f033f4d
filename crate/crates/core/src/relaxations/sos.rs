//! Level-k programs: `[[P, -W], [-W^T, Q]]` must lie in the cone of matrices
//! `M` for which `(sum x_i^2)^k * sum_ij M_ij x_i^2 x_j^2` is a sum of squares.
//!
//! The SOS condition is encoded with one PSD Gram matrix over all monomials of
//! degree `k + 2`, matching every coefficient of the degree `2k + 4` form.
//! Coefficients are assembled from exact integer multinomials.

use std::collections::HashMap;
use std::f64::consts::SQRT_2;

use super::level0::{check_weights, diagonal_weight_block};
use super::{CompiledRelaxation, RelaxationKind};
use crate::error::{Error, Result};
use crate::matrix::{NonnegMatrix, SymWeight};
use crate::solver::{
    svec_index, BlockShape, Cone, ConeProduct, ConicProblem, ConstraintMatrix, NamedBlock,
};

/// Default cap on the Gram matrix side.
pub const DEFAULT_GRAM_CAP: usize = 400;

pub type Monomial = Vec<u8>;

/// All exponent vectors of total degree `degree` in `vars` variables, in
/// graded lexicographic order (`x_1^d` first).
pub fn monomials(vars: usize, degree: usize) -> Vec<Monomial> {
    fn rec(vars: usize, degree: usize, prefix: &mut Monomial, out: &mut Vec<Monomial>) {
        if prefix.len() + 1 == vars {
            prefix.push(degree as u8);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=degree).rev() {
            prefix.push(e as u8);
            rec(vars, degree - e, prefix, out);
            prefix.pop();
        }
    }
    assert!(vars > 0 && degree < 256);
    let mut out = Vec::new();
    rec(vars, degree, &mut Vec::with_capacity(vars), &mut out);
    out
}

/// `C(n, k)` in exact arithmetic; saturates on overflow.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Gram side for level `k` with `vars` variables: `C(vars + k + 1, k + 2)`.
pub fn gram_side(vars: usize, k: usize) -> u128 {
    binomial(vars + k + 1, k + 2)
}

/// `k! / prod(kappa_i!)` for `|kappa| = k`.
fn multinomial(kappa: &[i32]) -> u128 {
    let mut acc: u128 = 1;
    let mut total = 0usize;
    for &e in kappa {
        for j in 1..=e as usize {
            total += 1;
            acc = acc * total as u128 / j as u128;
        }
    }
    acc
}

fn halves(alpha: &[u8]) -> Option<Vec<i32>> {
    alpha
        .iter()
        .map(|&e| (e % 2 == 0).then_some((e / 2) as i32))
        .collect()
}

/// Coefficient of `x^(2 theta)` in `(sum x_l^2)^k x_i^2 x_j^2`.
fn pair_weight(theta: &[i32], i: usize, j: usize) -> u128 {
    let mut kappa = theta.to_vec();
    kappa[i] -= 1;
    kappa[j] -= 1;
    if kappa.iter().any(|&e| e < 0) {
        0
    } else {
        multinomial(&kappa)
    }
}

pub fn build_levelk(
    a: &NonnegMatrix,
    k: usize,
    weights: Option<&(SymWeight, SymWeight)>,
    gram_cap: usize,
) -> Result<CompiledRelaxation> {
    if k == 0 {
        return Err(Error::InvalidArgument(
            "the SOS builder needs level k >= 1".into(),
        ));
    }
    check_weights(a, weights)?;
    let (m, n) = a.shape();
    let vars = m + n;
    let side = gram_side(vars, k);
    if side > gram_cap as u128 {
        return Err(Error::GramCapExceeded {
            side: usize::try_from(side).unwrap_or(usize::MAX),
            cap: gram_cap,
        });
    }
    let side = side as usize;
    let basis = monomials(vars, k + 2);
    debug_assert_eq!(basis.len(), side);
    let targets = monomials(vars, 2 * k + 4);
    let index: HashMap<&[u8], usize> = targets
        .iter()
        .enumerate()
        .map(|(r, t)| (t.as_slice(), r))
        .collect();

    let mut cone = ConeProduct::new();
    let w0 = cone.push(Cone::Free(m * n));
    let g0 = cone.push(Cone::Psd(side));
    let mut c = vec![0.0; cone.len()];
    for i in 0..m {
        for j in 0..n {
            c[w0 + i * n + j] = -a[(i, j)];
        }
    }

    // Gram entries contributing to each target monomial.
    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); targets.len()];
    let mut sum = vec![0u8; vars];
    for p in 0..side {
        for q in p..side {
            for (s, (x, y)) in sum.iter_mut().zip(basis[p].iter().zip(&basis[q])) {
                *s = x + y;
            }
            let r = index[sum.as_slice()];
            let coef = if p == q { 1.0 } else { SQRT_2 };
            rows[r].push((g0 + svec_index(side, p, q), coef));
        }
    }

    let constant = diagonal_weight_block(m, n, weights);
    let mut op = ConstraintMatrix::new(cone.len());
    let mut b = Vec::with_capacity(targets.len());
    for (alpha, mut row) in targets.iter().zip(rows) {
        let mut rhs = 0.0;
        if let Some(theta) = halves(alpha) {
            for i in 0..vars {
                for j in 0..vars {
                    let same_side = (i < m) == (j < m);
                    if same_side && constant[(i, j)] != 0.0 {
                        let wgt = pair_weight(&theta, i, j);
                        if wgt != 0 {
                            rhs += constant[(i, j)] * wgt as f64;
                        }
                    }
                }
            }
            // M_{i, m+j} = M_{m+j, i} = -W_ij, moved to the left-hand side.
            for i in 0..m {
                for j in 0..n {
                    let wgt = pair_weight(&theta, i, m + j);
                    if wgt != 0 {
                        row.push((w0 + i * n + j, 2.0 * wgt as f64));
                    }
                }
            }
        }
        op.push_row(row);
        b.push(rhs);
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
                name: "G".into(),
                start: g0,
                shape: BlockShape::Sym { side },
            },
        ],
        constraints: vec![NamedBlock {
            name: "coefficients".into(),
            start: 0,
            shape: BlockShape::Dense {
                rows: targets.len(),
                cols: 1,
            },
        }],
    };
    Ok(CompiledRelaxation {
        problem,
        kind: RelaxationKind::Sos {
            m,
            n,
            level: k,
            basis,
        },
        weights: weights.cloned(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_counts_and_order() {
        let mons = monomials(4, 3);
        assert_eq!(mons.len(), 20);
        assert_eq!(gram_side(4, 1), 20);
        assert_eq!(mons[0], vec![3, 0, 0, 0]);
        assert_eq!(mons[1], vec![2, 1, 0, 0]);
        assert_eq!(mons.last().unwrap(), &vec![0, 0, 0, 3]);
        assert_eq!(monomials(6, 3).len() as u128, gram_side(6, 1));
        assert_eq!(gram_side(6, 1), 56);
        for w in mons.windows(2) {
            assert!(w[0] > w[1], "lexicographically descending");
        }
    }

    #[test]
    fn multinomials() {
        assert_eq!(multinomial(&[2, 1]), 3);
        assert_eq!(multinomial(&[1, 1, 1]), 6);
        assert_eq!(multinomial(&[0, 0]), 1);
        assert_eq!(binomial(10, 3), 120);
    }

    #[test]
    fn cap_is_enforced() {
        let a = NonnegMatrix::from_rows(&[[1.0; 4]; 4]).unwrap();
        assert!(matches!(
            build_levelk(&a, 3, None, DEFAULT_GRAM_CAP),
            Err(Error::GramCapExceeded { .. })
        ));
    }

    /// Expanding the target polynomial by brute force over ordered index
    /// tuples must agree with the multinomial assembly.
    #[test]
    fn coefficients_match_brute_force_expansion() {
        let a = NonnegMatrix::from_rows(&[[1.0, 2.0]]).unwrap();
        let k = 1;
        let compiled = build_levelk(&a, k, None, DEFAULT_GRAM_CAP).unwrap();
        let p = &compiled.problem;
        let vars = 3;
        let targets = monomials(vars, 2 * k + 4);
        // Constant part: M = [[1, -w1, -w2], [-w1, 1, 0], [-w2, 0, 1]] with W = 0.
        let mut brute: HashMap<Vec<u8>, f64> = HashMap::new();
        let mconst = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        for l in 0..vars {
            for i in 0..vars {
                for j in 0..vars {
                    let mut e = vec![0u8; vars];
                    e[l] += 2;
                    e[i] += 2;
                    e[j] += 2;
                    *brute.entry(e).or_default() += mconst[i][j];
                }
            }
        }
        for (r, t) in targets.iter().enumerate() {
            assert_eq!(
                p.b[r],
                brute.get(t).copied().unwrap_or(0.0),
                "monomial {t:?}"
            );
        }
    }
}
