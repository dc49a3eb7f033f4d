//! Over-relaxed ADMM between the affine set `{z : M z = b}` and the cone `K`.
//!
//! Each iteration projects onto the affine set (a fixed, pre-factored linear
//! solve with `M M^T`), then onto the cone. The scaled dual iterate `u`
//! provides the cone multiplier `s = -rho u`, and the affine projection's
//! Lagrange multiplier provides `y`.

use std::io::Write;

use nalgebra::{DMatrix, DVector};

use super::cone::Scratch;
use super::{
    ConicProblem, ConicSolution, ConstraintMatrix, Residuals, SolveStatus, SolverSettings,
};
use crate::error::{Error, Result};

const DIVERGENCE_LIMIT: f64 = 1e12;

enum Factor {
    /// Single constraint: inverse of its squared norm (0 for an empty row).
    Scalar(f64),
    Cholesky(nalgebra::Cholesky<f64, nalgebra::Dyn>),
    /// Symmetric pseudo-inverse for rank-deficient blocks.
    Pinv(DMatrix<f64>),
}

struct Component {
    rows: Vec<usize>,
    factor: Factor,
}

/// Projection onto `{x : M x = b}`, factored per connected block of `M M^T`.
struct AffineProjector {
    components: Vec<Component>,
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

impl AffineProjector {
    fn new(m: &ConstraintMatrix) -> Self {
        let nrows = m.nrows();
        let mut parent: Vec<usize> = (0..nrows).collect();
        let mut owner: Vec<Option<usize>> = vec![None; m.ncols()];
        for r in 0..nrows {
            for (c, _) in m.row(r) {
                match owner[c] {
                    None => owner[c] = Some(r),
                    Some(o) => {
                        let (a, b) = (find(&mut parent, o), find(&mut parent, r));
                        if a != b {
                            parent[a.max(b)] = a.min(b);
                        }
                    }
                }
            }
        }
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut slot = vec![usize::MAX; nrows];
        for r in 0..nrows {
            let root = find(&mut parent, r);
            if slot[root] == usize::MAX {
                slot[root] = groups.len();
                groups.push(Vec::new());
            }
            groups[slot[root]].push(r);
        }
        let components = groups
            .into_iter()
            .map(|rows| Self::factor(m, rows))
            .collect();
        Self { components }
    }

    fn factor(m: &ConstraintMatrix, rows: Vec<usize>) -> Component {
        if rows.len() == 1 {
            let nrm2: f64 = m.row(rows[0]).map(|(_, v)| v * v).sum();
            let inv = if nrm2 > 0.0 { 1.0 / nrm2 } else { 0.0 };
            return Component {
                rows,
                factor: Factor::Scalar(inv),
            };
        }
        let k = rows.len();
        let mut by_col: std::collections::BTreeMap<usize, Vec<(usize, f64)>> = Default::default();
        for (local, &r) in rows.iter().enumerate() {
            for (c, v) in m.row(r) {
                by_col.entry(c).or_default().push((local, v));
            }
        }
        let mut gram = DMatrix::<f64>::zeros(k, k);
        for entries in by_col.values() {
            for &(a, va) in entries {
                for &(b, vb) in entries {
                    gram[(a, b)] += va * vb;
                }
            }
        }
        let scale = gram.diagonal().max();
        let factor = match nalgebra::Cholesky::new(gram.clone()) {
            Some(ch)
                if ch
                    .l_dirty()
                    .diagonal()
                    .iter()
                    .all(|d| *d > 1e-7 * scale.sqrt()) =>
            {
                Factor::Cholesky(ch)
            }
            _ => {
                let eig = nalgebra::SymmetricEigen::new(gram);
                let cutoff = 1e-12 * eig.eigenvalues.amax();
                let mut pinv = DMatrix::zeros(k, k);
                for (j, &l) in eig.eigenvalues.iter().enumerate() {
                    if l > cutoff {
                        let col = eig.eigenvectors.column(j);
                        pinv.ger(1.0 / l, &col, &col, 1.0);
                    }
                }
                Factor::Pinv(pinv)
            }
        };
        Component { rows, factor }
    }

    /// Writes the projection of `w` into `x` and the multiplier into `lambda`.
    fn project(
        &self,
        m: &ConstraintMatrix,
        b: &[f64],
        w: &[f64],
        x: &mut [f64],
        lambda: &mut [f64],
    ) {
        let residual: Vec<f64> = m
            .mul(w)
            .into_iter()
            .zip(b)
            .map(|(mw, bi)| mw - bi)
            .collect();
        for comp in &self.components {
            match &comp.factor {
                Factor::Scalar(inv) => lambda[comp.rows[0]] = inv * residual[comp.rows[0]],
                Factor::Cholesky(ch) => {
                    let rhs = DVector::from_iterator(
                        comp.rows.len(),
                        comp.rows.iter().map(|&r| residual[r]),
                    );
                    let sol = ch.solve(&rhs);
                    for (&r, v) in comp.rows.iter().zip(sol.iter()) {
                        lambda[r] = *v;
                    }
                }
                Factor::Pinv(p) => {
                    let rhs = DVector::from_iterator(
                        comp.rows.len(),
                        comp.rows.iter().map(|&r| residual[r]),
                    );
                    let sol = p * rhs;
                    for (&r, v) in comp.rows.iter().zip(sol.iter()) {
                        lambda[r] = *v;
                    }
                }
            }
        }
        x.copy_from_slice(w);
        m.tmul_add(lambda, -1.0, x);
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

struct Snapshot {
    z: Vec<f64>,
    y: Vec<f64>,
    s: Vec<f64>,
    primal_objective: f64,
    dual_objective: f64,
    residuals: Residuals,
    iterations: usize,
}

fn evaluate(
    p: &ConicProblem,
    z: Vec<f64>,
    y: Vec<f64>,
    s: Vec<f64>,
    iterations: usize,
) -> Snapshot {
    let mz = p.a.mul(&z);
    let pres: Vec<f64> = mz.iter().zip(&p.b).map(|(a, b)| a - b).collect();
    let mut dres = p.c.clone();
    p.a.tmul_add(&y, -1.0, &mut dres);
    dres.iter_mut().zip(&s).for_each(|(d, si)| *d -= si);
    let pobj = dot(&p.c, &z);
    let dobj = dot(&p.b, &y);
    Snapshot {
        residuals: Residuals {
            primal: norm(&pres) / (1.0 + norm(&p.b)),
            dual: norm(&dres) / (1.0 + norm(&p.c)),
            gap: (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs()),
        },
        z,
        y,
        s,
        primal_objective: pobj,
        dual_objective: dobj,
        iterations,
    }
}

/// Solves `p` with the given settings.
pub fn solve(p: &ConicProblem, settings: &SolverSettings) -> Result<ConicSolution> {
    solve_with_log(p, settings, None)
}

/// Like [`solve`], also writing one CSV line per residual check to `log`.
pub fn solve_with_log(
    p: &ConicProblem,
    settings: &SolverSettings,
    mut log: Option<&mut dyn Write>,
) -> Result<ConicSolution> {
    p.validate()?;
    if !(settings.tol > 0.0) || settings.max_iter == 0 {
        return Err(Error::InvalidArgument(
            "tol must be positive and max_iter at least 1".into(),
        ));
    }
    if !(settings.alpha > 0.0 && settings.alpha < 2.0) || !(settings.rho > 0.0) {
        return Err(Error::InvalidArgument(
            "alpha must lie in (0, 2) and rho be positive".into(),
        ));
    }
    let n = p.cone.len();
    let mrows = p.a.nrows();

    // Solve the problem with b and c normalized; z scales with b, (y, s) with c.
    let bs = match inf_norm(&p.b) {
        v if v > 0.0 => v,
        _ => 1.0,
    };
    let cs = match inf_norm(&p.c) {
        v if v > 0.0 => v,
        _ => 1.0,
    };
    let b: Vec<f64> = p.b.iter().map(|v| v / bs).collect();
    let c: Vec<f64> = p.c.iter().map(|v| v / cs).collect();

    let projector = AffineProjector::new(&p.a);
    let mut scratch = Scratch::default();
    let check = settings.check_interval.max(1);
    let adapt = settings.adapt_interval.max(check) / check * check;

    let mut rho = settings.rho;
    let mut z = vec![0.0; n];
    let mut u = vec![0.0; n];
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut lambda = vec![0.0; mrows];
    let alpha = settings.alpha;

    if let Some(l) = log.as_deref_mut() {
        writeln!(
            l,
            "iteration,primal_residual,dual_residual,gap,primal_objective,dual_objective,rho"
        )
        .map_err(|e| Error::io("<solver log>", e))?;
    }

    let mut best: Option<Snapshot> = None;
    let mut status = SolveStatus::MaxIter;

    for it in 1..=settings.max_iter {
        for k in 0..n {
            w[k] = z[k] - u[k] - c[k] / rho;
        }
        projector.project(&p.a, &b, &w, &mut x, &mut lambda);
        for k in 0..n {
            v[k] = alpha * x[k] + (1.0 - alpha) * z[k] + u[k];
        }
        z.copy_from_slice(&v);
        p.cone.project(&mut z, &mut scratch);
        for k in 0..n {
            u[k] = v[k] - z[k];
        }

        if it % check != 0 && it != settings.max_iter {
            continue;
        }

        let snap = evaluate(
            p,
            z.iter().map(|t| t * bs).collect(),
            lambda.iter().map(|l| -rho * l * cs).collect(),
            u.iter().map(|t| -rho * t * cs).collect(),
            it,
        );
        let r = snap.residuals;
        if let Some(l) = log.as_deref_mut() {
            writeln!(
                l,
                "{it},{:e},{:e},{:e},{:e},{:e},{:e}",
                r.primal, r.dual, r.gap, snap.primal_objective, snap.dual_objective, rho
            )
            .map_err(|e| Error::io("<solver log>", e))?;
        }

        if inf_norm(&snap.z) > DIVERGENCE_LIMIT * (1.0 + inf_norm(&p.b))
            || inf_norm(&snap.y) > DIVERGENCE_LIMIT * (1.0 + inf_norm(&p.c))
            || !r.max().is_finite()
        {
            status = SolveStatus::InfeasibleSuspected;
            best = Some(snap);
            break;
        }

        let done = r.max() <= settings.tol;
        if done
            || best
                .as_ref()
                .is_none_or(|bst| r.max() < bst.residuals.max())
        {
            best = Some(snap);
        }
        if done {
            status = SolveStatus::Optimal;
            break;
        }

        if it % adapt == 0 {
            let (pr, dr) = (r.primal.max(1e-300), r.dual.max(1e-300));
            let f = if pr > settings.adapt_ratio * dr {
                (pr / dr).sqrt().min(10.0)
            } else if dr > settings.adapt_ratio * pr {
                1.0 / (dr / pr).sqrt().min(10.0)
            } else {
                1.0
            };
            if f != 1.0 {
                rho *= f;
                u.iter_mut().for_each(|t| *t /= f);
            }
        }
    }

    let snap = best.expect("at least one residual check runs");
    Ok(ConicSolution {
        status,
        z: snap.z,
        y: snap.y,
        s: snap.s,
        primal_objective: snap.primal_objective,
        dual_objective: snap.dual_objective,
        residuals: snap.residuals,
        iterations: snap.iterations,
    })
}
