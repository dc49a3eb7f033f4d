//! Compiles the semidefinite relaxations of the nonnegative nuclear norm into
//! [`ConicProblem`]s and reads values, certificates and witnesses back out.

mod level0;
mod reduced;
pub mod sdpa;
pub mod sos;

use std::str::FromStr;

pub use level0::{build_level0, build_nuclear_norm_sdp};
pub use reduced::{build_symmetric_reduced, REDUCTION_SYMMETRY_TOL};
pub use sdpa::{export_sdpa, SdpaProblem};
pub use sos::{build_levelk, gram_side, monomials, DEFAULT_GRAM_CAP};

use crate::bounds::Certificate;
use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, NonnegMatrix, SymWeight};
use crate::solver::{
    extract_dual_block, solve, ConicProblem, ConicSolution, SolveStatus, SolverSettings,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SymmetricReduction {
    /// Reduce when `A` is symmetric and the weights allow it.
    #[default]
    Auto,
    On,
    Off,
}

impl FromStr for SymmetricReduction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Self::Auto),
            "on" => Ok(Self::On),
            "off" => Ok(Self::Off),
            other => Err(Error::InvalidArgument(format!(
                "symmetric reduction must be auto, on or off, got {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelaxationSpec {
    pub level: usize,
    pub weights: Option<(SymWeight, SymWeight)>,
    pub symmetric_reduction: SymmetricReduction,
    pub gram_cap: usize,
}

impl Default for RelaxationSpec {
    fn default() -> Self {
        Self {
            level: 0,
            weights: None,
            symmetric_reduction: SymmetricReduction::Auto,
            gram_cap: DEFAULT_GRAM_CAP,
        }
    }
}

impl RelaxationSpec {
    pub fn level(k: usize) -> Self {
        Self {
            level: k,
            ..Self::default()
        }
    }

    pub fn with_weights(mut self, p: SymWeight, q: SymWeight) -> Self {
        self.weights = Some((p, q));
        self
    }

    pub fn with_reduction(mut self, mode: SymmetricReduction) -> Self {
        self.symmetric_reduction = mode;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RelaxationKind {
    Level0 {
        m: usize,
        n: usize,
    },
    SymmetricReduced {
        n: usize,
    },
    Sos {
        m: usize,
        n: usize,
        level: usize,
        basis: Vec<Vec<u8>>,
    },
}

/// A compiled program together with what is needed to interpret its solution.
#[derive(Debug, Clone)]
pub struct CompiledRelaxation {
    pub problem: ConicProblem,
    pub kind: RelaxationKind,
    pub weights: Option<(SymWeight, SymWeight)>,
}

impl CompiledRelaxation {
    pub fn level(&self) -> usize {
        match self.kind {
            RelaxationKind::Sos { level, .. } => level,
            _ => 0,
        }
    }
}

/// Doubly-nonnegative witness `[[X, A], [A^T, Y]]` from the level-0 dual.
#[derive(Debug, Clone)]
pub struct CpWitness {
    pub x: DenseMatrix,
    pub y: DenseMatrix,
}

impl CpWitness {
    /// `(tr(P X) + tr(Q Y)) / 2` (plain traces when unweighted).
    pub fn objective(&self, weights: Option<&(SymWeight, SymWeight)>) -> f64 {
        match weights {
            Some((p, q)) => 0.5 * (self.x.inner(p).unwrap() + self.y.inner(q).unwrap()),
            None => 0.5 * (self.x.trace() + self.y.trace()),
        }
    }

    pub fn assemble(&self, a: &DenseMatrix) -> DenseMatrix {
        DenseMatrix::block2x2(&self.x, a, &a.transpose(), &self.y).expect("witness shapes")
    }
}

fn reduction_weight(spec: &RelaxationSpec) -> Option<Option<SymWeight>> {
    match &spec.weights {
        None => Some(None),
        Some((p, q)) if p == q => Some(Some(p.clone())),
        Some(_) => None,
    }
}

/// Chooses and compiles the program described by `spec`.
pub fn build(a: &NonnegMatrix, spec: &RelaxationSpec) -> Result<CompiledRelaxation> {
    if spec.level > 0 {
        if spec.symmetric_reduction == SymmetricReduction::On {
            return Err(Error::InvalidArgument(
                "the symmetric reduction is only available at level 0".into(),
            ));
        }
        return build_levelk(a, spec.level, spec.weights.as_ref(), spec.gram_cap);
    }
    let symmetric = a.is_square() && a.is_symmetric(REDUCTION_SYMMETRY_TOL);
    match spec.symmetric_reduction {
        SymmetricReduction::Off => build_level0(a, spec.weights.as_ref()),
        SymmetricReduction::On => {
            let w = reduction_weight(spec).ok_or_else(|| {
                Error::InvalidArgument("the symmetric reduction needs P = Q".into())
            })?;
            build_symmetric_reduced(a, w.as_ref())
        }
        SymmetricReduction::Auto => match reduction_weight(spec) {
            Some(w) if symmetric => build_symmetric_reduced(a, w.as_ref()),
            _ => build_level0(a, spec.weights.as_ref()),
        },
    }
}

/// Reads `W` with its nonnegative/PSD split out of a level-0 solution.
///
/// The nonnegative part is clipped at zero and the PSD part re-symmetrized;
/// neither is otherwise repaired, so [`crate::bounds::verify_certificate`]
/// reports the solver's actual residuals. SOS levels carry no such split and
/// yield `None`.
pub fn recover_certificate(
    compiled: &CompiledRelaxation,
    sol: &ConicSolution,
) -> Option<Certificate> {
    let p = &compiled.problem;
    let block = |name: &str| sol.primal_block(p.variable(name).expect("named block"));
    let (w, nonneg, psd) = match compiled.kind {
        RelaxationKind::Level0 { .. } => (block("W"), block("N"), block("S")),
        RelaxationKind::SymmetricReduced { n } => {
            let w = block("W");
            let r = block("R");
            let nn = block("N");
            let z = DenseMatrix::zeros(n, n);
            let neg_w = w.scale(-1.0);
            let nonneg = DenseMatrix::block2x2(&nn, &z, &z, &nn).unwrap();
            let psd = DenseMatrix::block2x2(&r, &neg_w, &neg_w, &r).unwrap();
            (w, nonneg, psd)
        }
        RelaxationKind::Sos { .. } => return None,
    };
    let nonneg = nonneg.map(|v| v.max(0.0)).symmetrize();
    Certificate::new(w, nonneg, psd.symmetrize(), compiled.weights.clone()).ok()
}

/// `[[X, A], [A^T, Y]]` from the multipliers of a full level-0 program.
pub fn recover_witness(compiled: &CompiledRelaxation, sol: &ConicSolution) -> Option<CpWitness> {
    let RelaxationKind::Level0 { m, n } = compiled.kind else {
        return None;
    };
    let blk = compiled.problem.constraint("block")?;
    let y = extract_dual_block(sol, blk.range(), blk.shape).ok()?;
    let z = y.scale(-2.0);
    Some(CpWitness {
        x: z.sub_block(0, 0, m, m),
        y: z.sub_block(m, m, n, n),
    })
}

#[derive(Debug, Clone)]
pub struct RelaxationResult {
    pub level: usize,
    /// `<A, W>` at the returned primal point.
    pub value: f64,
    pub solution: ConicSolution,
    pub certificate: Option<Certificate>,
    pub witness: Option<CpWitness>,
    pub reduced: bool,
}

impl RelaxationResult {
    pub fn converged(&self) -> bool {
        self.solution.status == SolveStatus::Optimal
    }

    pub fn w(&self) -> Option<&DenseMatrix> {
        self.certificate.as_ref().map(|c| &c.w)
    }
}

/// Builds, solves and interprets one relaxation.
pub fn solve_relaxation(
    a: &NonnegMatrix,
    spec: &RelaxationSpec,
    settings: &SolverSettings,
) -> Result<RelaxationResult> {
    let compiled = build(a, spec)?;
    let solution = solve(&compiled.problem, settings)?;
    let value = -solution.primal_objective;
    Ok(RelaxationResult {
        level: compiled.level(),
        value,
        certificate: recover_certificate(&compiled, &solution),
        witness: recover_witness(&compiled, &solution),
        reduced: matches!(compiled.kind, RelaxationKind::SymmetricReduced { .. }),
        solution,
    })
}
