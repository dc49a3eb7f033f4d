//! Cone products and the scaled symmetric vectorization used for PSD blocks.

use std::f64::consts::SQRT_2;

use nalgebra::DMatrix;

use crate::matrix::DenseMatrix;
use crate::spectral::project_psd_in_place;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cone {
    /// `{0}^d`.
    Zero(usize),
    /// `R^d`.
    Free(usize),
    /// `R_+^d`.
    Nonneg(usize),
    /// Symmetric PSD matrices of the given side, in scaled vectorization.
    Psd(usize),
}

impl Cone {
    pub fn len(&self) -> usize {
        match *self {
            Cone::Zero(d) | Cone::Free(d) | Cone::Nonneg(d) => d,
            Cone::Psd(s) => svec_len(s),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Ordered product of cones; vector coordinates are laid out block after block.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConeProduct {
    blocks: Vec<Cone>,
    offsets: Vec<usize>,
    len: usize,
}

impl ConeProduct {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a block and returns its starting offset. Panics on empty blocks.
    pub fn push(&mut self, cone: Cone) -> usize {
        assert!(!cone.is_empty(), "cone blocks must have positive dimension");
        let start = self.len;
        self.blocks.push(cone);
        self.offsets.push(start);
        self.len += cone.len();
        start
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn blocks(&self) -> impl Iterator<Item = (usize, Cone)> + '_ {
        self.offsets
            .iter()
            .copied()
            .zip(self.blocks.iter().copied())
    }

    /// Projects `x` onto the cone in place.
    pub fn project(&self, x: &mut [f64], scratch: &mut Scratch) {
        for (start, cone) in self.blocks() {
            let seg = &mut x[start..start + cone.len()];
            match cone {
                Cone::Zero(_) => seg.fill(0.0),
                Cone::Free(_) => {}
                Cone::Nonneg(_) => seg.iter_mut().for_each(|v| *v = v.max(0.0)),
                Cone::Psd(side) => {
                    let m = scratch.matrix(side);
                    smat_into(seg, m);
                    project_psd_in_place(m);
                    svec_from(m, seg);
                }
            }
        }
    }

    /// True when `x` lies in the dual cone up to `tol` (all cones here are self-dual
    /// except zero and free, which are dual to each other).
    pub fn dual_contains(&self, x: &[f64], tol: f64) -> bool {
        self.blocks().all(|(start, cone)| {
            let seg = &x[start..start + cone.len()];
            match cone {
                Cone::Zero(_) => true,
                Cone::Free(_) => seg.iter().all(|v| v.abs() <= tol),
                Cone::Nonneg(_) => seg.iter().all(|&v| v >= -tol),
                Cone::Psd(side) => {
                    let m = smat(seg, side);
                    crate::spectral::min_eigenvalue(&m).is_ok_and(|l| l >= -tol)
                }
            }
        })
    }
}

/// Reusable dense buffers for PSD projections, one per distinct side.
#[derive(Default)]
pub struct Scratch {
    mats: Vec<DMatrix<f64>>,
}

impl Scratch {
    fn matrix(&mut self, side: usize) -> &mut DMatrix<f64> {
        if let Some(k) = self.mats.iter().position(|m| m.nrows() == side) {
            &mut self.mats[k]
        } else {
            self.mats.push(DMatrix::zeros(side, side));
            self.mats.last_mut().unwrap()
        }
    }
}

pub fn svec_len(side: usize) -> usize {
    side * (side + 1) / 2
}

/// Position of entry `(i, j)` (either order) in the upper-triangular row-major
/// scaled vectorization of a `side x side` symmetric matrix.
pub fn svec_index(side: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    debug_assert!(j < side);
    i * side - i * i.saturating_sub(1) / 2 + (j - i)
}

/// Scaled vectorization: diagonal entries as-is, off-diagonals times sqrt(2),
/// so that `svec(X) . svec(Y) = <X, Y>`.
pub fn svec(m: &DenseMatrix) -> Vec<f64> {
    let s = m.rows();
    let mut out = Vec::with_capacity(svec_len(s));
    for i in 0..s {
        out.push(m[(i, i)]);
        for j in (i + 1)..s {
            out.push(SQRT_2 * 0.5 * (m[(i, j)] + m[(j, i)]));
        }
    }
    out
}

pub fn smat(v: &[f64], side: usize) -> DenseMatrix {
    let mut m = DMatrix::zeros(side, side);
    smat_into(v, &mut m);
    DenseMatrix::from_nalgebra(&m)
}

fn smat_into(v: &[f64], m: &mut DMatrix<f64>) {
    let s = m.nrows();
    let mut k = 0;
    for i in 0..s {
        m[(i, i)] = v[k];
        k += 1;
        for j in (i + 1)..s {
            let x = v[k] / SQRT_2;
            m[(i, j)] = x;
            m[(j, i)] = x;
            k += 1;
        }
    }
}

fn svec_from(m: &DMatrix<f64>, v: &mut [f64]) {
    let s = m.nrows();
    let mut k = 0;
    for i in 0..s {
        v[k] = m[(i, i)];
        k += 1;
        for j in (i + 1)..s {
            v[k] = SQRT_2 * m[(i, j)];
            k += 1;
        }
    }
}
