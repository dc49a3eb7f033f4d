//! Exact rectangle covering number of the support of a matrix.
//!
//! Every rectangle of a cover can be grown to a maximal all-nonzero
//! rectangle, so it is enough to search covers made of maximal rectangles.
//! Those are the closed pairs `(I, J)` with `J` the common support of the rows
//! in `I` and `I` every row containing `J`; they are enumerated by closing the
//! row supports under intersection. The minimum cover is then found by branch
//! and bound over the uncovered cell with the fewest candidate rectangles.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoverLimits {
    pub max_support: usize,
    pub max_rectangles: usize,
}

impl Default for CoverLimits {
    fn default() -> Self {
        Self {
            max_support: 64,
            max_rectangles: 30,
        }
    }
}

/// `rows x cols`, both 0-based and sorted.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Rectangle {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

impl Rectangle {
    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.rows.binary_search(&i).is_ok() && self.cols.binary_search(&j).is_ok()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RectangleCover {
    pub rectangles: Vec<Rectangle>,
}

impl RectangleCover {
    pub fn count(&self) -> usize {
        self.rectangles.len()
    }

    /// Checks that the rectangles lie in `support(a)` and cover it.
    pub fn is_cover_of(&self, a: &DenseMatrix) -> bool {
        let (m, n) = a.shape();
        let inside = self.rectangles.iter().all(|r| {
            r.rows
                .iter()
                .all(|&i| i < m && r.cols.iter().all(|&j| j < n && a[(i, j)] != 0.0))
        });
        let covered = (0..m).all(|i| {
            (0..n).all(|j| a[(i, j)] == 0.0 || self.rectangles.iter().any(|r| r.contains(i, j)))
        });
        inside && covered
    }
}

struct Support {
    /// Nonzero columns, bit `b` of a mask is column `cols[b]`.
    cols: Vec<usize>,
    row_masks: Vec<u64>,
}

fn support(a: &DenseMatrix, limits: &CoverLimits) -> Result<Support> {
    let (m, n) = a.shape();
    let size = a.as_slice().iter().filter(|&&v| v != 0.0).count();
    if size > limits.max_support.min(64) {
        return Err(Error::CoverTooLarge(format!(
            "support has {size} entries (limit {}); use the spectral or semidefinite bounds instead",
            limits.max_support.min(64)
        )));
    }
    let cols: Vec<usize> = (0..n)
        .filter(|&j| (0..m).any(|i| a[(i, j)] != 0.0))
        .collect();
    let row_masks = (0..m)
        .map(|i| {
            cols.iter()
                .enumerate()
                .filter(|(_, &j)| a[(i, j)] != 0.0)
                .fold(0u64, |acc, (b, _)| acc | 1 << b)
        })
        .collect();
    Ok(Support { cols, row_masks })
}

/// All maximal all-nonzero rectangles of `a`, in a deterministic order.
pub fn maximal_rectangles(a: &DenseMatrix, limits: &CoverLimits) -> Result<Vec<Rectangle>> {
    let sup = support(a, limits)?;
    let mut closed: BTreeSet<u64> = BTreeSet::new();
    for &r in sup.row_masks.iter().filter(|&&r| r != 0) {
        let mut fresh = vec![r];
        for &c in &closed {
            if c & r != 0 {
                fresh.push(c & r);
            }
        }
        closed.extend(fresh);
        if closed.len() > limits.max_rectangles {
            return Err(Error::CoverTooLarge(format!(
                "more than {} maximal rectangles; use the spectral or semidefinite bounds instead",
                limits.max_rectangles
            )));
        }
    }
    let mut out: Vec<Rectangle> = closed
        .into_iter()
        .map(|cmask| Rectangle {
            rows: (0..sup.row_masks.len())
                .filter(|&i| sup.row_masks[i] & cmask == cmask)
                .collect(),
            cols: (0..sup.cols.len())
                .filter(|&b| cmask >> b & 1 == 1)
                .map(|b| sup.cols[b])
                .collect(),
        })
        .collect();
    out.sort();
    Ok(out)
}

/// A minimum cover of `support(a)` by all-nonzero rectangles.
pub fn rectangle_cover_exact(a: &DenseMatrix, limits: &CoverLimits) -> Result<RectangleCover> {
    let rects = maximal_rectangles(a, limits)?;
    let (m, n) = a.shape();
    let cells: Vec<(usize, usize)> = (0..m)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| a[(i, j)] != 0.0)
        .collect();
    let masks: Vec<u64> = rects
        .iter()
        .map(|r| {
            cells
                .iter()
                .enumerate()
                .filter(|(_, &(i, j))| r.contains(i, j))
                .fold(0u64, |acc, (b, _)| acc | 1 << b)
        })
        .collect();
    let full = if cells.len() == 64 {
        u64::MAX
    } else {
        (1u64 << cells.len()) - 1
    };

    let mut best: Vec<usize> = (0..rects.len()).collect();
    let mut current = Vec::new();
    search(&masks, full, 0, &mut current, &mut best);
    best.sort_unstable();
    Ok(RectangleCover {
        rectangles: best.into_iter().map(|k| rects[k].clone()).collect(),
    })
}

fn search(masks: &[u64], full: u64, covered: u64, current: &mut Vec<usize>, best: &mut Vec<usize>) {
    if covered == full {
        if current.len() < best.len() {
            *best = current.clone();
        }
        return;
    }
    if current.len() + 1 >= best.len() {
        return;
    }
    let uncovered = full & !covered;
    let mut pick = None;
    let mut fewest = usize::MAX;
    let mut bits = uncovered;
    while bits != 0 {
        let b = bits.trailing_zeros();
        bits &= bits - 1;
        let count = masks.iter().filter(|&&m| m >> b & 1 == 1).count();
        if count < fewest {
            fewest = count;
            pick = Some(b);
        }
    }
    let b = pick.expect("uncovered cell");
    for (k, &m) in masks.iter().enumerate() {
        if m >> b & 1 == 1 {
            current.push(k);
            search(masks, full, covered | m, current, best);
            current.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_needs_one_per_entry() {
        let c = rectangle_cover_exact(&DenseMatrix::identity(3), &CoverLimits::default()).unwrap();
        assert_eq!(c.count(), 3);
        assert!(c.is_cover_of(&DenseMatrix::identity(3)));
    }

    #[test]
    fn positive_matrix_is_one_rectangle() {
        let a = DenseMatrix::ones(3, 5);
        let c = rectangle_cover_exact(&a, &CoverLimits::default()).unwrap();
        assert_eq!(c.count(), 1);
        assert_eq!(c.rectangles[0].cols, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn boolean_rank_example() {
        let a = DenseMatrix::from_rows(&[
            [0.0, 1.0, 1.0, 1.0],
            [1.0, 1.0, 1.0, 1.0],
            [1.0, 1.0, 0.0, 0.0],
            [1.0, 1.0, 0.0, 0.0],
        ])
        .unwrap();
        let c = rectangle_cover_exact(&a, &CoverLimits::default()).unwrap();
        assert_eq!(c.count(), 2);
        assert!(c.is_cover_of(&a));
        let r1 = Rectangle {
            rows: vec![0, 1],
            cols: vec![1, 2, 3],
        };
        let r2 = Rectangle {
            rows: vec![1, 2, 3],
            cols: vec![0, 1],
        };
        assert!(c.rectangles.contains(&r1) && c.rectangles.contains(&r2));
    }

    #[test]
    fn zero_columns_are_skipped() {
        let a = DenseMatrix::from_rows(&[[1.0, 0.0, 2.0], [0.0, 0.0, 3.0]]).unwrap();
        let c = rectangle_cover_exact(&a, &CoverLimits::default()).unwrap();
        assert_eq!(c.count(), 2);
        assert!(c.is_cover_of(&a));
    }

    #[test]
    fn limits_are_explicit() {
        let a = DenseMatrix::ones(9, 8);
        assert!(matches!(
            rectangle_cover_exact(&a, &CoverLimits::default()),
            Err(Error::CoverTooLarge(_))
        ));
        let tight = CoverLimits {
            max_support: 64,
            max_rectangles: 2,
        };
        assert!(rectangle_cover_exact(&DenseMatrix::identity(3), &tight).is_err());
    }
}
