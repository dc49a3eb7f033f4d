//! SDPA sparse (`.dat-s`) export of a [`ConicProblem`], plus a reader used to
//! check exports.
//!
//! The problem `min c^T z, M z = b, z in K` is written as the SDPA dual form
//! `max F0 . Y  s.t.  Fi . Y = b_i,  Y PSD`, with `F0 = -C`:
//!
//! * PSD cones become SDP blocks in cone order;
//! * nonnegative coordinates, and free coordinates split as `z+ - z-`, share
//!   one trailing diagonal block (negative size);
//! * zero-cone coordinates are fixed at 0 and omitted.
//!
//! So the optimal SDPA objective is `-min c^T z`.

use std::collections::BTreeMap;
use std::f64::consts::SQRT_2;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::solver::{svec_index, Cone, ConeProduct, ConicProblem, ConstraintMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct SdpaProblem {
    pub comment: Option<String>,
    /// Positive sizes are SDP blocks, negative sizes diagonal blocks.
    pub block_sizes: Vec<i64>,
    pub b: Vec<f64>,
    /// `(matno, blkno, i, j) -> value`, 1-based, `i <= j`.
    pub entries: BTreeMap<(usize, usize, usize, usize), f64>,
}

#[derive(Clone, Copy)]
enum Slot {
    /// Omitted coordinate.
    Fixed,
    /// Diagonal position(s) in the LP block: `(plus, minus)`.
    Diagonal(usize, Option<usize>),
    /// Entry of an SDP block, 0-based `(block, i, j)` with `i <= j`.
    Matrix(usize, usize, usize),
}

fn coordinate_slots(p: &ConicProblem) -> (Vec<Slot>, Vec<i64>) {
    let mut slots = vec![Slot::Fixed; p.cone.len()];
    let mut sizes = Vec::new();
    let mut diag = 0usize;
    let mut pending: Vec<(usize, Cone)> = Vec::new();
    for (start, cone) in p.cone.blocks() {
        match cone {
            Cone::Psd(side) => {
                let blk = sizes.len();
                sizes.push(side as i64);
                let mut k = start;
                for i in 0..side {
                    for j in i..side {
                        slots[k] = Slot::Matrix(blk, i, j);
                        k += 1;
                    }
                }
            }
            _ => pending.push((start, cone)),
        }
    }
    for (start, cone) in pending {
        for slot in &mut slots[start..start + cone.len()] {
            *slot = match cone {
                Cone::Zero(_) => Slot::Fixed,
                Cone::Nonneg(_) => {
                    diag += 1;
                    Slot::Diagonal(diag, None)
                }
                Cone::Free(_) => {
                    diag += 2;
                    Slot::Diagonal(diag - 1, Some(diag))
                }
                Cone::Psd(_) => unreachable!(),
            };
        }
    }
    if diag > 0 {
        sizes.push(-(diag as i64));
    }
    (slots, sizes)
}

impl SdpaProblem {
    pub fn from_problem(p: &ConicProblem, comment: Option<&str>) -> Result<Self> {
        p.validate()?;
        let (slots, block_sizes) = coordinate_slots(p);
        let lp_block = block_sizes.iter().position(|&s| s < 0);
        let mut entries: BTreeMap<(usize, usize, usize, usize), f64> = BTreeMap::new();
        let mut add = |matno: usize, coord: usize, coef: f64| match slots[coord] {
            Slot::Fixed => {}
            Slot::Diagonal(plus, minus) => {
                let blk = lp_block.expect("diagonal slots imply an LP block") + 1;
                *entries.entry((matno, blk, plus, plus)).or_default() += coef;
                if let Some(mi) = minus {
                    *entries.entry((matno, blk, mi, mi)).or_default() -= coef;
                }
            }
            Slot::Matrix(blk, i, j) => {
                // a * svec_ij = a sqrt(2) Y_ij = 2 F_ij Y_ij off the diagonal.
                let v = if i == j { coef } else { coef / SQRT_2 };
                *entries.entry((matno, blk + 1, i + 1, j + 1)).or_default() += v;
            }
        };
        for (k, &ck) in p.c.iter().enumerate() {
            if ck != 0.0 {
                add(0, k, -ck);
            }
        }
        for r in 0..p.a.nrows() {
            for (col, v) in p.a.row(r) {
                add(r + 1, col, v);
            }
        }
        entries.retain(|_, v| *v != 0.0);
        Ok(Self {
            comment: comment.map(str::to_string),
            block_sizes,
            b: p.b.clone(),
            entries,
        })
    }

    pub fn to_sdpa_string(&self) -> String {
        let mut out = String::new();
        if let Some(c) = &self.comment {
            for line in c.lines() {
                writeln!(out, "\"{line}").unwrap();
            }
        }
        writeln!(out, "{}", self.b.len()).unwrap();
        writeln!(out, "{}", self.block_sizes.len()).unwrap();
        let sizes: Vec<String> = self.block_sizes.iter().map(i64::to_string).collect();
        writeln!(out, "{}", sizes.join(" ")).unwrap();
        let rhs: Vec<String> = self.b.iter().map(|v| fmt17(*v)).collect();
        writeln!(out, "{}", rhs.join(" ")).unwrap();
        for (&(matno, blk, i, j), &v) in &self.entries {
            writeln!(out, "{matno} {blk} {i} {j} {}", fmt17(v)).unwrap();
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut comment_lines = Vec::new();
        let mut body = Vec::new();
        for (k, line) in text.lines().enumerate() {
            let t = line.trim();
            if let Some(rest) = t.strip_prefix('"') {
                if body.is_empty() {
                    comment_lines.push(rest.to_string());
                }
            } else if !t.is_empty() && !t.starts_with('*') {
                body.push((k + 1, t));
            }
        }
        let mut it = body.into_iter();
        let mut next = |what: &str| {
            it.next().ok_or_else(|| Error::Parse {
                line: 0,
                msg: format!("missing {what}"),
            })
        };
        let clean = |s: &str| s.replace([',', '{', '}', '(', ')'], " ");
        let (l1, t1) = next("constraint count")?;
        let m: usize = first_token(&clean(t1), l1)?;
        let (l2, t2) = next("block count")?;
        let nblocks: usize = first_token(&clean(t2), l2)?;
        let (l3, t3) = next("block sizes")?;
        let block_sizes = parse_tokens::<i64>(&clean(t3), l3)?;
        if block_sizes.len() != nblocks {
            return Err(Error::Parse {
                line: l3,
                msg: format!(
                    "expected {nblocks} block sizes, found {}",
                    block_sizes.len()
                ),
            });
        }
        let (l4, t4) = next("right-hand side")?;
        let b = parse_tokens::<f64>(&clean(t4), l4)?;
        if b.len() != m {
            return Err(Error::Parse {
                line: l4,
                msg: format!("expected {m} right-hand side values, found {}", b.len()),
            });
        }
        let mut entries = BTreeMap::new();
        for (line, t) in it {
            let toks: Vec<&str> = t.split_whitespace().collect();
            if toks.len() != 5 {
                return Err(Error::Parse {
                    line,
                    msg: "entry lines hold `matno blkno i j value`".into(),
                });
            }
            let idx = |s: &str| {
                s.parse::<usize>().map_err(|_| Error::NonNumeric {
                    line,
                    token: s.to_string(),
                })
            };
            let key = (idx(toks[0])?, idx(toks[1])?, idx(toks[2])?, idx(toks[3])?);
            let v: f64 = toks[4].parse().map_err(|_| Error::NonNumeric {
                line,
                token: toks[4].to_string(),
            })?;
            if key.0 > m || key.1 == 0 || key.1 > nblocks {
                return Err(Error::Parse {
                    line,
                    msg: "matrix or block number out of range".into(),
                });
            }
            *entries.entry(key).or_insert(0.0) += v;
        }
        Ok(Self {
            comment: (!comment_lines.is_empty()).then(|| comment_lines.join("\n")),
            block_sizes,
            b,
            entries,
        })
    }
}

impl SdpaProblem {
    /// The SDPA problem as `min -F0 . Y` over its own blocks: PSD blocks in
    /// svec form, diagonal blocks as nonnegative vectors.
    pub fn to_conic(&self) -> Result<ConicProblem> {
        let mut cone = ConeProduct::new();
        let starts: Vec<usize> = self
            .block_sizes
            .iter()
            .map(|&s| {
                if s > 0 {
                    cone.push(Cone::Psd(s as usize))
                } else {
                    cone.push(Cone::Nonneg(s.unsigned_abs() as usize))
                }
            })
            .collect();
        let coord = |blk: usize, i: usize, j: usize| -> Result<(usize, f64)> {
            let size = self.block_sizes[blk - 1];
            let side = size.unsigned_abs() as usize;
            let (i, j) = (i.min(j) - 1, i.max(j) - 1);
            if i >= side || j >= side || (size < 0 && i != j) {
                return Err(Error::Parse {
                    line: 0,
                    msg: format!("entry ({}, {}) outside block {blk}", i + 1, j + 1),
                });
            }
            let start = starts[blk - 1];
            Ok(if size < 0 {
                (start + i, 1.0)
            } else if i == j {
                (start + svec_index(side, i, j), 1.0)
            } else {
                (start + svec_index(side, i, j), SQRT_2)
            })
        };
        let mut c = vec![0.0; cone.len()];
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); self.b.len()];
        for (&(matno, blk, i, j), &v) in &self.entries {
            if i == 0 || j == 0 {
                return Err(Error::Parse {
                    line: 0,
                    msg: "SDPA indices are 1-based".into(),
                });
            }
            let (k, scale) = coord(blk, i, j)?;
            if matno == 0 {
                c[k] -= v * scale;
            } else {
                rows[matno - 1].push((k, v * scale));
            }
        }
        let mut a = ConstraintMatrix::new(cone.len());
        for row in rows {
            a.push_row(row);
        }
        let p = ConicProblem {
            c,
            a,
            b: self.b.clone(),
            cone,
            variables: vec![],
            constraints: vec![],
        };
        p.validate()?;
        Ok(p)
    }
}

fn first_token<T: std::str::FromStr>(s: &str, line: usize) -> Result<T> {
    let tok = s.split_whitespace().next().unwrap_or("");
    tok.parse().map_err(|_| Error::NonNumeric {
        line,
        token: tok.to_string(),
    })
}

fn parse_tokens<T: std::str::FromStr>(s: &str, line: usize) -> Result<Vec<T>> {
    s.split_whitespace()
        .map(|tok| {
            tok.parse().map_err(|_| Error::NonNumeric {
                line,
                token: tok.to_string(),
            })
        })
        .collect()
}

/// 17 significant digits in scientific notation.
fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn export_sdpa(p: &ConicProblem, path: impl AsRef<Path>, comment: Option<&str>) -> Result<()> {
    let path = path.as_ref();
    let text = SdpaProblem::from_problem(p, comment)?.to_sdpa_string();
    fs::write(path, text).map_err(|e| Error::io(path, e))
}
