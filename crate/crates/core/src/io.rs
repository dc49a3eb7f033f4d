//! MatrixMarket (dense `array real general`) and headerless CSV readers and writers.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

const MM_HEADER: &str = "%%MatrixMarket matrix array real general";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixFormat {
    MatrixMarket,
    Csv,
}

impl MatrixFormat {
    /// Guesses from the file extension: `.csv` is CSV, anything else MatrixMarket.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => MatrixFormat::Csv,
            _ => MatrixFormat::MatrixMarket,
        }
    }
}

impl FromStr for MatrixFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mm" | "mtx" | "matrixmarket" => Ok(MatrixFormat::MatrixMarket),
            "csv" => Ok(MatrixFormat::Csv),
            other => Err(Error::InvalidArgument(format!(
                "unknown matrix format {other:?}"
            ))),
        }
    }
}

pub fn read_matrix(path: impl AsRef<Path>, format: Option<MatrixFormat>) -> Result<DenseMatrix> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    match format.unwrap_or_else(|| MatrixFormat::from_path(path)) {
        MatrixFormat::MatrixMarket => parse_matrix_market(&text),
        MatrixFormat::Csv => parse_csv(&text),
    }
}

pub fn write_matrix(
    path: impl AsRef<Path>,
    m: &DenseMatrix,
    format: Option<MatrixFormat>,
) -> Result<()> {
    let path = path.as_ref();
    let text = match format.unwrap_or_else(|| MatrixFormat::from_path(path)) {
        MatrixFormat::MatrixMarket => to_matrix_market(m),
        MatrixFormat::Csv => to_csv(m),
    };
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn parse_number(token: &str, line: usize) -> Result<f64> {
    token.parse::<f64>().map_err(|_| Error::NonNumeric {
        line,
        token: token.to_string(),
    })
}

pub fn parse_matrix_market(text: &str) -> Result<DenseMatrix> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines.next().ok_or(Error::MalformedHeader {
        line: 1,
        msg: "empty file".to_string(),
    })?;
    let fields: Vec<String> = header
        .split_whitespace()
        .map(|s| s.to_ascii_lowercase())
        .collect();
    if fields.len() != 5 || fields[0] != "%%matrixmarket" || fields[1] != "matrix" {
        return Err(Error::MalformedHeader {
            line: 1,
            msg: format!("expected {MM_HEADER:?}"),
        });
    }
    if fields[2] != "array" || fields[3] != "real" || fields[4] != "general" {
        return Err(Error::MalformedHeader {
            line: 1,
            msg: format!(
                "unsupported layout {} {} {}; only array real general is read",
                fields[2], fields[3], fields[4]
            ),
        });
    }

    let mut body = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });
    let (dim_line, dims) = body.next().ok_or(Error::MalformedHeader {
        line: 2,
        msg: "missing dimension line".to_string(),
    })?;
    let dims: Vec<&str> = dims.split_whitespace().collect();
    if dims.len() != 2 {
        return Err(Error::MalformedHeader {
            line: dim_line,
            msg: "dimension line must hold exactly `rows cols`".to_string(),
        });
    }
    let parse_dim = |s: &str| {
        s.parse::<usize>().map_err(|_| Error::MalformedHeader {
            line: dim_line,
            msg: format!("bad dimension {s:?}"),
        })
    };
    let (rows, cols) = (parse_dim(dims[0])?, parse_dim(dims[1])?);
    let expected = rows * cols;

    let mut col_major = Vec::with_capacity(expected);
    let mut last_line = dim_line;
    for (line, l) in body {
        last_line = line;
        for tok in l.split_whitespace() {
            if col_major.len() == expected {
                return Err(Error::Parse {
                    line,
                    msg: format!("more than the declared {expected} entries"),
                });
            }
            col_major.push(parse_number(tok, line)?);
        }
    }
    if col_major.len() != expected {
        return Err(Error::Parse {
            line: last_line,
            msg: format!(
                "declared {rows}x{cols} = {expected} entries, found {}",
                col_major.len()
            ),
        });
    }
    if rows == 0 || cols == 0 {
        return Err(Error::EmptyMatrix { rows, cols });
    }
    DenseMatrix::new(
        rows,
        cols,
        (0..expected)
            .map(|k| col_major[(k % cols) * rows + k / cols])
            .collect(),
    )
}

pub fn to_matrix_market(m: &DenseMatrix) -> String {
    let mut out = String::new();
    writeln!(out, "{MM_HEADER}").unwrap();
    writeln!(out, "{} {}", m.rows(), m.cols()).unwrap();
    for j in 0..m.cols() {
        for i in 0..m.rows() {
            writeln!(out, "{}", m[(i, j)]).unwrap();
        }
    }
    out
}

pub fn parse_csv(text: &str) -> Result<DenseMatrix> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (k, l) in text.lines().enumerate() {
        let line = k + 1;
        if l.trim().is_empty() {
            continue;
        }
        let row = l
            .split(',')
            .map(|t| parse_number(t.trim(), line))
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::RaggedRow {
                    line,
                    expected: first.len(),
                    found: row.len(),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::EmptyMatrix { rows: 0, cols: 0 });
    }
    DenseMatrix::from_rows(&rows)
}

pub fn to_csv(m: &DenseMatrix) -> String {
    let mut out = String::new();
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|x| x.to_string()).collect();
        writeln!(out, "{}", row.join(",")).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_identity() {
        let m = parse_csv("1,0\n0,1").unwrap();
        assert_eq!(m, DenseMatrix::identity(2));
    }

    #[test]
    fn mm_wrong_entry_count() {
        let text = format!("{MM_HEADER}\n2 2\n1\n2\n3\n");
        assert!(matches!(
            parse_matrix_market(&text),
            Err(Error::Parse { line: 5, .. })
        ));
        let text = format!("{MM_HEADER}\n1 2\n1\n2\n3\n");
        assert!(matches!(
            parse_matrix_market(&text),
            Err(Error::Parse { line: 5, .. })
        ));
    }

    #[test]
    fn mm_is_column_major() {
        let text = format!("{MM_HEADER}\n% comment\n2 3\n1\n4\n2\n5\n3\n6\n");
        let m = parse_matrix_market(&text).unwrap();
        assert_eq!(m.to_rows(), vec![vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]);
        assert_eq!(to_matrix_market(&m), text.replace("% comment\n", ""));
    }

    #[test]
    fn distinct_parse_errors() {
        assert!(matches!(
            parse_matrix_market("%%MatrixMarket matrix coordinate real general\n1 1 1\n"),
            Err(Error::MalformedHeader { line: 1, .. })
        ));
        assert!(matches!(
            parse_csv("1,2\n3\n"),
            Err(Error::RaggedRow {
                line: 2,
                expected: 2,
                found: 1
            })
        ));
        assert!(matches!(
            parse_csv("1,2\n3,x\n"),
            Err(Error::NonNumeric { line: 2, .. })
        ));
        assert!(matches!(
            parse_matrix_market(&format!("{MM_HEADER}\n1 1\nabc\n")),
            Err(Error::NonNumeric { line: 3, .. })
        ));
    }

    #[test]
    fn round_trip_through_files() {
        let dir = tempfile::tempdir().unwrap();
        let m = DenseMatrix::from_rows(&[
            [1.0, 1.0, 0.0, 0.0],
            [1.0, 0.0, 1.0, 0.0],
            [0.0, 1.0, 0.0, 1.0],
            [0.0, 0.0, 1.0, 0.1 + 0.2],
        ])
        .unwrap();
        for name in ["a.mtx", "a.csv"] {
            let p = dir.path().join(name);
            write_matrix(&p, &m, None).unwrap();
            assert_eq!(read_matrix(&p, None).unwrap(), m);
        }
    }
}
