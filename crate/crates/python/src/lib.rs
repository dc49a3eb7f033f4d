//! Python module `nnrank`: bounds, certificates and example matrices.
//!
//! Matrices cross the boundary as lists of rows (any nested sequence of
//! floats is accepted, including 2-D NumPy arrays).

use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use nnrank::bounds::{self, CoverLimits, ReportOptions};
use nnrank::relaxations::{self, RelaxationSpec, SymmetricReduction};
use nnrank::solver::SolverSettings;
use nnrank::{generators, DenseMatrix, NonnegMatrix, SymWeight};

fn to_py_err(e: nnrank::Error) -> PyErr {
    match e {
        nnrank::Error::Io { .. } => PyOSError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn dense(rows: Vec<Vec<f64>>) -> PyResult<DenseMatrix> {
    DenseMatrix::from_rows(&rows).map_err(to_py_err)
}

fn nonneg(rows: Vec<Vec<f64>>) -> PyResult<NonnegMatrix> {
    NonnegMatrix::new(dense(rows)?).map_err(to_py_err)
}

fn weights(
    p: Option<Vec<Vec<f64>>>,
    q: Option<Vec<Vec<f64>>>,
    a: &DenseMatrix,
) -> PyResult<Option<(SymWeight, SymWeight)>> {
    if p.is_none() && q.is_none() {
        return Ok(None);
    }
    let load = |w: Option<Vec<Vec<f64>>>, dim: usize| -> PyResult<SymWeight> {
        match w {
            Some(rows) => SymWeight::new(dense(rows)?).map_err(to_py_err),
            None => Ok(SymWeight::identity(dim)),
        }
    };
    Ok(Some((load(p, a.rows())?, load(q, a.cols())?)))
}

fn spec(
    level: usize,
    reduction: &str,
    w: Option<(SymWeight, SymWeight)>,
) -> PyResult<RelaxationSpec> {
    let mode: SymmetricReduction = reduction.parse().map_err(to_py_err)?;
    let mut s = RelaxationSpec::level(level).with_reduction(mode);
    s.weights = w;
    Ok(s)
}

fn json_to_py<'py>(py: Python<'py>, v: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    use serde_json::Value;
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match n.as_u64() {
            Some(u) => u.into_pyobject(py)?.into_any(),
            None => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.into_any()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, item) in map {
                dict.set_item(k, json_to_py(py, item)?)?;
            }
            dict.into_any()
        }
    })
}

/// Sum of the singular values.
#[pyfunction]
fn nuclear_norm(matrix: Vec<Vec<f64>>) -> PyResult<f64> {
    Ok(bounds::nuclear_norm(&dense(matrix)?))
}

#[pyfunction]
#[pyo3(signature = (matrix, rel_tol = bounds::RANK_REL_TOL))]
fn numerical_rank(matrix: Vec<Vec<f64>>, rel_tol: f64) -> PyResult<usize> {
    Ok(bounds::numerical_rank(&dense(matrix)?, rel_tol))
}

#[pyfunction]
fn classic_rank_bound(matrix: Vec<Vec<f64>>) -> PyResult<f64> {
    Ok(bounds::classic_rank_bound(&dense(matrix)?))
}

/// Minimum rectangle cover of the support as `[(rows, cols), ...]`, 0-based.
#[pyfunction]
fn rectangle_cover(matrix: Vec<Vec<f64>>) -> PyResult<Vec<(Vec<usize>, Vec<usize>)>> {
    let cover = bounds::rectangle_cover_exact(&dense(matrix)?, &CoverLimits::default())
        .map_err(to_py_err)?;
    Ok(cover
        .rectangles
        .into_iter()
        .map(|r| (r.rows, r.cols))
        .collect())
}

/// Solves one relaxation; returns value, rank bound, certified value and status.
#[pyfunction]
#[pyo3(signature = (matrix, level = 0, tol = 1e-7, max_iter = 200_000, weights_p = None, weights_q = None, symmetric_reduction = "auto"))]
#[allow(clippy::too_many_arguments)]
fn nu_plus<'py>(
    py: Python<'py>,
    matrix: Vec<Vec<f64>>,
    level: usize,
    tol: f64,
    max_iter: usize,
    weights_p: Option<Vec<Vec<f64>>>,
    weights_q: Option<Vec<Vec<f64>>>,
    symmetric_reduction: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let a = nonneg(matrix)?;
    let s = spec(
        level,
        symmetric_reduction,
        weights(weights_p, weights_q, &a)?,
    )?;
    let settings = SolverSettings::default()
        .with_tol(tol)
        .with_max_iter(max_iter);
    let b = py
        .detach(|| bounds::nu_plus_bound(&a, &s, &settings))
        .map_err(to_py_err)?;
    let out = PyDict::new(py);
    out.set_item("level", b.level)?;
    out.set_item("value", b.value)?;
    out.set_item("ratio", b.ratio)?;
    out.set_item("certified_value", b.certified_value)?;
    out.set_item("certified_ratio", b.certified_ratio())?;
    out.set_item("status", b.status().as_str())?;
    out.set_item("iterations", b.result.solution.iterations)?;
    out.set_item("W", b.result.w().map(|w| w.to_rows()))?;
    Ok(out)
}

/// Full bound report as a dict with the same keys as the JSON report.
#[pyfunction]
#[pyo3(signature = (matrix, level = 0, tol = 1e-7, max_iter = 200_000, weights_p = None, weights_q = None, symmetric_reduction = "auto"))]
#[allow(clippy::too_many_arguments)]
fn bound_report<'py>(
    py: Python<'py>,
    matrix: Vec<Vec<f64>>,
    level: usize,
    tol: f64,
    max_iter: usize,
    weights_p: Option<Vec<Vec<f64>>>,
    weights_q: Option<Vec<Vec<f64>>>,
    symmetric_reduction: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let a = nonneg(matrix)?;
    let opts = ReportOptions {
        spec: spec(
            level,
            symmetric_reduction,
            weights(weights_p, weights_q, &a)?,
        )?,
        settings: SolverSettings::default()
            .with_tol(tol)
            .with_max_iter(max_iter),
        ..ReportOptions::default()
    };
    let report = py
        .detach(|| bounds::bound_report(&a, &opts))
        .map_err(to_py_err)?;
    let value = serde_json::to_value(&report).map_err(|e| PyValueError::new_err(e.to_string()))?;
    json_to_py(py, &value)
}

/// Writes the compiled relaxation in SDPA sparse format.
#[pyfunction]
#[pyo3(signature = (matrix, path, level = 0, symmetric_reduction = "auto"))]
fn export_sdpa(
    matrix: Vec<Vec<f64>>,
    path: std::path::PathBuf,
    level: usize,
    symmetric_reduction: &str,
) -> PyResult<()> {
    let a = nonneg(matrix)?;
    let compiled =
        relaxations::build(&a, &spec(level, symmetric_reduction, None)?).map_err(to_py_err)?;
    relaxations::export_sdpa(&compiled.problem, path, None).map_err(to_py_err)
}

/// A matrix `W` with a nonnegative + PSD split of `[[P, -W], [-W^T, Q]]`.
#[pyclass(name = "Certificate", module = "nnrank", skip_from_py_object)]
#[derive(Clone)]
struct PyCertificate {
    inner: bounds::Certificate,
}

#[pymethods]
impl PyCertificate {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: bounds::Certificate::from_json(text).map_err(to_py_err)?,
        })
    }

    /// Level-0 certificate recovered from a solve of `matrix`.
    #[staticmethod]
    #[pyo3(signature = (matrix, tol = 1e-7))]
    fn from_solve(py: Python<'_>, matrix: Vec<Vec<f64>>, tol: f64) -> PyResult<Self> {
        let a = nonneg(matrix)?;
        let settings = SolverSettings::default().with_tol(tol);
        let r = py
            .detach(|| relaxations::solve_relaxation(&a, &RelaxationSpec::default(), &settings))
            .map_err(to_py_err)?;
        let inner = r
            .certificate
            .ok_or_else(|| PyValueError::new_err("the relaxation produced no certificate"))?;
        Ok(Self { inner })
    }

    fn to_json(&self) -> PyResult<String> {
        self.inner.to_json().map_err(to_py_err)
    }

    #[getter]
    fn w(&self) -> Vec<Vec<f64>> {
        self.inner.w.to_rows()
    }

    #[getter]
    fn shape(&self) -> (usize, usize) {
        (self.inner.m(), self.inner.n())
    }

    /// Residual report: decomposition residual, minimum entry of the
    /// nonnegative part, PSD eigenvalues and objective.
    fn verify<'py>(&self, py: Python<'py>, matrix: Vec<Vec<f64>>) -> PyResult<Bound<'py, PyDict>> {
        let c = bounds::verify_certificate(&dense(matrix)?, &self.inner).map_err(to_py_err)?;
        let out = PyDict::new(py);
        out.set_item("decomposition_residual", c.decomposition_residual)?;
        out.set_item("nonneg_min", c.nonneg_min)?;
        out.set_item("psd_min_eigenvalue", c.psd_min_eigenvalue)?;
        out.set_item("implied_psd_min_eigenvalue", c.implied_psd_min_eigenvalue)?;
        out.set_item("objective", c.objective)?;
        Ok(out)
    }

    /// Rigorous lower bound on the nonnegative nuclear norm.
    fn certified_value(&self, matrix: Vec<Vec<f64>>) -> PyResult<f64> {
        Ok(bounds::round_certificate(&dense(matrix)?, &self.inner)
            .map_err(to_py_err)?
            .certified_value)
    }

    fn __repr__(&self) -> String {
        format!("Certificate({}x{})", self.inner.m(), self.inner.n())
    }
}

fn rows(m: &DenseMatrix) -> Vec<Vec<f64>> {
    m.to_rows()
}

#[pyfunction]
fn cohen_rothblum() -> Vec<Vec<f64>> {
    rows(&generators::cohen_rothblum())
}

#[pyfunction]
fn perturbed_cohen_rothblum(eps: f64) -> PyResult<Vec<Vec<f64>>> {
    Ok(rows(
        generators::perturbed_cohen_rothblum(eps)
            .map_err(to_py_err)?
            .matrix(),
    ))
}

#[pyfunction]
fn boolean_rank_example() -> Vec<Vec<f64>> {
    rows(&generators::boolean_rank_example())
}

#[pyfunction]
fn derangement(n: usize) -> PyResult<Vec<Vec<f64>>> {
    Ok(rows(
        generators::derangement(n).map_err(to_py_err)?.matrix(),
    ))
}

#[pyfunction]
#[pyo3(signature = (n, beta = None))]
fn scaled_diagonal(n: usize, beta: Option<f64>) -> PyResult<Vec<Vec<f64>>> {
    Ok(rows(
        generators::scaled_diagonal(n, beta.unwrap_or(n as f64))
            .map_err(to_py_err)?
            .matrix(),
    ))
}

/// `(slack, certificate)` for the hypercube `[0, 1]^n`.
#[pyfunction]
fn hypercube_slack(n: usize) -> PyResult<(Vec<Vec<f64>>, PyCertificate)> {
    let h = generators::hypercube_slack(n).map_err(to_py_err)?;
    Ok((
        rows(&h.slack),
        PyCertificate {
            inner: h.certificate(),
        },
    ))
}

#[pymodule]
#[pyo3(name = "nnrank")]
fn nnrank_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCertificate>()?;
    m.add_function(wrap_pyfunction!(nuclear_norm, m)?)?;
    m.add_function(wrap_pyfunction!(numerical_rank, m)?)?;
    m.add_function(wrap_pyfunction!(classic_rank_bound, m)?)?;
    m.add_function(wrap_pyfunction!(rectangle_cover, m)?)?;
    m.add_function(wrap_pyfunction!(nu_plus, m)?)?;
    m.add_function(wrap_pyfunction!(bound_report, m)?)?;
    m.add_function(wrap_pyfunction!(export_sdpa, m)?)?;
    m.add_function(wrap_pyfunction!(cohen_rothblum, m)?)?;
    m.add_function(wrap_pyfunction!(perturbed_cohen_rothblum, m)?)?;
    m.add_function(wrap_pyfunction!(boolean_rank_example, m)?)?;
    m.add_function(wrap_pyfunction!(derangement, m)?)?;
    m.add_function(wrap_pyfunction!(scaled_diagonal, m)?)?;
    m.add_function(wrap_pyfunction!(hypercube_slack, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use pyo3::ffi::c_str;

    #[test]
    fn module_round_trip() {
        Python::initialize();
        Python::attach(|py| {
            let module = pyo3::wrap_pymodule!(nnrank_module)(py);
            let globals = PyDict::new(py);
            globals.set_item("nnrank", module).unwrap();
            py.run(
                c_str!(
                    r#"
import math
a = nnrank.cohen_rothblum()
res = nnrank.nu_plus(a)
assert res["status"] == "optimal"
assert abs(res["value"] - 4 * math.sqrt(2)) < 1e-4
slack, cert = nnrank.hypercube_slack(2)
assert cert.verify(slack)["psd_min_eigenvalue"] > -1e-9
assert list(nnrank.bound_report(a))[:3] == ["m", "n", "frobenius"]
try:
    nnrank.derangement(1)
    raise AssertionError("expected ValueError")
except ValueError:
    pass
"#
                ),
                Some(&globals),
                None,
            )
            .unwrap();
        });
    }
}
