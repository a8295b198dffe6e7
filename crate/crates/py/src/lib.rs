//! Python bindings: spaces, operators, tensors, the ideal norms, the
//! regularization report and the scripted experiments.

use nalgebra::DMatrix;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use tnl_core::experiments::{self, ExperimentConfig};
use tnl_core::ideal::{self, IdealOptions};
use tnl_core::limits::{self, Pair};
use tnl_core::spaces::{operator_norm_with, OperatorMap, SpaceDescriptor};
use tnl_core::{projective, random, tensor, Error, NormEstimate};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::InvalidDescriptor(_)
        | Error::DimensionMismatch { .. }
        | Error::InvalidArgument(_)
        | Error::ScalarMismatch
        | Error::NonEuclidean(_)
        | Error::NotPolytopal(_)
        | Error::ComplexUnsupported(_)
        | Error::NotContained(_) => PyValueError::new_err(e.to_string()),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

/// A finite-dimensional normed space.
#[pyclass(name = "Space", module = "tnl", frozen)]
struct PySpace(tnl_core::Space);

#[pymethods]
impl PySpace {
    /// Parses `kind:dim[:complex]` (e.g. `linf:2`) or a JSON descriptor.
    #[new]
    fn new(descriptor: &str) -> PyResult<Self> {
        let d: SpaceDescriptor = descriptor.parse().map_err(py_err)?;
        Ok(PySpace(tnl_core::Space::new(d).map_err(py_err)?))
    }

    #[staticmethod]
    fn euclidean(n: usize) -> Self {
        PySpace(tnl_core::Space::euclidean(n))
    }

    #[staticmethod]
    fn l1(n: usize) -> Self {
        PySpace(tnl_core::Space::l1(n))
    }

    #[staticmethod]
    fn linf(n: usize) -> Self {
        PySpace(tnl_core::Space::linf(n))
    }

    /// Space whose unit ball is the convex hull of `points`.
    #[staticmethod]
    fn polytope(points: Vec<Vec<f64>>) -> PyResult<Self> {
        Ok(PySpace(tnl_core::Space::new(SpaceDescriptor::polytope_vertices(points)).map_err(py_err)?))
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn is_complex(&self) -> bool {
        self.0.is_complex()
    }

    fn norm(&self, v: Vec<f64>) -> PyResult<f64> {
        self.0.norm(&v).map_err(py_err)
    }

    fn dual(&self) -> Self {
        PySpace(self.0.dual())
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(self.0.descriptor()).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn __repr__(&self) -> String {
        format!("Space({})", self.0.label())
    }
}

/// Two-sided certified bound.
#[pyclass(name = "Estimate", module = "tnl", frozen, get_all)]
struct PyEstimate {
    lower: f64,
    upper: f64,
    certificate: String,
    method: String,
}

impl From<NormEstimate> for PyEstimate {
    fn from(e: NormEstimate) -> Self {
        let certificate = serde_json::to_value(e.certificate)
            .ok()
            .and_then(|v| v.as_str().map(str::to_string))
            .unwrap_or_default();
        PyEstimate { lower: e.lower, upper: e.upper, certificate, method: e.method }
    }
}

#[pymethods]
impl PyEstimate {
    fn __repr__(&self) -> String {
        format!("Estimate([{:.9}, {:.9}], {}, {})", self.lower, self.upper, self.certificate, self.method)
    }
}

/// A real linear map between two spaces.
#[pyclass(name = "Operator", module = "tnl", frozen)]
struct PyOperator(OperatorMap);

fn ideal_opts(net_delta: Option<f64>) -> IdealOptions {
    IdealOptions { net_delta, ..IdealOptions::default() }
}

#[pymethods]
impl PyOperator {
    /// `matrix` has one row per codomain coordinate.
    #[new]
    fn new(domain: &PySpace, codomain: &PySpace, matrix: Vec<Vec<f64>>) -> PyResult<Self> {
        Ok(PyOperator(OperatorMap::from_rows(domain.0.clone(), codomain.0.clone(), &matrix).map_err(py_err)?))
    }

    #[staticmethod]
    fn identity(space: &PySpace) -> Self {
        PyOperator(OperatorMap::identity(space.0.clone()))
    }

    #[getter]
    fn domain(&self) -> PySpace {
        PySpace(self.0.domain().clone())
    }

    #[getter]
    fn codomain(&self) -> PySpace {
        PySpace(self.0.codomain().clone())
    }

    #[getter]
    fn matrix(&self) -> PyResult<Vec<Vec<f64>>> {
        let m: &DMatrix<f64> = self.0.real().map_err(py_err)?;
        Ok((0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect())
    }

    fn adjoint(&self) -> Self {
        PyOperator(self.0.adjoint())
    }

    /// `self ∘ inner`.
    fn compose(&self, inner: &PyOperator) -> PyResult<Self> {
        Ok(PyOperator(self.0.compose(&inner.0).map_err(py_err)?))
    }

    /// Injective-domain, Hilbertian-codomain tensor product.
    fn tensor_eps_h(&self, other: &PyOperator) -> PyResult<Self> {
        Ok(PyOperator(self.0.tensor_eps_h(&other.0).map_err(py_err)?))
    }

    #[pyo3(signature = (net_delta=None))]
    fn operator_norm(&self, net_delta: Option<f64>) -> PyResult<PyEstimate> {
        Ok(operator_norm_with(&self.0, net_delta).map_err(py_err)?.into())
    }

    fn hs_norm(&self) -> PyResult<f64> {
        ideal::hs_norm(&self.0).map_err(py_err)
    }

    #[pyo3(signature = (net_delta=None))]
    fn pi2(&self, net_delta: Option<f64>) -> PyResult<PyEstimate> {
        Ok(ideal::pi2_with(&self.0, &ideal_opts(net_delta)).map_err(py_err)?.into())
    }

    fn gamma2(&self) -> PyResult<PyEstimate> {
        Ok(ideal::gamma2(&self.0).map_err(py_err)?.into())
    }

    #[pyo3(signature = (net_delta=None))]
    fn gamma2_star(&self, net_delta: Option<f64>) -> PyResult<PyEstimate> {
        Ok(ideal::gamma2_star_with(&self.0, &ideal_opts(net_delta)).map_err(py_err)?.estimate.into())
    }

    fn __repr__(&self) -> String {
        format!("Operator({} -> {})", self.0.domain().label(), self.0.codomain().label())
    }
}

/// A real order-k tensor over the given factor spaces (row-major data).
#[pyclass(name = "Tensor", module = "tnl", frozen)]
struct PyTensor(tnl_core::DenseTensor);

#[pymethods]
impl PyTensor {
    #[new]
    fn new(factors: Vec<PyRef<'_, PySpace>>, data: Vec<f64>) -> PyResult<Self> {
        let f = factors.iter().map(|s| s.0.clone()).collect();
        Ok(PyTensor(tnl_core::DenseTensor::new(f, data).map_err(py_err)?))
    }

    /// Standard Gaussian tensor on `space^{⊗k}`.
    #[staticmethod]
    #[pyo3(signature = (space, k, seed=0, stream=0))]
    fn gaussian(space: &PySpace, k: usize, seed: u64, stream: u64) -> PyResult<Self> {
        Ok(PyTensor(random::gaussian_in(&space.0, k, seed, stream).map_err(py_err)?.tensor))
    }

    #[getter]
    fn shape(&self) -> Vec<usize> {
        self.0.shape()
    }

    fn injective_norm(&self) -> PyResult<PyEstimate> {
        Ok(tensor::injective_norm(&self.0).map_err(py_err)?.into())
    }

    fn projective_norm(&self) -> PyResult<PyEstimate> {
        Ok(projective::projective_norm(&self.0).map_err(py_err)?.into())
    }

    fn hilbert_norm(&self) -> PyResult<f64> {
        tensor::hilbert_norm(&self.0).map_err(py_err)
    }
}

/// Per-k bounds on `‖φ^⊗k‖^{1/k}`; `pair` is `eh`, `hpi` or `epi`.
/// Returns `(target, rows)` with one dict per k.
#[pyfunction]
fn regularization_report<'py>(py: Python<'py>, op: &PyOperator, kmax: usize, pair: &str) -> PyResult<(f64, Vec<Bound<'py, PyDict>>)> {
    let pair: Pair = pair.parse().map_err(py_err)?;
    let report = limits::regularization_report(&op.0, kmax, pair).map_err(py_err)?;
    let mut rows = Vec::with_capacity(report.rows.len());
    for r in &report.rows {
        let d = PyDict::new(py);
        d.set_item("k", r.k)?;
        d.set_item("lower", r.lower)?;
        d.set_item("upper", r.upper)?;
        d.set_item("root_lower", r.root_lower)?;
        d.set_item("root_upper", r.root_upper)?;
        d.set_item("fekete_lower", r.fekete_lower)?;
        d.set_item("witness", &r.witness)?;
        rows.push(d);
    }
    Ok((report.target, rows))
}

/// Runs an experiment from its JSON config; returns the record as JSON.
#[pyfunction]
fn run_experiment(config_json: &str) -> PyResult<String> {
    let config = ExperimentConfig::from_json(config_json).map_err(py_err)?;
    let record = experiments::run(&config).map_err(py_err)?;
    record.to_json().map_err(py_err)
}

/// `(k, mean injective upper bound, standard error, ratio)` for k = 2..kmax.
#[pyfunction]
#[pyo3(signature = (n, kmax, trials, seed=0))]
fn mc_eps_growth(n: usize, kmax: usize, trials: usize, seed: u64) -> PyResult<Vec<(usize, f64, f64, f64)>> {
    let rows = random::mc_eps_growth(n, kmax, trials, seed).map_err(py_err)?;
    Ok(rows.into_iter().map(|r| (r.k, r.mean_eps_upper, r.se, r.ratio)).collect())
}

#[pymodule]
pub fn tnl(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySpace>()?;
    m.add_class::<PyEstimate>()?;
    m.add_class::<PyOperator>()?;
    m.add_class::<PyTensor>()?;
    m.add_function(wrap_pyfunction!(regularization_report, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(mc_eps_growth, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
