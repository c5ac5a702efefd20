//! Python bindings. Vectors cross the boundary as lists of floats; reports
//! and traces come back as plain dicts built from their JSON form.

use hybrid_ep::diagnostics::{certify as certify_trace, CertifyOptions};
use hybrid_ep::equilibrium::{check_axioms, default_t_grid, Bifunction, ResolventRequest, Strategy};
use hybrid_ep::hilbert::{self, ConvexSet, Tolerance, Vector};
use hybrid_ep::linalg::Matrix;
use hybrid_ep::mappings::{classify, is_quasi_nonexpansive, Mapping, OperatorClass};
use hybrid_ep::schemes::{run_with_mode, Problem, Schedule, Scheme, StopRule, Trace, TraceMode};
use hybrid_ep::cli::{trace_csv, ExperimentSpec};
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::de::DeserializeOwned;
use serde::Serialize;

create_exception!(hybrid_ep, HybridEpError, PyValueError);

fn py_err(e: impl std::fmt::Display) -> PyErr {
    HybridEpError::new_err(e.to_string())
}

fn vector(coords: Vec<f64>) -> PyResult<Vector> {
    Vector::new(coords).map_err(py_err)
}

fn parse<T: DeserializeOwned>(text: &str) -> PyResult<T> {
    serde_json::from_str(text).map_err(py_err)
}

fn dump<T: Serialize>(value: &T) -> PyResult<String> {
    serde_json::to_string(value).map_err(py_err)
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (dump(value)?,))
}

#[pyfunction]
fn inner(x: Vec<f64>, y: Vec<f64>) -> PyResult<f64> {
    hilbert::inner(&vector(x)?, &vector(y)?).map_err(py_err)
}

#[pyfunction]
fn norm(x: Vec<f64>) -> PyResult<f64> {
    Ok(hilbert::norm(&vector(x)?))
}

/// `t x + (1 - t) y`
#[pyfunction]
fn combine(t: f64, x: Vec<f64>, y: Vec<f64>) -> PyResult<Vec<f64>> {
    Ok(hilbert::combine(t, &vector(x)?, &vector(y)?).map_err(py_err)?.into_inner())
}

#[pyclass(name = "ConvexSet", module = "hybrid_ep", frozen)]
pub struct PyConvexSet {
    inner: ConvexSet,
}

fn set(inner: hybrid_ep::Result<ConvexSet>) -> PyResult<PyConvexSet> {
    inner.map(|inner| PyConvexSet { inner }).map_err(py_err)
}

#[pymethods]
impl PyConvexSet {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyConvexSet { inner: parse(text)? })
    }

    #[staticmethod]
    fn whole_space() -> Self {
        PyConvexSet {
            inner: ConvexSet::WholeSpace,
        }
    }

    #[staticmethod]
    #[pyo3(name = "box")]
    fn box_set(lower: Vec<f64>, upper: Vec<f64>) -> PyResult<Self> {
        set(ConvexSet::box_set(vector(lower)?, vector(upper)?))
    }

    #[staticmethod]
    fn ball(center: Vec<f64>, radius: f64) -> PyResult<Self> {
        set(ConvexSet::ball(vector(center)?, radius))
    }

    #[staticmethod]
    fn halfspace(normal: Vec<f64>, offset: f64) -> PyResult<Self> {
        set(ConvexSet::halfspace(vector(normal)?, offset))
    }

    #[staticmethod]
    fn hyperplane(normal: Vec<f64>, offset: f64) -> PyResult<Self> {
        set(ConvexSet::hyperplane(vector(normal)?, offset))
    }

    #[staticmethod]
    fn simplex(scale: f64) -> PyResult<Self> {
        set(ConvexSet::simplex(scale))
    }

    #[staticmethod]
    fn singleton(point: Vec<f64>) -> PyResult<Self> {
        Ok(PyConvexSet {
            inner: ConvexSet::singleton(vector(point)?),
        })
    }

    #[staticmethod]
    fn intersection(sets: Vec<PyRef<'_, PyConvexSet>>) -> PyResult<Self> {
        set(ConvexSet::intersection(sets.iter().map(|s| s.inner.clone()).collect()))
    }

    fn project(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        Ok(self.inner.project(&vector(x)?).map_err(py_err)?.into_inner())
    }

    fn distance(&self, x: Vec<f64>) -> PyResult<f64> {
        self.inner.distance(&vector(x)?).map_err(py_err)
    }

    #[pyo3(signature = (x, tol = 1e-9))]
    fn contains(&self, x: Vec<f64>, tol: f64) -> PyResult<bool> {
        self.inner.contains(&vector(x)?, Tolerance::absolute(tol)).map_err(py_err)
    }

    fn to_json(&self) -> PyResult<String> {
        dump(&self.inner)
    }

    fn __repr__(&self) -> PyResult<String> {
        Ok(format!("ConvexSet({})", self.to_json()?))
    }
}

#[pyclass(name = "Mapping", module = "hybrid_ep", frozen)]
pub struct PyMapping {
    inner: Mapping,
}

#[pymethods]
impl PyMapping {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyMapping { inner: parse(text)? })
    }

    /// `S x`, requiring `x` in the domain.
    fn apply(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        Ok(self.inner.apply(&vector(x)?).map_err(py_err)?.into_inner())
    }

    /// `S x` by the defining formula, without the domain check.
    fn eval(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        Ok(self.inner.eval(&vector(x)?).map_err(py_err)?.into_inner())
    }

    fn fixed_point_residual(&self, x: Vec<f64>) -> PyResult<f64> {
        self.inner.fixed_point_residual(&vector(x)?).map_err(py_err)
    }

    fn ghyb_residual(&self, alpha: f64, beta: f64, x: Vec<f64>, y: Vec<f64>) -> PyResult<f64> {
        self.inner
            .ghyb_residual(alpha, beta, &vector(x)?, &vector(y)?)
            .map_err(py_err)
    }

    /// `class_json` is e.g. `{"name": "generalized-hybrid", "alpha": 1, "beta": 0}`.
    #[pyo3(signature = (class_json, seed = 0, n_pairs = 1000, tol = 1e-8))]
    fn classify<'py>(
        &self,
        py: Python<'py>,
        class_json: &str,
        seed: u64,
        n_pairs: usize,
        tol: f64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let class: OperatorClass = parse(class_json)?;
        to_py(py, &classify(&self.inner, &class, seed, n_pairs, tol).map_err(py_err)?)
    }

    #[pyo3(signature = (p, seed = 0, n_points = 1000, tol = 1e-8))]
    fn is_quasi_nonexpansive<'py>(
        &self,
        py: Python<'py>,
        p: Vec<f64>,
        seed: u64,
        n_points: usize,
        tol: f64,
    ) -> PyResult<Bound<'py, PyAny>> {
        to_py(
            py,
            &is_quasi_nonexpansive(&self.inner, &vector(p)?, seed, n_points, tol).map_err(py_err)?,
        )
    }

    fn to_json(&self) -> PyResult<String> {
        dump(&self.inner)
    }
}

#[pyclass(name = "Bifunction", module = "hybrid_ep", frozen)]
pub struct PyBifunction {
    inner: Bifunction,
}

#[pymethods]
impl PyBifunction {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyBifunction { inner: parse(text)? })
    }

    #[staticmethod]
    fn zero(domain: &PyConvexSet) -> Self {
        PyBifunction {
            inner: Bifunction::zero(domain.inner.clone()),
        }
    }

    /// `f(x, y) = <A x + b, y - x>`
    #[staticmethod]
    fn affine_vi(matrix: Vec<Vec<f64>>, offset: Vec<f64>, domain: &PyConvexSet) -> PyResult<Self> {
        let matrix = Matrix::from_rows(matrix).map_err(py_err)?;
        let inner = Bifunction::affine_vi(matrix, vector(offset)?, domain.inner.clone()).map_err(py_err)?;
        Ok(PyBifunction { inner })
    }

    fn eval(&self, x: Vec<f64>, y: Vec<f64>) -> PyResult<f64> {
        self.inner.eval(&vector(x)?, &vector(y)?).map_err(py_err)
    }

    #[pyo3(signature = (seed = 0, n_samples = 1000, tol = 1e-8))]
    fn check_axioms<'py>(&self, py: Python<'py>, seed: u64, n_samples: usize, tol: f64) -> PyResult<Bound<'py, PyAny>> {
        let report = check_axioms(&self.inner, seed, n_samples, &default_t_grid(), tol).map_err(py_err)?;
        to_py(py, &report)
    }

    fn to_json(&self) -> PyResult<String> {
        dump(&self.inner)
    }
}

/// `T_r x` over `set` (the bifunction's domain when omitted).
#[pyfunction]
#[pyo3(signature = (f, r, x, set = None, strategy_json = None))]
fn resolvent<'py>(
    py: Python<'py>,
    f: &PyBifunction,
    r: f64,
    x: Vec<f64>,
    set: Option<&PyConvexSet>,
    strategy_json: Option<&str>,
) -> PyResult<Bound<'py, PyAny>> {
    let set = set.map_or_else(|| f.inner.domain.clone(), |s| s.inner.clone());
    let mut request = ResolventRequest::new(f.inner.clone(), set, r, vector(x)?);
    if let Some(text) = strategy_json {
        request.strategy = parse::<Strategy>(text)?;
    }
    let result = request.solve().map_err(py_err)?;
    to_py(py, &result)
}

#[pyclass(name = "Problem", module = "hybrid_ep", frozen)]
pub struct PyProblem {
    inner: Problem,
}

#[pymethods]
impl PyProblem {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyProblem { inner: parse(text)? })
    }

    fn to_json(&self) -> PyResult<String> {
        dump(&self.inner)
    }
}

#[pyclass(name = "Trace", module = "hybrid_ep", frozen)]
pub struct PyTrace {
    inner: Trace,
}

#[pymethods]
impl PyTrace {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyTrace { inner: parse(text)? })
    }

    #[getter]
    fn status(&self) -> String {
        format!("{:?}", self.inner.status)
    }

    #[getter]
    fn final_x(&self) -> Vec<f64> {
        self.inner.final_x.as_slice().to_vec()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn records<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.records)
    }

    /// `x_1, ..., x_N` and the next iterate; `None` for thin traces.
    fn iterates(&self) -> Option<Vec<Vec<f64>>> {
        self.inner
            .iterates()
            .map(|xs| xs.into_iter().map(|x| x.as_slice().to_vec()).collect())
    }

    fn to_json(&self) -> PyResult<String> {
        dump(&self.inner)
    }

    fn to_csv(&self) -> String {
        trace_csv(&self.inner)
    }
}

fn scheme(name: &str) -> PyResult<Scheme> {
    Scheme::from_name(name).ok_or_else(|| py_err(format!("unknown scheme {name:?}")))
}

/// Runs `scheme_name` on `problem`. `schedule_json` uses the same layout as
/// experiment spec files.
#[pyfunction]
#[pyo3(signature = (problem, scheme_name, schedule_json, x1, max_iter = 10_000, tol = 1e-8, thin = false))]
fn run(
    problem: &PyProblem,
    scheme_name: &str,
    schedule_json: &str,
    x1: Vec<f64>,
    max_iter: usize,
    tol: f64,
    thin: bool,
) -> PyResult<PyTrace> {
    let schedule: Schedule = parse(schedule_json)?;
    let stop = StopRule::new(max_iter, tol).map_err(py_err)?;
    let mode = if thin { TraceMode::Thin } else { TraceMode::Full };
    let inner = run_with_mode(&problem.inner, scheme(scheme_name)?, &schedule, &stop, &vector(x1)?, mode)
        .map_err(py_err)?;
    Ok(PyTrace { inner })
}

/// Runs an experiment spec (the `run` subcommand's input) in memory.
#[pyfunction]
fn run_spec(spec_json: &str) -> PyResult<(PyProblem, PyTrace)> {
    let spec: ExperimentSpec = parse(spec_json)?;
    let name = spec.scheme.ok_or_else(|| py_err("spec has no `scheme`"))?;
    let inner = run_with_mode(&spec.problem, name, &spec.schedule, &spec.stop, &spec.x1, spec.trace_mode)
        .map_err(py_err)?;
    Ok((PyProblem { inner: spec.problem }, PyTrace { inner }))
}

#[pyfunction]
#[pyo3(signature = (trace, problem, seed = 0, stop_tol = None))]
fn certify<'py>(
    py: Python<'py>,
    trace: &PyTrace,
    problem: &PyProblem,
    seed: u64,
    stop_tol: Option<f64>,
) -> PyResult<Bound<'py, PyAny>> {
    let opts = CertifyOptions {
        seed,
        stop_tol,
        ..CertifyOptions::default()
    };
    to_py(py, &certify_trace(&trace.inner, &problem.inner, &opts))
}

pub fn register(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("HybridEpError", m.py().get_type::<HybridEpError>())?;
    m.add_class::<PyConvexSet>()?;
    m.add_class::<PyMapping>()?;
    m.add_class::<PyBifunction>()?;
    m.add_class::<PyProblem>()?;
    m.add_class::<PyTrace>()?;
    m.add_function(wrap_pyfunction!(inner, m)?)?;
    m.add_function(wrap_pyfunction!(norm, m)?)?;
    m.add_function(wrap_pyfunction!(combine, m)?)?;
    m.add_function(wrap_pyfunction!(resolvent, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(run_spec, m)?)?;
    m.add_function(wrap_pyfunction!(certify, m)?)?;
    Ok(())
}

#[pymodule(name = "hybrid_ep")]
fn hybrid_ep_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    register(m)
}
