//! Python bindings for `snipe`.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use snipe::estimators::{self, unit_statistics};
use snipe::harness::config::ExperimentConfig;
use snipe::inference::{self, EstimateReport, VarianceMode};
use snipe::outcomes::{self, PotentialOutcomes};
use snipe::randomization::{self, Assignment};

fn to_py(e: snipe::Error) -> PyErr {
    if e.exit_code() == 3 {
        PyRuntimeError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn assignment(z: Vec<bool>, p: f64) -> PyResult<Assignment> {
    Assignment::new(z, p).map_err(to_py)
}

/// Undirected simple graph on nodes 0..n.
#[pyclass(name = "Graph", module = "pysnipe", frozen)]
struct PyGraph {
    inner: snipe::Graph,
}

#[pymethods]
impl PyGraph {
    /// Self-loops and duplicate edges are dropped.
    #[new]
    fn new(n: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        let (inner, _) = snipe::Graph::from_edges(n, edges).map_err(to_py)?;
        Ok(PyGraph { inner })
    }

    #[staticmethod]
    fn erdos_renyi(n: usize, mean_degree: f64, seed: u64) -> PyResult<Self> {
        let inner = snipe::graph::erdos_renyi(n, mean_degree, seed).map_err(to_py)?;
        Ok(PyGraph { inner })
    }

    #[staticmethod]
    fn ring(n: usize, degree: usize) -> PyResult<Self> {
        let inner = snipe::Graph::ring(n, degree).map_err(to_py)?;
        Ok(PyGraph { inner })
    }

    /// Read a whitespace-separated edge list.
    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        let (inner, _) = snipe::graph::load_edge_list(path).map_err(to_py)?;
        Ok(PyGraph { inner })
    }

    fn save(&self, path: &str) -> PyResult<()> {
        snipe::graph::save_edge_list(&self.inner, path).map_err(to_py)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges().collect()
    }

    /// Sorted closed neighborhood, `i` included.
    fn closed_neighborhood(&self, i: usize) -> PyResult<Vec<usize>> {
        self.inner.closed_neighborhood(i).map_err(to_py)
    }

    fn __len__(&self) -> usize {
        self.inner.n()
    }

    fn __repr__(&self) -> String {
        format!("Graph(n={}, edges={})", self.inner.n(), self.inner.edge_count())
    }
}

/// Exposure-model instance drawn on a graph.
#[pyclass(name = "ExposureModel", module = "pysnipe", frozen)]
struct PyExposureModel {
    inner: outcomes::ExposureModel,
}

#[pymethods]
impl PyExposureModel {
    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    /// Outcomes under assignment `z`.
    fn outcomes(&self, z: Vec<bool>) -> PyResult<Vec<f64>> {
        self.inner.outcomes(&z).map_err(to_py)
    }

    /// (1/n) Σ_i Y_i(1) − Y_i(0).
    fn tte(&self) -> PyResult<f64> {
        outcomes::ground_truth_tte(&self.inner).map_err(to_py)
    }
}

#[pyfunction]
fn generate_instance(graph: &PyGraph, gamma1: f64, gamma2: f64, link: &str, seed: u64) -> PyResult<PyExposureModel> {
    let link: outcomes::Link = link.parse().map_err(to_py)?;
    let inner = outcomes::generate_instance(&graph.inner, gamma1, gamma2, link, seed).map_err(to_py)?;
    Ok(PyExposureModel { inner })
}

#[pyfunction]
fn bernoulli_assign(n: usize, p: f64, seed: u64) -> PyResult<Vec<bool>> {
    Ok(randomization::bernoulli_assign(n, p, seed).map_err(to_py)?.z().to_vec())
}

#[pyfunction]
fn pseudo_inverse(graph: &PyGraph, y: Vec<f64>, z: Vec<bool>, p: f64) -> PyResult<f64> {
    estimators::pseudo_inverse(&graph.inner, &y, &assignment(z, p)?).map_err(to_py)
}

#[pyfunction]
fn difference_in_means(y: Vec<f64>, z: Vec<bool>, p: f64) -> PyResult<f64> {
    estimators::difference_in_means(&y, &assignment(z, p)?).map_err(to_py)
}

#[pyfunction]
fn interference_contrast(graph: &PyGraph, y: Vec<f64>, z: Vec<bool>, p: f64) -> PyResult<f64> {
    estimators::interference_contrast(&graph.inner, &y, &assignment(z, p)?).map_err(to_py)
}

/// Returns (value, raw, clipped). `mode` is "full" for the pseudo-inverse
/// estimate or "no_self" for the contrast.
#[pyfunction]
#[pyo3(signature = (graph, y, z, p, mode = "full"))]
fn variance_estimate(graph: &PyGraph, y: Vec<f64>, z: Vec<bool>, p: f64, mode: &str) -> PyResult<(f64, f64, bool)> {
    let z = assignment(z, p)?;
    let s = unit_statistics(&graph.inner, &y, &z).map_err(to_py)?;
    let (mode, point) = match mode {
        "full" => (VarianceMode::Full, s.mean_t()),
        "no_self" => (VarianceMode::NoSelf, s.mean_t_prime()),
        other => return Err(PyValueError::new_err(format!("mode must be 'full' or 'no_self', got {other:?}"))),
    };
    let v = inference::variance_estimate(&graph.inner, &s, point, mode).map_err(to_py)?;
    Ok((v.value, v.raw, v.clipped))
}

fn report_dict<'py>(py: Python<'py>, r: &EstimateReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("estimator", r.estimator.name())?;
    d.set_item("point", r.point)?;
    d.set_item("var_hat", r.var_hat)?;
    d.set_item("ci_low", r.ci_low)?;
    d.set_item("ci_high", r.ci_high)?;
    d.set_item("p_normal", r.p_normal)?;
    d.set_item("p_chebyshev", r.p_chebyshev)?;
    d.set_item("n", r.n)?;
    d.set_item("d_max", r.d_max)?;
    d.set_item("clipped", r.clipped)?;
    Ok(d)
}

/// DIM, pseudo-inverse and contrast reports for one metric.
#[pyfunction]
#[pyo3(signature = (graph, y, z, p, alpha = 0.05))]
fn analyze<'py>(
    py: Python<'py>,
    graph: &PyGraph,
    y: Vec<f64>,
    z: Vec<bool>,
    p: f64,
    alpha: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let z = assignment(z, p)?;
    let r = inference::MetricReport::compute("y", &graph.inner, &y, &z, alpha).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("dim", report_dict(py, &r.dim)?)?;
    d.set_item("pseudo_inverse", report_dict(py, &r.pi)?)?;
    d.set_item("contrast", report_dict(py, &r.contrast)?)?;
    Ok(d)
}

/// Run an experiment from `key -> value` settings; returns written paths.
#[pyfunction]
fn run_experiment(settings: Vec<(String, String)>) -> PyResult<Vec<String>> {
    let cfg = ExperimentConfig::from_pairs(settings.iter().map(|(k, v)| (k.as_str(), v.as_str())), None)
        .map_err(to_py)?;
    let summary = snipe::harness::run(&cfg).map_err(to_py)?;
    Ok(summary.outputs.iter().map(|p| p.display().to_string()).collect())
}

#[pymodule]
fn pysnipe(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<PyExposureModel>()?;
    m.add_function(wrap_pyfunction!(generate_instance, m)?)?;
    m.add_function(wrap_pyfunction!(bernoulli_assign, m)?)?;
    m.add_function(wrap_pyfunction!(pseudo_inverse, m)?)?;
    m.add_function(wrap_pyfunction!(difference_in_means, m)?)?;
    m.add_function(wrap_pyfunction!(interference_contrast, m)?)?;
    m.add_function(wrap_pyfunction!(variance_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
