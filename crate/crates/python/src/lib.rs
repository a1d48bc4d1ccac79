//! Python bindings. Rationals cross the boundary as "num/den" strings and
//! structured results as plain dicts and lists.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use serde_json::Value;

use ogj::families::{self, Pools};
use ogj::graph::default_ids;
use ogj::iso::{self, map_json};
use ogj::sweep::{run_suite, Suite, SweepConfig};
use ogj::{rational, GraphDocument, LabelValue, OgjError, Scheme, SimpleGraph, WeightedGraph};

fn err(e: OgjError) -> PyErr {
    match e {
        OgjError::Io(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn to_py(py: Python<'_>, v: &Value) -> PyResult<Py<PyAny>> {
    let json = py.import("json")?;
    Ok(json.call_method1("loads", (v.to_string(),))?.unbind())
}

fn scheme(name: &str) -> PyResult<Scheme> {
    name.parse().map_err(err)
}

/// A normalized weighted graph with primary labels.
#[pyclass(name = "Graph", frozen)]
struct PyGraph {
    inner: WeightedGraph,
}

#[pymethods]
impl PyGraph {
    /// Builds a graph from `(u, v, weight)` triples; weights are scaled to sum to one.
    #[new]
    #[pyo3(signature = (n, edges, labels = None))]
    fn new(n: usize, edges: Vec<(usize, usize, String)>, labels: Option<Vec<i64>>) -> PyResult<Self> {
        let edges = edges
            .into_iter()
            .map(|(u, v, w)| Ok((u, v, rational::parse(&w)?)))
            .collect::<ogj::Result<Vec<_>>>()
            .map_err(err)?;
        let labels = match labels {
            Some(ls) => ls.into_iter().map(LabelValue::Int).collect(),
            None => vec![LabelValue::unit(); n],
        };
        let inner = WeightedGraph::from_raw_edges(default_ids(n), labels, &edges).map_err(err)?;
        Ok(PyGraph { inner })
    }

    /// Parses a JSON graph document.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let doc: GraphDocument = serde_json::from_str(text).map_err(|e| err(e.into()))?;
        Ok(PyGraph { inner: doc.to_graph().map_err(err)? })
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&GraphDocument::from_graph(&self.inner)).map_err(|e| err(e.into()))
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn ids(&self) -> Vec<String> {
        self.inner.ids().to_vec()
    }

    fn weight(&self, u: usize, v: usize) -> PyResult<String> {
        if u >= self.inner.n() || v >= self.inner.n() {
            return Err(PyValueError::new_err("vertex index out of range"));
        }
        Ok(rational::render(&self.inner.weight(u, v)))
    }

    fn marginal(&self) -> Vec<String> {
        self.inner.marginal().iter().map(rational::render).collect()
    }

    fn edges(&self) -> Vec<(usize, usize, String)> {
        self.inner.edges().into_iter().map(|(u, v, w)| (u, v, rational::render(&w))).collect()
    }

    /// `sigma` maps each vertex of this graph to its index in the result.
    fn permute(&self, sigma: Vec<usize>) -> PyResult<Self> {
        Ok(PyGraph { inner: self.inner.permute(&sigma).map_err(err)? })
    }

    fn is_connected(&self) -> bool {
        self.inner.is_connected()
    }

    fn __len__(&self) -> usize {
        self.inner.n()
    }

    fn __repr__(&self) -> String {
        format!("Graph(n={}, edges={})", self.inner.n(), self.inner.edges().len())
    }
}

/// Optimal joining cost under the named labeling scheme.
#[pyfunction]
#[pyo3(signature = (g, h, scheme = "primary"))]
fn cost(py: Python<'_>, g: &PyGraph, h: &PyGraph, scheme: &str) -> PyResult<String> {
    let s = self::scheme(scheme)?;
    let rho = py.detach(|| iso::ogj_cost(&g.inner, &h.inner, &s)).map_err(err)?;
    Ok(rational::render(&rho))
}

/// Verdict dict with keys rho, verdict, isomorphisms, scheme, flags.
#[pyfunction]
#[pyo3(signature = (g, h, scheme = "primary"))]
fn detect(py: Python<'_>, g: &PyGraph, h: &PyGraph, scheme: &str) -> PyResult<Py<PyAny>> {
    let s = self::scheme(scheme)?;
    let d = py.detach(|| iso::detect(&g.inner, &h.inner, &s)).map_err(err)?;
    let flags = serde_json::json!({ "complete": d.complete, "vertices_examined": d.vertices_examined });
    to_py(py, &d.to_json(&g.inner, &h.inner, flags))
}

/// Isomorphisms as lists `f` with `f[u] = v`.
#[pyfunction]
#[pyo3(signature = (g, h, scheme = "primary"))]
fn identify(py: Python<'_>, g: &PyGraph, h: &PyGraph, scheme: &str) -> PyResult<Vec<Vec<usize>>> {
    let s = self::scheme(scheme)?;
    let id = py.detach(|| iso::identify(&g.inner, &h.inner, &s)).map_err(err)?;
    if !id.complete {
        return Err(PyRuntimeError::new_err("enumeration cap reached"));
    }
    Ok(id.isomorphisms)
}

/// Whether `f` is a bijection preserving labels and weights.
#[pyfunction]
fn verify_isomorphism(g: &PyGraph, h: &PyGraph, f: Vec<usize>) -> bool {
    iso::verify_isomorphism(&g.inner, &h.inner, &f).is_ok()
}

/// Whether color refinement distinguishes the underlying simple graphs.
#[pyfunction]
fn wl_distinguishes(g: &PyGraph, h: &PyGraph) -> bool {
    iso::wl_test(&SimpleGraph::from_weighted(&g.inner), &SimpleGraph::from_weighted(&h.inner)).is_distinguished()
}

#[pyfunction]
#[pyo3(signature = (n, seed = 0, weights = 1, labels = 1))]
fn random_tree(n: usize, seed: u64, weights: i64, labels: i64) -> PyResult<PyGraph> {
    Ok(PyGraph { inner: families::gen_tree(n, &Pools::integers(weights, labels), seed).map_err(err)? })
}

#[pyfunction]
#[pyo3(signature = (cycles, seed = 0, weights = 1))]
fn random_flower(cycles: Vec<usize>, seed: u64, weights: i64) -> PyResult<PyGraph> {
    Ok(PyGraph { inner: families::gen_flower(&cycles, &Pools::integers(weights, 1), seed).map_err(err)?.0 })
}

/// Runs a property sweep and returns its report dict.
#[pyfunction]
#[pyo3(signature = (suite, trials = None, seed = 0, jobs = None))]
fn sweep(py: Python<'_>, suite: &str, trials: Option<usize>, seed: u64, jobs: Option<usize>) -> PyResult<Py<PyAny>> {
    let suite: Suite = suite.parse().map_err(err)?;
    let mut cfg = SweepConfig::for_suite(suite, seed);
    cfg.trials = trials.unwrap_or(cfg.trials);
    cfg.jobs = jobs;
    let report = py.detach(|| run_suite(suite, &cfg)).map_err(err)?;
    to_py(py, &serde_json::to_value(&report).map_err(|e| err(e.into()))?)
}

/// Maps keyed by vertex id, as in the CLI verdict format.
#[pyfunction]
fn isomorphism_dicts<'py>(py: Python<'py>, g: &PyGraph, h: &PyGraph, maps: Vec<Vec<usize>>) -> PyResult<Vec<Bound<'py, PyDict>>> {
    maps.iter()
        .map(|f| {
            let d = PyDict::new(py);
            if let Value::Object(m) = map_json(&g.inner, &h.inner, f) {
                for (k, v) in m {
                    d.set_item(k, v.as_str().unwrap_or_default())?;
                }
            }
            Ok(d)
        })
        .collect()
}

#[pymodule]
#[pyo3(name = "ogj")]
fn ogj_python(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_function(wrap_pyfunction!(cost, m)?)?;
    m.add_function(wrap_pyfunction!(detect, m)?)?;
    m.add_function(wrap_pyfunction!(identify, m)?)?;
    m.add_function(wrap_pyfunction!(verify_isomorphism, m)?)?;
    m.add_function(wrap_pyfunction!(wl_distinguishes, m)?)?;
    m.add_function(wrap_pyfunction!(random_tree, m)?)?;
    m.add_function(wrap_pyfunction!(random_flower, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(isomorphism_dicts, m)?)?;
    Ok(())
}
