//! Python bindings. Datasets cross the boundary as lists of float rows; reports
//! come back as plain dicts with the same keys as the JSON reports.

use kdecomp::codec::{self, CompressorBackend, QuantizedScalar, TupleDataset};
use kdecomp::decomposition::{self, DecompositionConfig, ProjectionSpec};
use kdecomp::lightcone::{self, CausalRegion, FilterMode, RegionTag};
use kdecomp::{datasets, estimator};
use pyo3::exceptions::{PyKeyError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyBytes, PyDict, PyList};
use serde_json::Value;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn backend(id: Option<&str>, level: Option<u32>) -> PyResult<CompressorBackend> {
    let id = id.unwrap_or(codec::DEFAULT_BACKEND_ID);
    match level {
        Some(level) => Ok(CompressorBackend::new(id, level)),
        None => CompressorBackend::with_default_level(id).map_err(err),
    }
}

fn scalar(v: f64) -> PyResult<QuantizedScalar> {
    QuantizedScalar::from_f64(v).map_err(err)
}

fn to_py(py: Python<'_>, v: &Value) -> PyResult<Py<PyAny>> {
    Ok(match v {
        Value::Null => py.None(),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any().unbind(),
        Value::Number(n) => match n.as_u64() {
            Some(u) => u.into_pyobject(py)?.into_any().unbind(),
            None => match n.as_i64() {
                Some(i) => i.into_pyobject(py)?.into_any().unbind(),
                None => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any().unbind(),
            },
        },
        Value::String(s) => s.into_pyobject(py)?.into_any().unbind(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(to_py(py, item)?)?;
            }
            list.into_any().unbind()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, item) in map {
                dict.set_item(k, to_py(py, item)?)?;
            }
            dict.into_any().unbind()
        }
    })
}

fn report<T: serde::Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    to_py(py, &serde_json::to_value(value).map_err(err)?)
}

/// An ordered table of fixed-point scalars.
#[pyclass(name = "Dataset", frozen)]
struct PyDataset {
    inner: TupleDataset,
}

#[pymethods]
impl PyDataset {
    #[new]
    #[pyo3(signature = (rows, n_cols=None))]
    fn new(rows: Vec<Vec<f64>>, n_cols: Option<usize>) -> PyResult<Self> {
        let n = n_cols
            .or_else(|| rows.first().map(Vec::len))
            .ok_or_else(|| PyValueError::new_err("n_cols is required for an empty dataset"))?;
        Ok(Self {
            inner: TupleDataset::from_f64_rows(n, rows).map_err(err)?,
        })
    }

    /// Reads a CSV or JSON file.
    #[staticmethod]
    #[pyo3(signature = (path, header=false))]
    fn read(path: &str, header: bool) -> PyResult<Self> {
        Ok(Self {
            inner: codec::read_dataset(path.as_ref(), header).map_err(err)?,
        })
    }

    /// Builds a dataset from a generator spec such as `hypercube:n=10,m=500`.
    #[staticmethod]
    #[pyo3(signature = (spec, seed=0))]
    fn generate(spec: &str, seed: u64) -> PyResult<Self> {
        let spec: datasets::GeneratorSpec = spec.parse().map_err(PyValueError::new_err)?;
        Ok(Self {
            inner: spec.generate(seed).map_err(err)?,
        })
    }

    #[getter]
    fn n_cols(&self) -> usize {
        self.inner.n_cols()
    }

    #[getter]
    fn m_rows(&self) -> usize {
        self.inner.m_rows()
    }

    fn rows(&self) -> Vec<Vec<f64>> {
        self.inner
            .rows()
            .map(|r| r.iter().map(|q| q.to_f64()).collect())
            .collect()
    }

    /// Self-delimited canonical encoding.
    fn encode<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        PyBytes::new(py, codec::encode(&self.inner).payload())
    }

    /// Removes the given 1-based columns.
    fn project(&self, drop: Vec<usize>) -> PyResult<Self> {
        let spec = ProjectionSpec::new(drop).map_err(err)?;
        Ok(Self {
            inner: decomposition::project(&self.inner, &spec).map_err(err)?,
        })
    }

    fn __len__(&self) -> usize {
        self.inner.m_rows()
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!(
            "Dataset(m_rows={}, n_cols={})",
            self.inner.m_rows(),
            self.inner.n_cols()
        )
    }
}

/// Compressed and raw byte lengths of a self-delimited blob.
#[pyclass(name = "ComplexityEstimate", frozen, get_all)]
struct PyEstimate {
    k_hat: u64,
    raw_len: u64,
    backend_id: String,
}

#[pymethods]
impl PyEstimate {
    fn density(&self) -> f64 {
        self.k_hat as f64 / self.raw_len as f64
    }

    fn __repr__(&self) -> String {
        format!(
            "ComplexityEstimate(k_hat={}, raw_len={}, backend_id={:?})",
            self.k_hat, self.raw_len, self.backend_id
        )
    }
}

impl From<estimator::ComplexityEstimate> for PyEstimate {
    fn from(e: estimator::ComplexityEstimate) -> Self {
        Self {
            k_hat: e.k_hat,
            raw_len: e.raw_len,
            backend_id: e.backend_id,
        }
    }
}

#[pyfunction]
#[pyo3(signature = (dataset, backend=None, level=None))]
fn estimate(dataset: &PyDataset, backend: Option<&str>, level: Option<u32>) -> PyResult<PyEstimate> {
    let b = self::backend(backend, level)?;
    Ok(estimator::estimate(&dataset.inner, &b).map_err(err)?.into())
}

#[pyfunction]
#[pyo3(signature = (data, backend=None, level=None))]
fn estimate_bytes(data: &[u8], backend: Option<&str>, level: Option<u32>) -> PyResult<PyEstimate> {
    let b = self::backend(backend, level)?;
    Ok(estimator::estimate_bytes(data, &b).map_err(err)?.into())
}

#[pyfunction]
#[pyo3(signature = (first, second, backend=None, level=None))]
fn estimate_joint(
    first: &PyDataset,
    second: &PyDataset,
    backend: Option<&str>,
    level: Option<u32>,
) -> PyResult<PyEstimate> {
    let b = self::backend(backend, level)?;
    Ok(estimator::estimate_joint(&first.inner, &second.inner, &b)
        .map_err(err)?
        .into())
}

#[pyfunction]
fn canonical_family(n: usize) -> PyResult<Vec<Vec<usize>>> {
    Ok(decomposition::canonical_family(n)
        .map_err(err)?
        .into_iter()
        .map(|p| p.dropped_cols)
        .collect())
}

#[pyfunction]
#[pyo3(signature = (dataset, coefficients=None, program_bound=None, slack=(8.0, 64.0), backend=None, level=None))]
fn verify_decomposition(
    py: Python<'_>,
    dataset: &PyDataset,
    coefficients: Option<Vec<f64>>,
    program_bound: Option<f64>,
    slack: (f64, f64),
    backend: Option<&str>,
    level: Option<u32>,
) -> PyResult<Py<PyAny>> {
    let b = self::backend(backend, level)?;
    let cfg = DecompositionConfig {
        coefficients,
        program_bound,
        slack_log: slack.0,
        slack_const: slack.1,
    };
    let r = py
        .detach(|| decomposition::verify_decomposition(&dataset.inner, &cfg, &b))
        .map_err(err)?;
    report(py, &r)
}

fn region(tag: &str) -> PyResult<RegionTag> {
    tag.parse().map_err(PyKeyError::new_err)
}

/// `"inside"`, `"on"` or `"outside"` for an `(x, y, z, t)` point.
#[pyfunction]
#[pyo3(signature = (point, epsilon=0.0))]
fn classify(point: (f64, f64, f64, f64), epsilon: f64) -> PyResult<&'static str> {
    let p = [scalar(point.0)?, scalar(point.1)?, scalar(point.2)?, scalar(point.3)?];
    Ok(lightcone::classify(&p, scalar(epsilon)?).as_str())
}

#[pyfunction]
fn generate_cloud(m: usize, seed: u64) -> PyResult<PyDataset> {
    Ok(PyDataset {
        inner: lightcone::generate_cloud(m, seed).map_err(err)?.points,
    })
}

#[pyfunction]
#[pyo3(signature = (m, seed, region="full", epsilon=0.0, backend=None, level=None))]
fn lightcone_study(
    py: Python<'_>,
    m: usize,
    seed: u64,
    region: &str,
    epsilon: f64,
    backend: Option<&str>,
    level: Option<u32>,
) -> PyResult<Py<PyAny>> {
    let b = self::backend(backend, level)?;
    let r = CausalRegion::new(self::region(region)?, scalar(epsilon)?);
    let rep = py
        .detach(|| {
            let cloud = lightcone::generate_cloud(m, seed)?;
            lightcone::study(&cloud, &r, &b)
        })
        .map_err(err)?;
    report(py, &rep)
}

/// Runs the low-pass (`mode="low"`) or high-pass (`mode="high"`) filter.
#[pyfunction]
#[pyo3(signature = (mode, threshold, m, seed, epsilon=0.0, backend=None, level=None))]
#[allow(clippy::too_many_arguments)]
fn complexity_filter(
    py: Python<'_>,
    mode: &str,
    threshold: u64,
    m: usize,
    seed: u64,
    epsilon: f64,
    backend: Option<&str>,
    level: Option<u32>,
) -> PyResult<Py<PyAny>> {
    let mode: FilterMode = mode.parse().map_err(PyValueError::new_err)?;
    let b = self::backend(backend, level)?;
    let eps = scalar(epsilon)?;
    let out = py
        .detach(|| {
            let cloud = lightcone::generate_cloud(m, seed)?;
            lightcone::complexity_filter(mode, &cloud, eps, threshold, &b)
        })
        .map_err(err)?;
    report(py, &out)
}

#[pyfunction]
fn backends() -> Vec<&'static str> {
    codec::Registry::global().ids().collect()
}

#[pymodule]
#[pyo3(name = "kdecomp")]
fn kdecomp_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyDataset>()?;
    m.add_class::<PyEstimate>()?;
    m.add_function(wrap_pyfunction!(estimate, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_bytes, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_joint, m)?)?;
    m.add_function(wrap_pyfunction!(canonical_family, m)?)?;
    m.add_function(wrap_pyfunction!(verify_decomposition, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(generate_cloud, m)?)?;
    m.add_function(wrap_pyfunction!(lightcone_study, m)?)?;
    m.add_function(wrap_pyfunction!(complexity_filter, m)?)?;
    m.add_function(wrap_pyfunction!(backends, m)?)?;
    Ok(())
}
