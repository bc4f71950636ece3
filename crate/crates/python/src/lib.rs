//! Python bindings for the divsel selector.
//!
//! The Rust half (`BoundSession`, `bound_run`) carries no selection logic of
//! its own and is usable without an interpreter. The `divsel` Python module
//! wraps it and maps error classes onto exception types.

use std::path::Path;

use divsel::config::RunConfig;
use divsel::manifest::{load_manifest, DatasetManifest, ManifestFormat};
use divsel::{run_schedule, Error, ErrorClass, SelectionReport};
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::PyString;

/// A core error tagged with the class the CLI would report for it.
#[derive(Debug)]
pub struct BoundError {
    pub class: ErrorClass,
    pub error: Error,
}

impl BoundError {
    fn new(class: ErrorClass, error: Error) -> Self {
        BoundError { class, error }
    }
}

impl From<Error> for BoundError {
    fn from(error: Error) -> Self {
        BoundError::new(error.class(), error)
    }
}

pub type BoundResult<T> = std::result::Result<T, BoundError>;

/// A loaded manifest, its resolved config and the last report.
#[derive(Debug, Clone)]
pub struct BoundSession {
    manifest: DatasetManifest,
    config: RunConfig,
    report: Option<SelectionReport>,
}

impl BoundSession {
    /// Loads the manifest (format from the extension) and parses the config
    /// JSON, with the same error classes as `divsel select`.
    pub fn open(manifest_path: &Path, config_json: &str) -> BoundResult<Self> {
        let config = RunConfig::from_json(config_json).map_err(|e| BoundError::new(ErrorClass::Config, e))?;
        let manifest = load_manifest(manifest_path, ManifestFormat::from_path(manifest_path))
            .map_err(|e| BoundError::new(ErrorClass::Data, e))?;
        Ok(BoundSession { manifest, config, report: None })
    }

    pub fn run(&mut self) -> BoundResult<&SelectionReport> {
        let report = run_schedule(&self.manifest, &self.config)?;
        Ok(self.report.insert(report))
    }

    /// Replaces feature vectors by id. An empty id list changes nothing.
    pub fn update_features(&mut self, ids: &[String], rows: &[Vec<f64>]) -> BoundResult<()> {
        if ids.is_empty() && rows.is_empty() {
            return Ok(());
        }
        self.manifest = self.manifest.with_features(ids, rows)?;
        Ok(())
    }

    pub fn report(&self) -> Option<&SelectionReport> {
        self.report.as_ref()
    }

    pub fn manifest(&self) -> &DatasetManifest {
        &self.manifest
    }
}

/// Per-cycle id lists for one schedule.
pub fn bound_run(manifest_path: &Path, config_json: &str) -> BoundResult<Vec<Vec<String>>> {
    let mut session = BoundSession::open(manifest_path, config_json)?;
    Ok(session.run()?.batches())
}

create_exception!(divsel, DivselError, PyException, "Base class for divsel errors.");
create_exception!(divsel, ConfigError, DivselError, "Invalid configuration or budget.");
create_exception!(divsel, DataError, DivselError, "Invalid or unusable manifest data.");
create_exception!(divsel, RuntimeError, DivselError, "I/O or internal failure.");

fn to_py(err: BoundError) -> PyErr {
    let message = format!("{}: {}", err.error.kind(), err.error);
    match err.class {
        ErrorClass::Config => ConfigError::new_err(message),
        ErrorClass::Data => DataError::new_err(message),
        ErrorClass::Runtime => RuntimeError::new_err(message),
    }
}

/// Accepts a JSON string or any object `json.dumps` can serialize.
fn config_text(config: &Bound<'_, PyAny>) -> PyResult<String> {
    if let Ok(s) = config.cast::<PyString>() {
        return Ok(s.to_string());
    }
    let json = config.py().import("json")?;
    json.call_method1("dumps", (config,))?.extract()
}

#[pyclass(name = "Session", unsendable)]
struct PySession {
    inner: BoundSession,
}

#[pymethods]
impl PySession {
    #[new]
    fn new(manifest_path: &str, config: &Bound<'_, PyAny>) -> PyResult<Self> {
        let inner = BoundSession::open(Path::new(manifest_path), &config_text(config)?).map_err(to_py)?;
        Ok(PySession { inner })
    }

    /// Runs the full schedule and returns the per-cycle id lists.
    fn run(&mut self) -> PyResult<Vec<Vec<String>>> {
        Ok(self.inner.run().map_err(to_py)?.batches())
    }

    fn update_features(&mut self, ids: Vec<String>, features: Vec<Vec<f64>>) -> PyResult<()> {
        self.inner.update_features(&ids, &features).map_err(to_py)
    }

    /// Report JSON of the last run, or None before the first run.
    fn get_report(&self) -> Option<String> {
        self.inner.report().map(SelectionReport::to_json)
    }

    #[getter]
    fn num_samples(&self) -> usize {
        self.inner.manifest().len()
    }
}

#[pyfunction]
fn load(manifest_path: &str, config: &Bound<'_, PyAny>) -> PyResult<PySession> {
    PySession::new(manifest_path, config)
}

#[pyfunction]
fn run(manifest_path: &str, config: &Bound<'_, PyAny>) -> PyResult<Vec<Vec<String>>> {
    bound_run(Path::new(manifest_path), &config_text(config)?).map_err(to_py)
}

#[pymodule]
#[pyo3(name = "divsel")]
fn divsel_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("__version__", divsel::VERSION)?;
    m.add("DivselError", py.get_type::<DivselError>())?;
    m.add("ConfigError", py.get_type::<ConfigError>())?;
    m.add("DataError", py.get_type::<DataError>())?;
    m.add("RuntimeError", py.get_type::<RuntimeError>())?;
    m.add_class::<PySession>()?;
    m.add_function(wrap_pyfunction!(load, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    Ok(())
}
