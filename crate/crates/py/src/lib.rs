//! Python bindings. Results come back as plain dicts and lists, decoded from
//! the same JSON the command-line tool prints.

use direction_space::commands::{self, Outcome};
use direction_space::instances::AnyInstance;
use direction_space::{report, verify, TruncationProfile};
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::PyModule;

create_exception!(direction_space_py, DirectionSpaceError, PyException);

fn to_py(e: direction_space::Error) -> PyErr {
    DirectionSpaceError::new_err(format!("{}: {}", e.kind(), e))
}

fn decode<'py>(py: Python<'py>, v: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (v.to_string(),))
}

/// Truncation bounds: ball radius, power bound, exponent bound, end threshold, seed.
#[pyclass(name = "Profile", from_py_object)]
#[derive(Clone)]
struct PyProfile {
    inner: TruncationProfile,
}

#[pymethods]
impl PyProfile {
    #[new]
    #[pyo3(signature = (horizon=8, power_bound=40, exponent_bound=64, end_threshold=5, seed=0))]
    fn new(
        horizon: usize,
        power_bound: usize,
        exponent_bound: usize,
        end_threshold: u64,
        seed: u64,
    ) -> PyResult<Self> {
        let inner = TruncationProfile {
            horizon,
            power_bound,
            exponent_bound,
            end_threshold,
            seed,
        };
        inner.validate().map_err(to_py)?;
        Ok(PyProfile { inner })
    }

    #[getter]
    fn horizon(&self) -> usize {
        self.inner.horizon
    }
    #[getter]
    fn power_bound(&self) -> usize {
        self.inner.power_bound
    }
    #[getter]
    fn exponent_bound(&self) -> usize {
        self.inner.exponent_bound
    }
    #[getter]
    fn end_threshold(&self) -> u64 {
        self.inner.end_threshold
    }
    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }

    fn __repr__(&self) -> String {
        let p = &self.inner;
        format!(
            "Profile(horizon={}, power_bound={}, exponent_bound={}, end_threshold={}, seed={})",
            p.horizon, p.power_bound, p.exponent_bound, p.end_threshold, p.seed
        )
    }
}

/// A graph or group instance: `tree:3`, `example:2`, `ladder:2`, a JSON description or a file path.
#[pyclass(name = "Instance")]
struct PyInstance {
    inner: AnyInstance,
    profile: TruncationProfile,
}

impl PyInstance {
    fn profile(&self, p: Option<PyProfile>) -> TruncationProfile {
        p.map(|p| p.inner).unwrap_or(self.profile)
    }

    fn result<'py>(
        &self,
        py: Python<'py>,
        out: direction_space::Result<Outcome>,
    ) -> PyResult<Bound<'py, PyAny>> {
        decode(py, &out.map_err(to_py)?.json)
    }
}

#[pymethods]
impl PyInstance {
    #[new]
    #[pyo3(signature = (spec, profile=None))]
    fn new(spec: &str, profile: Option<PyProfile>) -> PyResult<Self> {
        let profile = profile.map(|p| p.inner).unwrap_or_default();
        let inner = AnyInstance::parse(spec, profile.horizon).map_err(to_py)?;
        Ok(PyInstance { inner, profile })
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name()
    }

    #[pyo3(signature = (radius=3, profile=None))]
    fn hyperbolicity<'py>(
        &self,
        py: Python<'py>,
        radius: usize,
        profile: Option<PyProfile>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let p = self.profile(profile);
        self.result(py, commands::hyperbolicity(&self.inner, radius, &p))
    }

    #[pyo3(signature = (iso, profile=None))]
    fn classify<'py>(
        &self,
        py: Python<'py>,
        iso: &str,
        profile: Option<PyProfile>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let p = self.profile(profile);
        self.result(py, commands::classify(&self.inner, iso, &p))
    }

    #[pyo3(signature = (iso, shortlex=false, color_seed=0, profile=None))]
    fn axis<'py>(
        &self,
        py: Python<'py>,
        iso: &str,
        shortlex: bool,
        color_seed: u64,
        profile: Option<PyProfile>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let p = self.profile(profile);
        self.result(
            py,
            commands::axis(&self.inner, iso, &p, shortlex, color_seed),
        )
    }

    /// `method` is one of `closed-form`, `limit`, `tidy`; the default picks the closed form when known.
    #[pyo3(signature = (iso, method=None, profile=None))]
    fn scale<'py>(
        &self,
        py: Python<'py>,
        iso: &str,
        method: Option<&str>,
        profile: Option<PyProfile>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let p = self.profile(profile);
        let m = method
            .map(commands::parse_method)
            .transpose()
            .map_err(to_py)?;
        self.result(py, commands::scale(&self.inner, iso, &p, m))
    }

    #[pyo3(signature = (u, v, profile=None))]
    fn cosdist<'py>(
        &self,
        py: Python<'py>,
        u: &str,
        v: &str,
        profile: Option<PyProfile>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let p = self.profile(profile);
        self.result(py, commands::cosdist(&self.inner, u, v, &p))
    }

    #[pyo3(signature = (a, b, profile=None))]
    fn delta<'py>(
        &self,
        py: Python<'py>,
        a: &str,
        b: &str,
        profile: Option<PyProfile>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let p = self.profile(profile);
        self.result(py, commands::delta(&self.inner, a, b, &p))
    }

    #[pyo3(signature = (a, b, profile=None))]
    fn asymptotic<'py>(
        &self,
        py: Python<'py>,
        a: &str,
        b: &str,
        profile: Option<PyProfile>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let p = self.profile(profile);
        self.result(py, commands::asymptotic_relation(&self.inner, a, b, &p))
    }

    #[pyo3(signature = (isos, profile=None))]
    fn directions<'py>(
        &self,
        py: Python<'py>,
        isos: Vec<String>,
        profile: Option<PyProfile>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let p = self.profile(profile);
        self.result(py, commands::directions(&self.inner, &isos, &p))
    }

    fn __repr__(&self) -> String {
        format!("Instance({:?})", self.inner.name())
    }
}

/// Runs acceptance checks and returns one dict per criterion.
#[pyfunction]
#[pyo3(signature = (suite="all"))]
fn run_verify<'py>(py: Python<'py>, suite: &str) -> PyResult<Bound<'py, PyAny>> {
    let ids = verify::parse_suite(suite).map_err(to_py)?;
    let results: Vec<_> = py.detach(|| ids.into_iter().map(verify::run).collect());
    decode(
        py,
        &serde_json::to_value(results).expect("results serialize"),
    )
}

#[pyfunction]
fn version() -> &'static str {
    report::VERSION
}

#[pymodule]
fn direction_space_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyProfile>()?;
    m.add_class::<PyInstance>()?;
    m.add_function(wrap_pyfunction!(run_verify, m)?)?;
    m.add_function(wrap_pyfunction!(version, m)?)?;
    m.add(
        "DirectionSpaceError",
        m.py().get_type::<DirectionSpaceError>(),
    )?;
    Ok(())
}
