use pyo3::exceptions::{PyArithmeticError, PyKeyError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

use qid_core::catalog;
use qid_core::charfn::{eval_part, lipschitz_const, mean_value, CfValue, Part};
use qid_core::dist_model::DistributionSpec;
use qid_core::harness::{parseval_a, proof_integrals, quotient_check, TrigPoly};
use qid_core::infimum::{check_conditions, estimate_mu, estimate_mu_d, DEFAULT_TOL};
use qid_core::spectral::{extract_lattice_spectral, hahn_jordan, lk_charfn, SpectralPair};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn num_err(e: impl std::fmt::Display) -> PyErr {
    PyArithmeticError::new_err(e.to_string())
}

// Report types go through Python's json module so their field names match the CLI output.
fn to_py<'py, T: Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).map_err(value_err)?;
    py.import("json")?.call_method1("loads", (text,))
}

fn part(name: &str) -> PyResult<Part> {
    name.parse().map_err(value_err)
}

/// A validated mixture `c_d F_d + c_a F_a + c_s F_s`.
#[pyclass(name = "Spec", module = "qid_lab", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySpec {
    inner: DistributionSpec,
}

#[pymethods]
impl PySpec {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        DistributionSpec::from_json(text)
            .map(|inner| Self { inner })
            .map_err(value_err)
    }

    #[staticmethod]
    fn catalog(name: &str) -> PyResult<Self> {
        catalog::spec(name)
            .map(|inner| Self { inner })
            .ok_or_else(|| PyKeyError::new_err(name.to_string()))
    }

    #[staticmethod]
    fn catalog_names() -> Vec<&'static str> {
        catalog::specs().into_iter().map(|(n, _)| n).collect()
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn coefficients(&self) -> (f64, f64, f64) {
        (self.inner.c_d, self.inner.c_a, self.inner.c_s)
    }

    #[pyo3(signature = (t, part = "full"))]
    fn cf(&self, t: f64, part: &str) -> PyResult<CfValue> {
        eval_part(&self.inner, self::part(part)?, t).map_err(value_err)
    }

    #[pyo3(signature = (ts, part = "full"))]
    fn cf_grid(&self, ts: Vec<f64>, part: &str) -> PyResult<Vec<CfValue>> {
        let p = self::part(part)?;
        ts.into_iter().map(|t| eval_part(&self.inner, p, t).map_err(value_err)).collect()
    }

    #[pyo3(signature = (part = "full"))]
    fn lipschitz(&self, part: &str) -> PyResult<f64> {
        lipschitz_const(&self.inner, self::part(part)?).map_err(value_err)
    }

    /// `(1/2T) int_{-T}^{T} |f_c(t + h)|^2 dh` and its quadrature error.
    fn mean_value(&self, t: f64, window: f64) -> PyResult<(f64, f64)> {
        mean_value(&self.inner, t, window)
            .map(|m| (m.value, m.quadrature_error))
            .map_err(value_err)
    }

    #[pyo3(signature = (tol = DEFAULT_TOL))]
    fn mu<'py>(&self, py: Python<'py>, tol: f64) -> PyResult<Bound<'py, PyAny>> {
        let est = py.detach(|| estimate_mu(&self.inner, tol)).map_err(num_err)?;
        to_py(py, &est)
    }

    #[pyo3(signature = (tol = DEFAULT_TOL))]
    fn mu_d<'py>(&self, py: Python<'py>, tol: f64) -> PyResult<Bound<'py, PyAny>> {
        let est = py.detach(|| estimate_mu_d(&self.inner, tol)).map_err(num_err)?;
        to_py(py, &est)
    }

    #[pyo3(signature = (tol = DEFAULT_TOL))]
    fn check<'py>(&self, py: Python<'py>, tol: f64) -> PyResult<Bound<'py, PyAny>> {
        let report = py.detach(|| check_conditions(&self.inner, tol)).map_err(num_err)?;
        to_py(py, &report)
    }

    /// Spectral pair of the discrete part; fails if `f_d` has zeros or the support is not a lattice.
    fn spectral(&self) -> PyResult<PyPair> {
        let d = self
            .inner
            .discrete
            .as_ref()
            .ok_or_else(|| PyValueError::new_err("spec has no discrete part"))?;
        extract_lattice_spectral(d)
            .map(|ex| PyPair { inner: ex.pair })
            .map_err(num_err)
    }

    #[pyo3(signature = (t, tau, quad_tol = 1e-11))]
    fn proof_integrals<'py>(&self, py: Python<'py>, t: f64, tau: f64, quad_tol: f64) -> PyResult<Bound<'py, PyAny>> {
        let p = proof_integrals(&self.inner, t, tau, quad_tol).map_err(num_err)?;
        to_py(py, &p)
    }

    /// Exact Parseval constant of `h -> f_d(t + h)` with the finite-window means.
    #[pyo3(signature = (t, windows = vec![1e2, 1e3, 1e4]))]
    fn parseval<'py>(&self, py: Python<'py>, t: f64, windows: Vec<f64>) -> PyResult<Bound<'py, PyAny>> {
        let d = self
            .inner
            .discrete
            .as_ref()
            .ok_or_else(|| PyValueError::new_err("spec has no discrete part"))?;
        let r = parseval_a(&TrigPoly::from_discrete(d, t), &windows).map_err(num_err)?;
        to_py(py, &r)
    }

    fn __repr__(&self) -> String {
        format!("Spec({})", serde_json::to_string(&self.inner).unwrap_or_default())
    }
}

/// A pair `(gamma, G)` with `G` a finite signed measure.
#[pyclass(name = "Pair", module = "qid_lab", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyPair {
    inner: SpectralPair,
}

#[pymethods]
impl PyPair {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        SpectralPair::from_json(text)
            .map(|inner| Self { inner })
            .map_err(value_err)
    }

    #[staticmethod]
    fn catalog(name: &str) -> PyResult<Self> {
        catalog::pair(name)
            .map(|inner| Self { inner })
            .ok_or_else(|| PyKeyError::new_err(name.to_string()))
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.inner.gamma
    }

    #[getter]
    fn atoms(&self) -> Vec<(f64, f64)> {
        self.inner.measure.atoms.iter().map(|a| (a.location, a.weight)).collect()
    }

    fn total_variation(&self) -> f64 {
        self.inner.total_variation()
    }

    fn cf(&self, t: f64) -> PyResult<CfValue> {
        lk_charfn(&self.inner, t).map_err(num_err)
    }

    /// `(gamma, G+)` and `(0, G-)`; `cf` of the first over `cf` of the second is `cf`.
    fn jordan(&self) -> (PyPair, PyPair) {
        let (p, m) = hahn_jordan(&self.inner);
        (PyPair { inner: p }, PyPair { inner: m })
    }

    fn quotient_check<'py>(&self, py: Python<'py>, t: f64, h: f64) -> PyResult<Bound<'py, PyAny>> {
        let q = quotient_check(&self.inner, t, h).map_err(num_err)?;
        to_py(py, &q)
    }

    fn __repr__(&self) -> String {
        format!("Pair({})", serde_json::to_string(&self.inner).unwrap_or_default())
    }
}

#[pymodule]
fn qid_lab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    qid_core::init_threads();
    m.add_class::<PySpec>()?;
    m.add_class::<PyPair>()?;
    m.add("DEFAULT_TOL", DEFAULT_TOL)?;
    Ok(())
}
