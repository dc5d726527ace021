//! Python bindings: potentials, perturbative and oracle traces, fits and
//! anomaly extraction.

use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use anomaly_core::anomaly;
use anomaly_core::oracle::{self, OracleConfig};
use anomaly_core::perturbation::{self, Order, Source, TraceSample};
use anomaly_core::quadrature;
use anomaly_core::report::{self, Format};
use anomaly_core::reproduce::{self, ReproduceParams, Target};
use anomaly_core::{Error, QuadratureBudget};

create_exception!(anomaly_forge, ConvergenceError, PyRuntimeError, "A numerical procedure did not converge.");

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Unconverged { .. } | Error::NotPowerLaw { .. } | Error::MixedSign | Error::TailDivergent => {
            ConvergenceError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

trait IntoPy<T> {
    fn py_err(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for anomaly_core::Result<T> {
    fn py_err(self) -> PyResult<T> {
        self.map_err(to_py)
    }
}

#[pyclass(name = "UnitSystem", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct PyUnits(anomaly_core::UnitSystem);

#[pymethods]
impl PyUnits {
    #[new]
    #[pyo3(signature = (hbar = 1.0, mass = 1.0, e2 = 1.0))]
    fn new(hbar: f64, mass: f64, e2: f64) -> PyResult<Self> {
        Ok(Self(anomaly_core::UnitSystem::new(hbar, mass, e2).py_err()?))
    }

    #[getter]
    fn hbar(&self) -> f64 {
        self.0.hbar()
    }

    #[getter]
    fn mass(&self) -> f64 {
        self.0.mass()
    }

    #[getter]
    fn e2(&self) -> f64 {
        self.0.e2()
    }

    #[getter]
    fn a0(&self) -> f64 {
        self.0.a0()
    }

    fn __repr__(&self) -> String {
        format!("UnitSystem(hbar={}, mass={}, e2={})", self.0.hbar(), self.0.mass(), self.0.e2())
    }
}

fn units_or_atomic(units: Option<&PyUnits>) -> anomaly_core::UnitSystem {
    units.map(|u| u.0).unwrap_or_default()
}

#[pyclass(name = "PotentialSpec", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct PySpec(anomaly_core::PotentialSpec);

#[pymethods]
impl PySpec {
    /// Parses `coulomb:Z=1`, `inverse-square:alpha=50`, `yukawa:Z=1,kappa=0.5`
    /// or `cutoff-coulomb:Z=1,rcut=1`.
    #[new]
    fn new(spec: &str) -> PyResult<Self> {
        Ok(Self(spec.parse().py_err()?))
    }

    #[getter]
    fn family(&self) -> String {
        self.0.family().to_string()
    }

    #[pyo3(signature = (r, units = None))]
    fn evaluate(&self, r: f64, units: Option<&PyUnits>) -> PyResult<f64> {
        self.0.evaluate(&units_or_atomic(units), r).py_err()
    }

    #[pyo3(signature = (k, units = None))]
    fn fourier_transform_at(&self, k: f64, units: Option<&PyUnits>) -> PyResult<f64> {
        self.0.fourier_transform_at(&units_or_atomic(units), k).py_err()
    }

    #[pyo3(signature = (units = None))]
    fn coulomb_tail_coefficient(&self, units: Option<&PyUnits>) -> f64 {
        self.0.coulomb_tail_coefficient(&units_or_atomic(units))
    }

    /// (small-x exponent, case label, tail description).
    fn classify(&self) -> (f64, String, String) {
        let c = self.0.classify();
        let tail = match c.large_x_tail {
            anomaly_core::TailKind::CoulombTail => "coulomb",
            anomaly_core::TailKind::Screened => "screened",
        };
        (c.small_x_exponent, c.case_label.to_string(), tail.to_string())
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("PotentialSpec({:?})", self.0.to_string())
    }
}

#[pyclass(name = "TraceSamples", frozen)]
struct PySamples(perturbation::TraceSamples);

#[pymethods]
impl PySamples {
    #[getter]
    fn lambdas(&self) -> Vec<f64> {
        self.0.entries().iter().map(|e| e.lambda).collect()
    }

    #[getter]
    fn w(&self) -> Vec<f64> {
        self.0.entries().iter().map(|e| e.w).collect()
    }

    #[getter]
    fn err(&self) -> Vec<f64> {
        self.0.entries().iter().map(|e| e.err).collect()
    }

    #[getter]
    fn source(&self) -> &'static str {
        self.0.source().as_str()
    }

    fn to_csv(&self) -> String {
        report::samples_csv(&self.0)
    }

    fn fit(&self) -> PyResult<PyFit> {
        Ok(PyFit(self.0.fit().py_err()?))
    }

    fn __len__(&self) -> usize {
        self.0.entries().len()
    }
}

#[pyclass(name = "PowerLawFit", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct PyFit(quadrature::PowerLawFit);

#[pymethods]
impl PyFit {
    #[getter]
    fn amplitude(&self) -> f64 {
        self.0.amplitude
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.0.exponent
    }

    #[getter]
    fn gamma_err(&self) -> f64 {
        self.0.exponent_err
    }

    #[getter]
    fn residual(&self) -> f64 {
        self.0.residual
    }

    #[getter]
    fn lambda_range(&self) -> (f64, f64) {
        self.0.lambda_range
    }

    fn __repr__(&self) -> String {
        format!("PowerLawFit(amplitude={:e}, gamma={}, residual={:e})", self.0.amplitude, self.0.exponent, self.0.residual)
    }
}

#[pyclass(name = "AnomalyResult", frozen)]
struct PyAnomaly(anomaly::AnomalyResult);

#[pymethods]
impl PyAnomaly {
    #[getter]
    fn case(&self) -> String {
        self.0.case_label.to_string()
    }

    /// Reduced δA_N, or None when divergent.
    #[getter]
    fn a_n(&self) -> Option<f64> {
        self.0.a_n.value()
    }

    #[getter]
    fn a_e(&self) -> Option<f64> {
        self.0.a_e.value()
    }

    #[getter]
    fn status_n(&self) -> &'static str {
        self.0.status_n().as_str()
    }

    #[getter]
    fn status_e(&self) -> &'static str {
        self.0.status_e().as_str()
    }

    #[getter]
    fn growth_n(&self) -> Option<f64> {
        self.0.a_n.growth_exponent()
    }

    #[getter]
    fn growth_e(&self) -> Option<f64> {
        self.0.a_e.growth_exponent()
    }

    #[getter]
    fn fit(&self) -> Option<PyFit> {
        self.0.fit.map(PyFit)
    }

    /// Key-value (default) or CSV report.
    #[pyo3(signature = (format = "keyvalue"))]
    fn report(&self, format: &str) -> PyResult<String> {
        let f = match format {
            "keyvalue" => Format::KeyValue,
            "csv" => Format::Csv,
            other => return Err(PyValueError::new_err(format!("unknown format {other:?}"))),
        };
        Ok(report::emit_report(&self.0, f))
    }
}

fn parse_order(order: &str) -> PyResult<Order> {
    match order {
        "first" => Ok(Order::First),
        "second" => Ok(Order::Second),
        "sum" => Ok(Order::Sum),
        other => Err(PyValueError::new_err(format!("order must be first, second or sum, got {other:?}"))),
    }
}

fn oracle_config(ell_max: Option<u32>) -> PyResult<OracleConfig> {
    let config = OracleConfig::default();
    match ell_max {
        Some(l) => config.with_ell_max(l).py_err(),
        None => Ok(config),
    }
}

/// (w₁, error estimate) at one Λ.
#[pyfunction]
#[pyo3(signature = (spec, lam, units = None))]
fn compute_w1(py: Python<'_>, spec: &PySpec, lam: f64, units: Option<&PyUnits>) -> PyResult<(f64, f64)> {
    let (s, u) = (spec.0, units_or_atomic(units));
    let v = py.detach(|| perturbation::compute_w1(&s, &u, lam, &QuadratureBudget::default())).py_err()?;
    Ok((v.value, v.error))
}

/// (w₂, error estimate) at one Λ.
#[pyfunction]
#[pyo3(signature = (spec, lam, units = None))]
fn compute_w2(py: Python<'_>, spec: &PySpec, lam: f64, units: Option<&PyUnits>) -> PyResult<(f64, f64)> {
    let (s, u) = (spec.0, units_or_atomic(units));
    let v = py.detach(|| perturbation::compute_w2(&s, &u, lam, &QuadratureBudget::default())).py_err()?;
    Ok((v.value, v.error))
}

#[pyfunction]
#[pyo3(signature = (z, lam, units = None))]
fn w2_closed_form(z: f64, lam: f64, units: Option<&PyUnits>) -> f64 {
    perturbation::w2_closed_form(z, &units_or_atomic(units), lam)
}

#[pyfunction]
#[pyo3(signature = (spec, lambdas, order = "second", units = None))]
fn sample_w(
    py: Python<'_>,
    spec: &PySpec,
    lambdas: Vec<f64>,
    order: &str,
    units: Option<&PyUnits>,
) -> PyResult<PySamples> {
    let (s, u, o) = (spec.0, units_or_atomic(units), parse_order(order)?);
    let samples =
        py.detach(|| perturbation::sample_w(&s, &u, &lambdas, o, &QuadratureBudget::default())).py_err()?;
    Ok(PySamples(samples))
}

/// Nonperturbative (w, error) at one Λ.
#[pyfunction]
#[pyo3(signature = (spec, lam, units = None, ell_max = None))]
fn oracle_w(
    py: Python<'_>,
    spec: &PySpec,
    lam: f64,
    units: Option<&PyUnits>,
    ell_max: Option<u32>,
) -> PyResult<(f64, f64)> {
    let (s, u, c) = (spec.0, units_or_atomic(units), oracle_config(ell_max)?);
    let v = py.detach(|| oracle::oracle_w(&s, &u, lam, &c)).py_err()?;
    Ok((v.value, v.error))
}

#[pyfunction]
#[pyo3(signature = (spec, lambdas, units = None, ell_max = None))]
fn sample_oracle(
    py: Python<'_>,
    spec: &PySpec,
    lambdas: Vec<f64>,
    units: Option<&PyUnits>,
    ell_max: Option<u32>,
) -> PyResult<PySamples> {
    let (s, u, c) = (spec.0, units_or_atomic(units), oracle_config(ell_max)?);
    Ok(PySamples(py.detach(|| oracle::sample_oracle(&s, &u, &lambdas, &c)).py_err()?))
}

/// Fits w = c·Λ^(−γ) to explicit points.
#[pyfunction]
fn fit_power_law(lambdas: Vec<f64>, w: Vec<f64>) -> PyResult<PyFit> {
    if lambdas.len() != w.len() {
        return Err(PyValueError::new_err("lambdas and w differ in length"));
    }
    let points: Vec<(f64, f64)> = lambdas.into_iter().zip(w).collect();
    Ok(PyFit(quadrature::fit_power_law(&points).py_err()?))
}

/// Builds oracle-tagged samples from explicit points, for synthetic data.
#[pyfunction]
#[pyo3(signature = (spec, lambdas, w, err = None, units = None))]
fn make_samples(
    spec: &PySpec,
    lambdas: Vec<f64>,
    w: Vec<f64>,
    err: Option<Vec<f64>>,
    units: Option<&PyUnits>,
) -> PyResult<PySamples> {
    let err = err.unwrap_or_else(|| vec![0.0; w.len()]);
    if lambdas.len() != w.len() || err.len() != w.len() {
        return Err(PyValueError::new_err("lambdas, w and err differ in length"));
    }
    let entries = lambdas
        .into_iter()
        .zip(w)
        .zip(err)
        .map(|((lambda, w), err)| TraceSample { lambda, w, err })
        .collect();
    let samples = perturbation::TraceSamples::new(entries, Source::Oracle, spec.0, units_or_atomic(units));
    Ok(PySamples(samples.py_err()?))
}

#[pyfunction]
fn analyze(samples: &PySamples) -> PyResult<PyAnomaly> {
    Ok(PyAnomaly(anomaly::analyze(&samples.0).py_err()?))
}

#[pyfunction]
#[pyo3(signature = (alpha, units = None))]
fn delta_an_case_a_closed_form(alpha: f64, units: Option<&PyUnits>) -> PyResult<f64> {
    anomaly::delta_an_case_a_closed_form(alpha, &units_or_atomic(units)).py_err()
}

#[pyfunction]
#[pyo3(signature = (z, units = None))]
fn delta_ae_case_b_closed_form(z: f64, units: Option<&PyUnits>) -> PyResult<f64> {
    anomaly::delta_ae_case_b_closed_form(z, &units_or_atomic(units)).py_err()
}

/// Runs a reference target; returns (passed, report text).
#[pyfunction]
#[pyo3(signature = (target, z = 1.0, alpha = None, units = None))]
fn run_reproduction(
    py: Python<'_>,
    target: &str,
    z: f64,
    alpha: Option<f64>,
    units: Option<&PyUnits>,
) -> PyResult<(bool, String)> {
    let target: Target = target.parse().py_err()?;
    let params = ReproduceParams { units: units_or_atomic(units), z, alpha, ..ReproduceParams::default() };
    let outcome = py.detach(|| reproduce::run_target(target, &params)).py_err()?;
    Ok((outcome.pass(), outcome.to_string()))
}

#[pymodule]
fn anomaly_forge(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyUnits>()?;
    m.add_class::<PySpec>()?;
    m.add_class::<PySamples>()?;
    m.add_class::<PyFit>()?;
    m.add_class::<PyAnomaly>()?;
    m.add("ConvergenceError", m.py().get_type::<ConvergenceError>())?;
    m.add_function(wrap_pyfunction!(compute_w1, m)?)?;
    m.add_function(wrap_pyfunction!(compute_w2, m)?)?;
    m.add_function(wrap_pyfunction!(w2_closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(sample_w, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_w, m)?)?;
    m.add_function(wrap_pyfunction!(sample_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(fit_power_law, m)?)?;
    m.add_function(wrap_pyfunction!(make_samples, m)?)?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add_function(wrap_pyfunction!(delta_an_case_a_closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(delta_ae_case_b_closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(run_reproduction, m)?)?;
    Ok(())
}
