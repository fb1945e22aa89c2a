//! Python bindings for the `sensbounds` crate.

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

use ::sensbounds::envelope::{self, Envelope};
use ::sensbounds::inference::{marginal, Query};
use ::sensbounds::sensfun::{self, FunctionKind};
use ::sensbounds::sweep::{self, SweepOptions, Verdict};
use ::sensbounds::{DiscreteNetwork, Error, EvidenceProfile};

fn to_py(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn kind(linear: bool) -> FunctionKind {
    if linear {
        FunctionKind::Linear
    } else {
        FunctionKind::Hyperbolic
    }
}

/// A discrete Bayesian network.
#[pyclass(name = "Network", module = "sensbounds", frozen)]
struct PyNetwork {
    inner: DiscreteNetwork,
}

#[pymethods]
impl PyNetwork {
    /// Parses a network from its JSON document.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: ::sensbounds::network::load_network(text).map_err(to_py)?,
        })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    /// `(name, states)` for every variable in declaration order.
    fn variables(&self) -> Vec<(String, Vec<String>)> {
        self.inner
            .variables()
            .iter()
            .map(|v| (v.name.clone(), v.states.clone()))
            .collect()
    }

    /// Every parameter as `NODE:STATE|PARENT=STATE,...`.
    fn parameters(&self) -> Vec<String> {
        self.inner
            .parameters()
            .iter()
            .map(|p| self.inner.describe_parameter(p))
            .collect()
    }

    fn parameter_value(&self, param: &str) -> PyResult<f64> {
        let pref = self.inner.parse_parameter(param).map_err(to_py)?;
        self.inner.parameter_value(&pref).map_err(to_py)
    }

    /// Copy of the network with `param` set to `x` and its row co-varied.
    fn with_parameter(&self, param: &str, x: f64) -> PyResult<Self> {
        let pref = self.inner.parse_parameter(param).map_err(to_py)?;
        Ok(Self {
            inner: self.inner.apply_parameter(&pref, x).map_err(to_py)?,
        })
    }

    /// `Pr(target | evidence)`, or `None` when the evidence has probability zero.
    #[pyo3(signature = (target, evidence = Vec::new()))]
    fn posterior(&self, target: &str, evidence: Vec<String>) -> PyResult<Option<f64>> {
        let target = self.inner.parse_target(target).map_err(to_py)?;
        let evidence = EvidenceProfile::parse(&self.inner, &evidence).map_err(to_py)?;
        Ok(marginal(&self.inner, &Query::new(Some(target), evidence))
            .map_err(to_py)?
            .conditional)
    }

    /// Sensitivity function of `Pr(target | evidence)` in `param`.
    #[pyo3(signature = (target, param, evidence = Vec::new()))]
    fn sensitivity_function(&self, target: &str, param: &str, evidence: Vec<String>) -> PyResult<SensitivityFunction> {
        let target = self.inner.parse_target(target).map_err(to_py)?;
        let evidence = EvidenceProfile::parse(&self.inner, &evidence).map_err(to_py)?;
        let pref = self.inner.parse_parameter(param).map_err(to_py)?;
        Ok(SensitivityFunction {
            inner: sensfun::derive_sensitivity(&self.inner, target, &evidence, &pref).map_err(to_py)?,
        })
    }

    /// Verifies every bound under all profiles of `observables`. Returns
    /// `(passed, violations)`.
    #[pyo3(signature = (target, observables, grid_step = sweep::DEFAULT_GRID_STEP))]
    fn verify(&self, target: &str, observables: Vec<String>, grid_step: f64) -> PyResult<(bool, usize)> {
        let target = self.inner.parse_target(target).map_err(to_py)?;
        let observables = ::sensbounds::network::resolve_variables(&self.inner, &observables).map_err(to_py)?;
        let options = SweepOptions {
            grid_step,
            ..SweepOptions::default()
        };
        let report = sweep::verify_network(&self.inner, "network", target, &observables, &options).map_err(to_py)?;
        Ok((report.verdict == Verdict::Pass, violation_count(&report)))
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("Network({} variables)", self.inner.len())
    }
}

fn violation_count(report: &sweep::NetworkVerification) -> usize {
    report
        .parameters
        .iter()
        .map(|r| {
            let a = &r.aggregate;
            a.containment_violations.len()
                + a.deviation_violations.len()
                + a.equivalence_failures.len()
                + a.linearity.mismatches
        })
        .sum()
}

/// `f(x) = (c1·x + c2) / (c3·x + c4)`.
#[pyclass(name = "SensitivityFunction", module = "sensbounds", frozen)]
struct SensitivityFunction {
    inner: sensfun::SensitivityFunction,
}

#[pymethods]
impl SensitivityFunction {
    #[getter]
    fn coefficients(&self) -> (f64, f64, f64, f64) {
        let c = self.inner.coefficients;
        (c.c1, c.c2, c.c3, c.c4)
    }

    #[getter]
    fn x0(&self) -> f64 {
        self.inner.x0
    }

    #[getter]
    fn p0(&self) -> f64 {
        self.inner.p0
    }

    #[getter]
    fn kind(&self) -> String {
        self.inner.kind.to_string()
    }

    #[getter]
    fn sensitivity_value(&self) -> f64 {
        self.inner.sensitivity_value()
    }

    /// `(r, s, t)` of the hyperbola `r / (x − s) + t`, or `None` when linear.
    #[getter]
    fn hyperbola(&self) -> Option<(f64, f64, f64)> {
        self.inner.to_hyperbola().ok().map(|h| (h.r, h.s, h.t))
    }

    fn __call__(&self, x: f64) -> PyResult<f64> {
        self.inner.evaluate(x).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        let c = self.inner.coefficients;
        format!(
            "SensitivityFunction(({} x + {}) / ({} x + {}), kind={})",
            c.c1, c.c2, c.c3, c.c4, self.inner.kind
        )
    }
}

/// Deviation bound of the most likely value.
#[pyclass(name = "Deviation", module = "sensbounds", frozen, get_all)]
struct Deviation {
    alpha: f64,
    beta: f64,
    x_alpha: f64,
    x_beta: f64,
}

#[pymethods]
impl Deviation {
    fn __repr__(&self) -> String {
        format!(
            "Deviation(alpha={}, beta={}, interval=[{}, {}])",
            self.alpha, self.beta, self.x_alpha, self.x_beta
        )
    }
}

#[pyfunction]
fn load_network(path: &str) -> PyResult<PyNetwork> {
    let text = std::fs::read_to_string(path).map_err(|e| PyIOError::new_err(format!("{path}: {e}")))?;
    PyNetwork::from_json(&text)
}

/// Lower and upper envelope values at each `x`.
#[pyfunction]
#[pyo3(signature = (x0, p0, xs, linear = false))]
fn envelope_bounds(x0: f64, p0: f64, xs: Vec<f64>, linear: bool) -> PyResult<Vec<(f64, f64)>> {
    let env: Box<dyn Envelope> = if linear {
        Box::new(envelope::linear_envelope(x0, p0).map_err(to_py)?)
    } else {
        Box::new(envelope::hyperbolic_envelope(x0, p0).map_err(to_py)?)
    };
    Ok(xs.into_iter().map(|x| env.bounds_at(x)).collect())
}

#[pyfunction]
fn delta_bound(x0: f64, p0: f64, x1: f64) -> PyResult<(f64, f64)> {
    let d = envelope::delta_bound(x0, p0, x1).map_err(to_py)?;
    Ok((d.lower, d.upper))
}

#[pyfunction]
#[pyo3(signature = (x0, p0, linear = false))]
fn sensitivity_value_bound(x0: f64, p0: f64, linear: bool) -> PyResult<f64> {
    if linear {
        envelope::linear_sensitivity_value_bound(x0, p0)
    } else {
        envelope::sensitivity_value_bound(x0, p0)
    }
    .map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (x0, p1, p2, linear = false))]
fn min_admissible_deviation(x0: f64, p1: f64, p2: f64, linear: bool) -> PyResult<Deviation> {
    let d = envelope::min_admissible_deviation(x0, p1, p2, kind(linear)).map_err(to_py)?;
    Ok(Deviation {
        alpha: d.alpha,
        beta: d.beta,
        x_alpha: d.x_alpha,
        x_beta: d.x_beta,
    })
}

/// Bisection oracle for the deviation interval.
#[pyfunction]
#[pyo3(signature = (x0, p1, p2, linear = false))]
fn envelope_crossings(x0: f64, p1: f64, p2: f64, linear: bool) -> PyResult<(f64, f64)> {
    envelope::envelope_crossings(x0, p1, p2, kind(linear)).map_err(to_py)
}

/// Verifies `count` seeded random networks. Returns `(passed, violations)`.
#[pyfunction]
#[pyo3(signature = (count, seed = sweep::DEFAULT_SEED, grid_step = sweep::DEFAULT_GRID_STEP))]
fn verify_random(py: Python<'_>, count: usize, seed: u64, grid_step: f64) -> PyResult<(bool, usize)> {
    let options = SweepOptions {
        grid_step,
        ..SweepOptions::default()
    };
    let report = py
        .detach(|| sweep::verify_corpus(&sweep::random_corpus(count, seed), &options))
        .map_err(to_py)?;
    let violations = report.networks.iter().map(violation_count).sum();
    Ok((report.verdict == Verdict::Pass, violations))
}

#[pymodule]
fn sensbounds(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyNetwork>()?;
    m.add_class::<SensitivityFunction>()?;
    m.add_class::<Deviation>()?;
    m.add_function(wrap_pyfunction!(load_network, m)?)?;
    m.add_function(wrap_pyfunction!(envelope_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(delta_bound, m)?)?;
    m.add_function(wrap_pyfunction!(sensitivity_value_bound, m)?)?;
    m.add_function(wrap_pyfunction!(min_admissible_deviation, m)?)?;
    m.add_function(wrap_pyfunction!(envelope_crossings, m)?)?;
    m.add_function(wrap_pyfunction!(verify_random, m)?)?;
    Ok(())
}
