//! Python bindings: Pauli sums, built-in models, moments, the PDS solve, optimization runs,
//! exact spectra and measurement estimates.

use pds_vqs::measure::{estimate_measurements, singleton_groups, Covariance, Variances};
use pds_vqs::models::{build_model, ModelBundle, ModelOptions};
use pds_vqs::moments::{moment_table, PowerCache};
use pds_vqs::optim::{self, Functional, MetricKind, RunOptions, Schedule, Shots, Status};
use pds_vqs::pauli::{self, qwc_groups};
use pds_vqs::pds::{self, Regularization, DEFAULT_EIGEN_SHIFT, DEFAULT_TRUNCATION};
use pds_vqs::statesim::exact_eigensystem;
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: pds_vqs::Error) -> PyErr {
    if e.is_numerical() {
        PyArithmeticError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn regularization(name: &str, value: Option<f64>) -> PyResult<Regularization> {
    match name {
        "none" => Ok(Regularization::None),
        "shift" => Ok(Regularization::EigenShift(value.unwrap_or(DEFAULT_EIGEN_SHIFT))),
        "truncate" => Ok(Regularization::Truncate(value.unwrap_or(DEFAULT_TRUNCATION))),
        other => Err(PyValueError::new_err(format!("unknown regularization '{other}'"))),
    }
}

#[pyclass(name = "PauliSum", module = "pdsvqs")]
#[derive(Clone)]
struct PyPauliSum {
    inner: pauli::PauliSum,
}

#[pymethods]
impl PyPauliSum {
    /// Parse `<coeff> <letters>` lines.
    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        pauli::PauliSum::from_text(text)
            .map(|inner| PyPauliSum { inner })
            .map_err(to_py)
    }

    /// Build from `(coefficient, letters)` pairs.
    #[staticmethod]
    fn from_pairs(pairs: Vec<(f64, String)>) -> PyResult<Self> {
        pauli::PauliSum::from_pairs(pairs.iter().map(|(c, l)| (*c, l.as_str())))
            .map(|inner| PyPauliSum { inner })
            .map_err(to_py)
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    #[getter]
    fn n_qubits(&self) -> usize {
        self.inner.n_qubits()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    /// `(letters, real, imag)` in canonical order.
    fn terms(&self) -> Vec<(String, f64, f64)> {
        self.inner
            .iter()
            .map(|t| (t.letters(), t.coeff().re, t.coeff().im))
            .collect()
    }

    fn power(&self, n: u32) -> PyResult<Self> {
        pauli::power(&self.inner, n)
            .map(|inner| PyPauliSum { inner })
            .map_err(to_py)
    }

    /// Qubit-wise commuting groups as lists of letter strings.
    fn qwc_groups(&self) -> Vec<Vec<String>> {
        qwc_groups(&self.inner)
            .iter()
            .map(|g| g.iter().map(|t| t.letters()).collect())
            .collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "PauliSum(n_qubits={}, terms={})",
            self.inner.n_qubits(),
            self.inner.len()
        )
    }
}

#[pyclass(name = "Model", module = "pdsvqs")]
struct PyModel {
    inner: ModelBundle,
}

#[pymethods]
impl PyModel {
    #[getter]
    fn name(&self) -> String {
        self.inner.name.clone()
    }

    #[getter]
    fn hamiltonian(&self) -> PyPauliSum {
        PyPauliSum {
            inner: self.inner.hamiltonian.clone(),
        }
    }

    #[getter]
    fn theta0(&self) -> Vec<f64> {
        self.inner.theta0.clone()
    }

    #[getter]
    fn n_params(&self) -> usize {
        self.inner.circuit.n_params()
    }

    #[getter]
    fn ground_energy(&self) -> Option<f64> {
        self.inner.ground_energy()
    }

    fn __repr__(&self) -> String {
        format!(
            "Model(name='{}', n_qubits={}, n_params={})",
            self.inner.name,
            self.inner.hamiltonian.n_qubits(),
            self.inner.circuit.n_params()
        )
    }
}

#[pyclass(name = "PdsResult", module = "pdsvqs", get_all)]
struct PyPdsResult {
    order: usize,
    x: Vec<f64>,
    roots: Vec<f64>,
    energy: f64,
    cond_m: f64,
}

#[pyclass(name = "Record", module = "pdsvqs", get_all)]
struct PyRecord {
    iter: usize,
    theta: Vec<f64>,
    energy: f64,
    roots: Vec<f64>,
    expval_h: f64,
    deviation: Option<f64>,
    fidelity: Option<f64>,
    grad_norm: f64,
    metric_cond: f64,
}

#[pyclass(name = "Trajectory", module = "pdsvqs", get_all)]
struct PyTrajectory {
    records: Vec<Py<PyRecord>>,
    /// "converged", "max_iters" or "error: <message>"
    status: String,
}

#[pyfunction(name = "build_model")]
#[pyo3(signature = (name, j = 0.1, b = 1.0))]
fn py_build_model(name: &str, j: f64, b: f64) -> PyResult<PyModel> {
    build_model(name, ModelOptions { j, b })
        .map(|inner| PyModel { inner })
        .map_err(to_py)
}

/// `[⟨H^0⟩, …, ⟨H^max_order⟩]` for the model's ansatz at `theta`.
#[pyfunction]
fn moments(model: &PyModel, theta: Vec<f64>, max_order: usize) -> PyResult<Vec<f64>> {
    let m = &model.inner;
    let cache = PowerCache::new(&m.hamiltonian, max_order).map_err(to_py)?;
    moment_table(&m.circuit, &theta, &cache, max_order)
        .map(|t| t.values)
        .map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (moments, k, regularization = "none", value = None))]
fn pds_solve(moments: Vec<f64>, k: usize, regularization: &str, value: Option<f64>) -> PyResult<PyPdsResult> {
    let policy = self::regularization(regularization, value)?;
    let table = pds_vqs::moments::MomentTable::from_values(moments);
    let r = pds::pds_solve(&table, k, policy).map_err(to_py)?;
    Ok(PyPdsResult {
        order: r.order,
        x: r.x,
        roots: r.roots,
        energy: r.energy,
        cond_m: r.cond_m,
    })
}

#[pyfunction]
#[pyo3(signature = (
    model, functional = "pds", order = 2, metric = "gd", eta = None, schedule = None,
    theta0 = None, max_iters = 100, tol = 1e-8, shots = None, seed = 0
))]
#[allow(clippy::too_many_arguments)]
fn run(
    py: Python<'_>,
    model: &PyModel,
    functional: &str,
    order: usize,
    metric: &str,
    eta: Option<f64>,
    schedule: Option<&str>,
    theta0: Option<Vec<f64>>,
    max_iters: usize,
    tol: f64,
    shots: Option<u64>,
    seed: u64,
) -> PyResult<PyTrajectory> {
    let m = &model.inner;
    let functional = match functional {
        "vqe" => Functional::Vqe,
        "pds" => Functional::Pds(order),
        other => return Err(PyValueError::new_err(format!("unknown functional '{other}'"))),
    };
    let kind: MetricKind = metric.parse().map_err(to_py)?;
    let eta = eta.unwrap_or(m.eta());
    let schedule = match schedule {
        None => match m.schedule {
            Schedule::Constant(_) => Schedule::Constant(eta),
            Schedule::InverseIteration(_) => Schedule::InverseIteration(eta),
        },
        Some("const") => Schedule::Constant(eta),
        Some("inv-iter") => Schedule::InverseIteration(eta),
        Some(other) => return Err(PyValueError::new_err(format!("unknown schedule '{other}'"))),
    };
    let options = RunOptions {
        schedule,
        max_iters,
        tol,
        shots: shots.map(|shots| Shots { shots, seed }),
        ..RunOptions::default()
    };
    let problem = m.problem(theta0);
    let t = py
        .allow_threads(|| optim::run(&problem, functional, kind, &options))
        .map_err(to_py)?;
    let status = match &t.status {
        Status::Converged => "converged".to_string(),
        Status::MaxIters => "max_iters".to_string(),
        Status::Error(e) => format!("error: {e}"),
    };
    let records = t
        .records
        .into_iter()
        .map(|r| {
            Py::new(
                py,
                PyRecord {
                    iter: r.iter,
                    theta: r.theta,
                    energy: r.energy,
                    roots: r.roots,
                    expval_h: r.expval_h,
                    deviation: r.deviation,
                    fidelity: r.fidelity,
                    grad_norm: r.grad_norm,
                    metric_cond: r.metric_cond,
                },
            )
        })
        .collect::<PyResult<_>>()?;
    Ok(PyTrajectory { records, status })
}

/// Eigenvalues in ascending order.
#[pyfunction]
fn eig(hamiltonian: &PyPauliSum) -> PyResult<Vec<f64>> {
    exact_eigensystem(&hamiltonian.inner)
        .map(|e| e.eigenvalues)
        .map_err(to_py)
}

/// Worst-case measurement count for `H^power` at standard error `epsilon`.
#[pyfunction]
#[pyo3(signature = (hamiltonian, epsilon, power = 1, grouping = "qwc"))]
fn estimate(hamiltonian: &PyPauliSum, epsilon: f64, power: u32, grouping: &str) -> PyResult<f64> {
    let op = pauli::power(&hamiltonian.inner, power).map_err(to_py)?;
    let groups = match grouping {
        "qwc" => qwc_groups(&op),
        "none" => singleton_groups(&op),
        other => return Err(PyValueError::new_err(format!("unknown grouping '{other}'"))),
    };
    estimate_measurements(&groups, &Variances::WorstCase, Covariance::Zero, epsilon).map_err(to_py)
}

#[pymodule]
fn pdsvqs(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPauliSum>()?;
    m.add_class::<PyModel>()?;
    m.add_class::<PyPdsResult>()?;
    m.add_class::<PyRecord>()?;
    m.add_class::<PyTrajectory>()?;
    m.add_function(wrap_pyfunction!(py_build_model, m)?)?;
    m.add_function(wrap_pyfunction!(moments, m)?)?;
    m.add_function(wrap_pyfunction!(pds_solve, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(eig, m)?)?;
    m.add_function(wrap_pyfunction!(estimate, m)?)?;
    Ok(())
}
