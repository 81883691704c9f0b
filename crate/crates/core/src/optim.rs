//! Metric-preconditioned descent on the VQE or PDS(K) energy.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::moments::{
    moment_table_with_gradients, sampled_moment_table, GradientMethod, PowerCache,
};
use crate::pauli::PauliSum;
use crate::pds::{pds_gradient, pds_solve, Regularization};
use crate::statesim::{apply_circuit, fidelity, state_derivatives, Circuit, Eigensystem};

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_METRIC_SHIFT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MetricKind {
    #[default]
    Gd,
    Ngd,
    Ite,
}

impl MetricKind {
    pub fn name(self) -> &'static str {
        match self {
            MetricKind::Gd => "gd",
            MetricKind::Ngd => "ngd",
            MetricKind::Ite => "ite",
        }
    }
}

impl std::str::FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gd" => Ok(MetricKind::Gd),
            "ngd" => Ok(MetricKind::Ngd),
            "ite" => Ok(MetricKind::Ite),
            other => Err(Error::InvalidArgument(format!("unknown metric '{other}'"))),
        }
    }
}

/// Energy functional being minimized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Functional {
    Vqe,
    Pds(usize),
}

impl Functional {
    pub fn order(self) -> usize {
        match self {
            Functional::Vqe => 1,
            Functional::Pds(k) => k,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Schedule {
    Constant(f64),
    /// `η/k` at the k-th step, `k` starting from 1.
    InverseIteration(f64),
}

impl Schedule {
    pub fn eta(self, step: usize) -> f64 {
        match self {
            Schedule::Constant(eta) => eta,
            Schedule::InverseIteration(eta) => eta / step as f64,
        }
    }
}

/// `GD → 1`, `ITE_ij = Re⟨∂_iφ|∂_jφ⟩`, `NGD_ij = ITE_ij − Re[⟨∂_iφ|φ⟩⟨φ|∂_jφ⟩]`.
pub fn metric(c: &Circuit, theta: &[f64], kind: MetricKind) -> Result<DMatrix<f64>> {
    c.check_theta(theta)?;
    let n = c.n_params();
    if kind == MetricKind::Gd {
        return Ok(DMatrix::identity(n, n));
    }
    let derivs = state_derivatives(c, theta)?;
    let mut r = DMatrix::from_fn(n, n, |i, j| derivs[i].inner(&derivs[j]).re);
    if kind == MetricKind::Ngd {
        let psi = apply_circuit(c, theta)?;
        let overlaps: Vec<_> = derivs.iter().map(|d| d.inner(&psi)).collect();
        for i in 0..n {
            for j in 0..n {
                r[(i, j)] -= (overlaps[i] * overlaps[j].conj()).re;
            }
        }
    }
    // Exact symmetry; the two triangles differ only by rounding.
    Ok((&r + r.transpose()) * 0.5)
}

/// `λ_max/λ_min` of a symmetric matrix; infinite when singular.
pub fn condition_number(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 1.0;
    }
    let eig = m.clone().symmetric_eigen().eigenvalues;
    let max = eig.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let min = eig.iter().fold(f64::INFINITY, |a, v| a.min(v.abs()));
    if min > 0.0 {
        max / min
    } else {
        f64::INFINITY
    }
}

/// `θ − η·R⁺·grad`, with `R⁺` formed under the regularization policy.
pub fn step(
    theta: &[f64],
    grad: &[f64],
    metric: &DMatrix<f64>,
    eta: f64,
    reg: Regularization,
) -> Vec<f64> {
    if metric.is_identity(0.0) {
        return theta.iter().zip(grad).map(|(t, g)| t - eta * g).collect();
    }
    let eig = metric.clone().symmetric_eigen();
    let lmax = eig.eigenvalues.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let inv: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|&l| match reg {
            Regularization::EigenShift(eps) => 1.0 / (l + eps),
            Regularization::Truncate(rel) if l < rel * lmax => 0.0,
            _ if l == 0.0 => 0.0,
            _ => 1.0 / l,
        })
        .collect();
    let v = &eig.eigenvectors;
    let mut w = v.transpose() * DVector::from_column_slice(grad);
    for (wi, s) in w.iter_mut().zip(&inv) {
        *wi *= s;
    }
    let dir = v * w;
    theta
        .iter()
        .zip(dir.iter())
        .map(|(t, d)| t - eta * d)
        .collect()
}

/// Shot budget for moment and gradient estimation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Shots {
    pub shots: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub schedule: Schedule,
    pub max_iters: usize,
    pub tol: f64,
    pub pds_regularization: Regularization,
    pub metric_regularization: Regularization,
    pub gradient_method: GradientMethod,
    pub shots: Option<Shots>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            schedule: Schedule::Constant(0.05),
            max_iters: 100,
            tol: DEFAULT_TOL,
            pds_regularization: Regularization::None,
            metric_regularization: Regularization::EigenShift(DEFAULT_METRIC_SHIFT),
            gradient_method: GradientMethod::Analytic,
            shots: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Problem {
    pub hamiltonian: PauliSum,
    pub circuit: Circuit,
    pub theta0: Vec<f64>,
    /// Exact reference used for deviations and fidelities.
    pub reference: Option<Eigensystem>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub iter: usize,
    pub theta: Vec<f64>,
    pub energy: f64,
    pub roots: Vec<f64>,
    pub expval_h: f64,
    pub deviation: Option<f64>,
    pub fidelity: Option<f64>,
    pub grad: Vec<f64>,
    pub grad_norm: f64,
    pub metric_cond: f64,
    /// Step size applied after this record, if a step was taken.
    pub eta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Status {
    Converged,
    MaxIters,
    Error(Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub records: Vec<Record>,
    pub status: Status,
}

impl Trajectory {
    pub fn last(&self) -> Option<&Record> {
        self.records.last()
    }

    pub fn converged(&self) -> bool {
        self.status == Status::Converged
    }
}

/// Energy, roots, `⟨H⟩` and `∂E/∂θ` of the functional at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub energy: f64,
    pub roots: Vec<f64>,
    pub expval_h: f64,
    pub grad: Vec<f64>,
}

pub fn evaluate(
    c: &Circuit,
    theta: &[f64],
    cache: &PowerCache,
    functional: Functional,
    options: &RunOptions,
    iter: usize,
) -> Result<Evaluation> {
    let k = functional.order();
    let table = match options.shots {
        Some(s) => sampled_moment_table(
            c,
            theta,
            cache,
            2 * k - 1,
            s.shots,
            s.seed.wrapping_add(iter as u64),
        )?,
        None => moment_table_with_gradients(c, theta, cache, 2 * k - 1, options.gradient_method)?,
    };
    let result = pds_solve(&table, k, options.pds_regularization)?;
    let grad = pds_gradient(&table, k, &result)?;
    Ok(Evaluation {
        energy: result.energy,
        roots: result.roots,
        expval_h: table.values[1],
        grad,
    })
}

/// Iterate evaluate → record → convergence test → step.
pub fn run(
    problem: &Problem,
    functional: Functional,
    kind: MetricKind,
    options: &RunOptions,
) -> Result<Trajectory> {
    let k = functional.order();
    if k == 0 {
        return Err(Error::InvalidArgument(
            "PDS order must be at least 1".into(),
        ));
    }
    if problem.circuit.n_qubits() != problem.hamiltonian.n_qubits() {
        return Err(Error::QubitMismatch {
            left: problem.circuit.n_qubits(),
            right: problem.hamiltonian.n_qubits(),
        });
    }
    problem.circuit.validate()?;
    problem.circuit.check_theta(&problem.theta0)?;
    let cache = PowerCache::new(&problem.hamiltonian, 2 * k - 1)?;

    let mut theta = problem.theta0.clone();
    let mut records = Vec::new();
    let status = loop {
        let iter = records.len();
        let eval = match evaluate(&problem.circuit, &theta, &cache, functional, options, iter) {
            Ok(e) => e,
            Err(e) => break Status::Error(e),
        };
        let r = metric(&problem.circuit, &theta, kind)?;
        let (deviation, fid) = match &problem.reference {
            Some(reference) => {
                let psi = apply_circuit(&problem.circuit, &theta)?;
                (
                    Some(eval.energy - reference.ground_energy()),
                    Some(fidelity(&psi, &reference.ground_space)?),
                )
            }
            None => (None, None),
        };
        let grad_norm = eval.grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        let done = if grad_norm < options.tol {
            Some(Status::Converged)
        } else if iter == options.max_iters {
            Some(Status::MaxIters)
        } else {
            None
        };
        let eta = done.is_none().then(|| options.schedule.eta(iter + 1));
        records.push(Record {
            iter,
            theta: theta.clone(),
            energy: eval.energy,
            roots: eval.roots,
            expval_h: eval.expval_h,
            deviation,
            fidelity: fid,
            grad_norm,
            metric_cond: condition_number(&r),
            eta,
            grad: eval.grad,
        });
        match (done, eta) {
            (Some(status), _) => break status,
            (None, Some(eta)) => {
                let g = &records[iter].grad;
                theta = step(&theta, g, &r, eta, options.metric_regularization);
            }
            (None, None) => unreachable!(),
        }
    };
    Ok(Trajectory { records, status })
}
