//! Built-in benchmark Hamiltonians, their ansatz circuits and reference data.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::optim::{Problem, Schedule};
use crate::pauli::{PauliSum, PauliTerm};
use crate::statesim::{exact_eigensystem, Angle, Circuit, Eigensystem, DENSE_QUBIT_LIMIT};

pub const MODEL_NAMES: [&str; 4] = ["toy_a", "toy_b", "h2_effective", "heisenberg_2x2"];

/// Nearest-neighbour bonds of the 2×2 plaquette, qubits numbered row-major.
pub const PLAQUETTE_BONDS: [(usize, usize); 4] = [(0, 1), (2, 3), (0, 2), (1, 3)];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelOptions {
    /// Heisenberg exchange.
    pub j: f64,
    /// Heisenberg field.
    pub b: f64,
}

impl Default for ModelOptions {
    fn default() -> Self {
        ModelOptions { j: 0.1, b: 1.0 }
    }
}

#[derive(Debug, Clone)]
pub struct ModelBundle {
    pub name: String,
    pub hamiltonian: PauliSum,
    pub circuit: Circuit,
    pub theta0: Vec<f64>,
    pub schedule: Schedule,
    /// `None` above the dense simulation limit.
    pub reference: Option<Eigensystem>,
}

impl ModelBundle {
    fn new(
        name: &str,
        hamiltonian: PauliSum,
        circuit: Circuit,
        theta0: Vec<f64>,
        schedule: Schedule,
    ) -> Result<Self> {
        let reference = if hamiltonian.n_qubits() <= DENSE_QUBIT_LIMIT {
            Some(exact_eigensystem(&hamiltonian)?)
        } else {
            None
        };
        Ok(ModelBundle {
            name: name.to_string(),
            hamiltonian,
            circuit,
            theta0,
            schedule,
            reference,
        })
    }

    /// Bundle for an arbitrary Hamiltonian with the hardware-efficient template.
    pub fn from_hamiltonian(name: &str, hamiltonian: PauliSum, layers: usize) -> Result<Self> {
        let n = hamiltonian.n_qubits();
        let circuit = hardware_efficient(n, layers);
        let theta0 = (0..circuit.n_params())
            .map(|i| 0.1 * (i + 1) as f64)
            .collect();
        Self::new(name, hamiltonian, circuit, theta0, Schedule::Constant(0.05))
    }

    pub fn eta(&self) -> f64 {
        match self.schedule {
            Schedule::Constant(eta) | Schedule::InverseIteration(eta) => eta,
        }
    }

    pub fn ground_energy(&self) -> Option<f64> {
        self.reference.as_ref().map(Eigensystem::ground_energy)
    }

    pub fn problem(&self, theta0: Option<Vec<f64>>) -> Problem {
        Problem {
            hamiltonian: self.hamiltonian.clone(),
            circuit: self.circuit.clone(),
            theta0: theta0.unwrap_or_else(|| self.theta0.clone()),
            reference: self.reference.clone(),
        }
    }
}

pub fn canonical_name(name: &str) -> Option<&'static str> {
    match name.to_ascii_lowercase().replace('-', "_").as_str() {
        "toy_a" | "a" => Some("toy_a"),
        "toy_b" | "b" => Some("toy_b"),
        "h2_effective" | "h2" => Some("h2_effective"),
        "heisenberg_2x2" | "heisenberg" => Some("heisenberg_2x2"),
        _ => None,
    }
}

pub fn build_model(name: &str, options: ModelOptions) -> Result<ModelBundle> {
    let canonical = canonical_name(name).ok_or_else(|| Error::UnknownModel(name.to_string()))?;
    match canonical {
        "toy_a" => ModelBundle::new(
            canonical,
            toy_a_hamiltonian(),
            toy_a_ansatz(),
            vec![1.0, 1.0],
            Schedule::Constant(0.05),
        ),
        "toy_b" => ModelBundle::new(
            canonical,
            toy_b_hamiltonian(),
            toy_b_ansatz(),
            vec![1.0, 1.0],
            Schedule::Constant(0.05),
        ),
        "h2_effective" => ModelBundle::new(
            canonical,
            h2_hamiltonian(),
            h2_ansatz(),
            vec![7.0 * PI / 32.0, PI / 2.0, 0.0, 0.0],
            Schedule::Constant(0.05),
        ),
        _ => ModelBundle::new(
            canonical,
            heisenberg_hamiltonian(options.j, options.b)?,
            heisenberg_ansatz(),
            vec![-3.0],
            Schedule::InverseIteration(1.0),
        ),
    }
}

/// `1.5 I + 0.5 (I⊗Z − 2 Z⊗Z)`, diagonal `(1, 2, 3, 0)`.
pub fn toy_a_hamiltonian() -> PauliSum {
    PauliSum::from_pairs([(1.5, "II"), (0.5, "IZ"), (-1.0, "ZZ")]).expect("valid literal")
}

/// `I + 0.5 (I⊗Z − Z⊗Z)`.
pub fn toy_b_hamiltonian() -> PauliSum {
    PauliSum::from_pairs([(1.0, "II"), (0.5, "IZ"), (-0.5, "ZZ")]).expect("valid literal")
}

pub fn h2_hamiltonian() -> PauliSum {
    PauliSum::from_pairs([(0.4, "ZI"), (0.4, "IZ"), (0.2, "XX")]).expect("valid literal")
}

/// `J Σ_bonds (XX + YY + ZZ) + B Σ_i Z_i` on the 2×2 plaquette.
pub fn heisenberg_hamiltonian(j: f64, b: f64) -> Result<PauliSum> {
    let mut h = PauliSum::new(4);
    for &(p, q) in &PLAQUETTE_BONDS {
        for letter in ['X', 'Y', 'Z'] {
            let mut s = ['I'; 4];
            s[p] = letter;
            s[q] = letter;
            h.add_term(PauliTerm::from_letters(&s.iter().collect::<String>(), j)?)?;
        }
    }
    h = h.add(&magnetization(4).scale(b.into()))?;
    Ok(h.simplified(crate::pauli::DEFAULT_DROP_TOL))
}

/// `Σ_i Z_i`.
pub fn magnetization(n_qubits: usize) -> PauliSum {
    let mut m = PauliSum::new(n_qubits);
    for q in 0..n_qubits {
        let letters: String = (0..n_qubits)
            .map(|i| if i == q { 'Z' } else { 'I' })
            .collect();
        m.add_term(PauliTerm::from_letters(&letters, 1.0).expect("valid letters"))
            .expect("same width");
    }
    m
}

/// `CRY(θ₁)·RX(θ₀)` on `|00⟩`, control 0, target 1.
pub fn toy_a_ansatz() -> Circuit {
    Circuit::new(2)
        .rx(0, Angle::param(0))
        .cry(0, 1, Angle::param(1))
}

/// `CRY(θ₁)·RX(θ₀)⊗RX(θ₀)` on `|01⟩`.
pub fn toy_b_ansatz() -> Circuit {
    Circuit::new(2)
        .with_initial_bits("01")
        .rx(0, Angle::param(0))
        .rx(1, Angle::param(0))
        .cry(0, 1, Angle::param(1))
}

/// `RY(2θ₂)⊗RY(2θ₃) · CNOT · RY(2θ₀)⊗RY(2θ₁)` on `|00⟩`.
pub fn h2_ansatz() -> Circuit {
    Circuit::new(2)
        .ry(0, Angle::scaled(0, 2.0))
        .ry(1, Angle::scaled(1, 2.0))
        .cnot(0, 1)
        .ry(0, Angle::scaled(2, 2.0))
        .ry(1, Angle::scaled(3, 2.0))
}

/// One RY layer with rotations `(θ, 0, 3, 3)` followed by a CNOT ring.
pub fn heisenberg_ansatz() -> Circuit {
    Circuit::new(4)
        .ry(0, Angle::param(0))
        .ry(1, Angle::fixed(0.0))
        .ry(2, Angle::fixed(3.0))
        .ry(3, Angle::fixed(3.0))
        .cnot(1, 0)
        .cnot(3, 1)
        .cnot(3, 2)
        .cnot(0, 2)
}

/// `layers` repetitions of (RY on every qubit, CNOT chain closed into a ring),
/// then a final RY layer. Parameters are numbered layer by layer.
pub fn hardware_efficient(n_qubits: usize, layers: usize) -> Circuit {
    let mut c = Circuit::new(n_qubits);
    let mut p = 0;
    for layer in 0..=layers {
        for q in 0..n_qubits {
            c = c.ry(q, Angle::param(p));
            p += 1;
        }
        if layer == layers {
            break;
        }
        for q in 0..n_qubits.saturating_sub(1) {
            c = c.cnot(q, q + 1);
        }
        if n_qubits > 2 {
            c = c.cnot(n_qubits - 1, 0);
        }
    }
    c
}

/// Parse the Hamiltonian text format and require a Hermitian result.
pub fn load_hamiltonian(text: &str) -> Result<PauliSum> {
    let h = PauliSum::from_text(text)?;
    if !h.is_hermitian(1e-12) {
        return Err(Error::NonHermitian(h.max_imaginary()));
    }
    Ok(h)
}

pub fn serialize_hamiltonian(h: &PauliSum) -> String {
    h.to_text()
}
