//! Dense statevector simulation of parametrized circuits.
//!
//! Rotations follow `R_σ(α) = exp(−iασ/2)`. Basis index bit `n − 1 − q`
//! holds qubit `q`, matching [`crate::pauli`].

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::PauliSum;

/// Largest register handled by the dense eigensolver.
pub const DENSE_QUBIT_LIMIT: usize = 12;

/// Tolerance used to decide which eigenvalues belong to the ground space.
pub const GROUND_SPACE_TOL: f64 = 1e-9;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

#[derive(Debug, Clone, PartialEq)]
pub struct State {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl State {
    /// Computational basis state `|index⟩`.
    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut amps = vec![ZERO; 1 << n_qubits];
        amps[index] = ONE;
        State { n_qubits, amps }
    }

    pub fn zero(n_qubits: usize) -> Self {
        State {
            n_qubits,
            amps: vec![ZERO; 1 << n_qubits],
        }
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "amplitude vector length {len} is not a power of two"
            )));
        }
        Ok(State {
            n_qubits: len.trailing_zeros() as usize,
            amps,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &State) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalized(&self) -> State {
        let n = self.norm_sqr().sqrt();
        State {
            n_qubits: self.n_qubits,
            amps: self.amps.iter().map(|a| a / n).collect(),
        }
    }

    pub fn scaled(&self, factor: Complex64) -> State {
        State {
            n_qubits: self.n_qubits,
            amps: self.amps.iter().map(|a| a * factor).collect(),
        }
    }

    pub fn sub(&self, other: &State) -> State {
        State {
            n_qubits: self.n_qubits,
            amps: self
                .amps
                .iter()
                .zip(&other.amps)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    fn add_assign(&mut self, other: &State) {
        for (a, b) in self.amps.iter_mut().zip(&other.amps) {
            *a += b;
        }
    }

    /// `|amplitude|²` per basis index.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    fn stride(&self, q: usize) -> usize {
        1 << (self.n_qubits - 1 - q)
    }

    /// Apply a 2×2 matrix to qubit `q`, optionally only where `control` is 1.
    pub(crate) fn apply_single(
        &mut self,
        q: usize,
        m: [[Complex64; 2]; 2],
        control: Option<usize>,
    ) {
        let t = self.stride(q);
        let cmask = control.map(|c| self.stride(c));
        for i in 0..self.amps.len() {
            if i & t != 0 {
                continue;
            }
            if let Some(cm) = cmask {
                if i & cm == 0 {
                    continue;
                }
            }
            let j = i | t;
            let (a0, a1) = (self.amps[i], self.amps[j]);
            self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
            self.amps[j] = m[1][0] * a0 + m[1][1] * a1;
        }
    }

    fn zero_where_clear(&mut self, q: usize) {
        let cm = self.stride(q);
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & cm == 0 {
                *a = ZERO;
            }
        }
    }

    /// `P|ψ⟩` for every term of `s`, summed.
    pub fn apply_pauli_sum(&self, s: &PauliSum) -> State {
        let mut out = State::zero(self.n_qubits);
        for term in s.iter() {
            let (string, c) = (term.string(), term.coeff());
            for (b, a) in self.amps.iter().enumerate() {
                let (row, phase) = string.apply_to_basis(b);
                out.amps[row] += c * phase * a;
            }
        }
        out
    }
}

/// Gate angle: a frozen value or `scale · θ[index]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Angle {
    Fixed(f64),
    Param { index: usize, scale: f64 },
}

impl Angle {
    pub fn param(index: usize) -> Self {
        Angle::Param { index, scale: 1.0 }
    }

    pub fn scaled(index: usize, scale: f64) -> Self {
        Angle::Param { index, scale }
    }

    pub fn fixed(value: f64) -> Self {
        Angle::Fixed(value)
    }

    pub fn value(&self, theta: &[f64]) -> f64 {
        match *self {
            Angle::Fixed(v) => v,
            Angle::Param { index, scale } => scale * theta[index],
        }
    }

    fn times(&self, factor: f64) -> Angle {
        match *self {
            Angle::Fixed(v) => Angle::Fixed(v * factor),
            Angle::Param { index, scale } => Angle::Param {
                index,
                scale: scale * factor,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    Rx {
        qubit: usize,
        angle: Angle,
    },
    Ry {
        qubit: usize,
        angle: Angle,
    },
    Rz {
        qubit: usize,
        angle: Angle,
    },
    /// Y rotation of `target` applied when `control` is 1.
    Cry {
        control: usize,
        target: usize,
        angle: Angle,
    },
    Cnot {
        control: usize,
        target: usize,
    },
    X {
        qubit: usize,
    },
}

impl Gate {
    pub fn angle(&self) -> Option<Angle> {
        match *self {
            Gate::Rx { angle, .. } | Gate::Ry { angle, .. } | Gate::Rz { angle, .. } => Some(angle),
            Gate::Cry { angle, .. } => Some(angle),
            Gate::Cnot { .. } | Gate::X { .. } => None,
        }
    }

    fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::Rx { qubit, .. } | Gate::Ry { qubit, .. } | Gate::Rz { qubit, .. } => {
                vec![qubit]
            }
            Gate::X { qubit } => vec![qubit],
            Gate::Cry {
                control, target, ..
            }
            | Gate::Cnot { control, target } => vec![control, target],
        }
    }

    /// One-qubit rotations are the gates the two-point shift rule applies to.
    pub fn is_single_qubit_rotation(&self) -> bool {
        matches!(self, Gate::Rx { .. } | Gate::Ry { .. } | Gate::Rz { .. })
    }

    fn apply(&self, psi: &mut State, theta: &[f64], offset: f64) {
        match *self {
            Gate::Rx { qubit, angle } => {
                psi.apply_single(qubit, rx(angle.value(theta) + offset), None)
            }
            Gate::Ry { qubit, angle } => {
                psi.apply_single(qubit, ry(angle.value(theta) + offset), None)
            }
            Gate::Rz { qubit, angle } => {
                psi.apply_single(qubit, rz(angle.value(theta) + offset), None)
            }
            Gate::Cry {
                control,
                target,
                angle,
            } => psi.apply_single(target, ry(angle.value(theta) + offset), Some(control)),
            Gate::Cnot { control, target } => psi.apply_single(target, PAULI_X, Some(control)),
            Gate::X { qubit } => psi.apply_single(qubit, PAULI_X, None),
        }
    }

    /// Multiply by the Hermitian generator `G` of the rotation.
    fn apply_generator(&self, psi: &mut State) {
        match *self {
            Gate::Rx { qubit, .. } => psi.apply_single(qubit, PAULI_X, None),
            Gate::Ry { qubit, .. } => psi.apply_single(qubit, PAULI_Y, None),
            Gate::Rz { qubit, .. } => psi.apply_single(qubit, PAULI_Z, None),
            Gate::Cry {
                control, target, ..
            } => {
                psi.zero_where_clear(control);
                psi.apply_single(target, PAULI_Y, Some(control));
            }
            Gate::Cnot { .. } | Gate::X { .. } => unreachable!("fixed gates have no generator"),
        }
    }
}

const PAULI_X: [[Complex64; 2]; 2] = [[ZERO, ONE], [ONE, ZERO]];
const PAULI_Y: [[Complex64; 2]; 2] = [
    [ZERO, Complex64 { re: 0.0, im: -1.0 }],
    [Complex64 { re: 0.0, im: 1.0 }, ZERO],
];
const PAULI_Z: [[Complex64; 2]; 2] = [[ONE, ZERO], [ZERO, Complex64 { re: -1.0, im: 0.0 }]];

fn rx(a: f64) -> [[Complex64; 2]; 2] {
    let (s, c) = (a / 2.0).sin_cos();
    [
        [Complex64::new(c, 0.0), Complex64::new(0.0, -s)],
        [Complex64::new(0.0, -s), Complex64::new(c, 0.0)],
    ]
}

fn ry(a: f64) -> [[Complex64; 2]; 2] {
    let (s, c) = (a / 2.0).sin_cos();
    [
        [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
        [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
    ]
}

fn rz(a: f64) -> [[Complex64; 2]; 2] {
    let (s, c) = (a / 2.0).sin_cos();
    [[Complex64::new(c, -s), ZERO], [ZERO, Complex64::new(c, s)]]
}

/// Ordered gate list acting on a basis-state input.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    initial: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Circuit {
            n_qubits,
            initial: 0,
            gates: Vec::new(),
        }
    }

    /// Start from the basis state spelled by `bits` (qubit 0 first), e.g. `"01"`.
    pub fn with_initial_bits(mut self, bits: &str) -> Self {
        self.initial = bits
            .chars()
            .fold(0usize, |acc, ch| (acc << 1) | usize::from(ch == '1'));
        self
    }

    pub fn push(mut self, gate: Gate) -> Self {
        self.gates.push(gate);
        self
    }

    pub fn rx(self, qubit: usize, angle: Angle) -> Self {
        self.push(Gate::Rx { qubit, angle })
    }

    pub fn ry(self, qubit: usize, angle: Angle) -> Self {
        self.push(Gate::Ry { qubit, angle })
    }

    pub fn rz(self, qubit: usize, angle: Angle) -> Self {
        self.push(Gate::Rz { qubit, angle })
    }

    pub fn cry(self, control: usize, target: usize, angle: Angle) -> Self {
        self.push(Gate::Cry {
            control,
            target,
            angle,
        })
    }

    pub fn cnot(self, control: usize, target: usize) -> Self {
        self.push(Gate::Cnot { control, target })
    }

    pub fn x(self, qubit: usize) -> Self {
        self.push(Gate::X { qubit })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn initial_index(&self) -> usize {
        self.initial
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// One more than the largest parameter index referenced by any gate.
    pub fn n_params(&self) -> usize {
        self.gates
            .iter()
            .filter_map(|g| match g.angle() {
                Some(Angle::Param { index, .. }) => Some(index + 1),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }

    /// For each parameter, the `(gate position, angle multiplier)` pairs it drives.
    pub fn bindings(&self) -> Vec<Vec<(usize, f64)>> {
        let mut out = vec![Vec::new(); self.n_params()];
        for (pos, g) in self.gates.iter().enumerate() {
            if let Some(Angle::Param { index, scale }) = g.angle() {
                out[index].push((pos, scale));
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        for g in &self.gates {
            for q in g.qubits() {
                if q >= self.n_qubits {
                    return Err(Error::QubitOutOfRange {
                        index: q,
                        n_qubits: self.n_qubits,
                    });
                }
            }
        }
        if let Some(k) = self.bindings().iter().position(Vec::is_empty) {
            return Err(Error::UnboundParameter(k));
        }
        Ok(())
    }

    pub fn check_theta(&self, theta: &[f64]) -> Result<()> {
        self.validate()?;
        let expected = self.n_params();
        if theta.len() != expected {
            return Err(Error::ParameterCount {
                expected,
                got: theta.len(),
            });
        }
        Ok(())
    }

    /// Rewrite every controlled-RY as one-qubit RY rotations and CNOTs:
    /// `CRY(α) = CNOT · RY(−α/2) · CNOT · RY(α/2)` (rightmost first).
    pub fn decompose_controlled(&self) -> Circuit {
        let mut out = Circuit {
            n_qubits: self.n_qubits,
            initial: self.initial,
            gates: Vec::with_capacity(self.gates.len()),
        };
        for g in &self.gates {
            match *g {
                Gate::Cry {
                    control,
                    target,
                    angle,
                } => {
                    out.gates.push(Gate::Ry {
                        qubit: target,
                        angle: angle.times(0.5),
                    });
                    out.gates.push(Gate::Cnot { control, target });
                    out.gates.push(Gate::Ry {
                        qubit: target,
                        angle: angle.times(-0.5),
                    });
                    out.gates.push(Gate::Cnot { control, target });
                }
                other => out.gates.push(other),
            }
        }
        out
    }

    fn run(&self, theta: &[f64], shifted: Option<(usize, f64)>) -> State {
        let mut psi = State::basis(self.n_qubits, self.initial);
        for (pos, g) in self.gates.iter().enumerate() {
            let offset = match shifted {
                Some((p, d)) if p == pos => d,
                _ => 0.0,
            };
            g.apply(&mut psi, theta, offset);
        }
        psi
    }

    /// Output state with the angle of the gate at `position` offset by `delta`.
    pub fn apply_shifted(&self, theta: &[f64], position: usize, delta: f64) -> Result<State> {
        self.check_theta(theta)?;
        Ok(self.run(theta, Some((position, delta))))
    }
}

/// Evolve the circuit's initial basis state through all gates.
pub fn apply_circuit(c: &Circuit, theta: &[f64]) -> Result<State> {
    c.check_theta(theta)?;
    Ok(c.run(theta, None))
}

/// `⟨bra|s|ket⟩`.
pub fn matrix_element(bra: &State, s: &PauliSum, ket: &State) -> Result<Complex64> {
    if bra.n_qubits != s.n_qubits() || ket.n_qubits != s.n_qubits() {
        return Err(Error::QubitMismatch {
            left: ket.n_qubits,
            right: s.n_qubits(),
        });
    }
    let mut total = ZERO;
    for term in s.iter() {
        let (string, c) = (term.string(), term.coeff());
        let mut acc = ZERO;
        for (b, a) in ket.amps.iter().enumerate() {
            let (row, phase) = string.apply_to_basis(b);
            acc += bra.amps[row].conj() * phase * a;
        }
        total += c * acc;
    }
    Ok(total)
}

/// Real expectation value of a Hermitian sum.
pub fn expectation(psi: &State, s: &PauliSum) -> Result<f64> {
    let v = matrix_element(psi, s, psi)?;
    let scale: f64 = s.iter().map(|t| t.coeff().norm()).sum::<f64>().max(1.0);
    if v.im.abs() > 1e-10 * scale {
        return Err(Error::NonHermitian(v.im));
    }
    Ok(v.re)
}

/// Exact `∂|φ(θ)⟩/∂θ_k` by the product rule over every gate bound to `θ_k`.
pub fn state_derivative(c: &Circuit, theta: &[f64], k: usize) -> Result<State> {
    c.check_theta(theta)?;
    Ok(derivatives_for(c, theta, &[k])
        .pop()
        .expect("one index requested"))
}

/// `∂|φ⟩/∂θ_k` for every parameter, sharing one forward pass.
pub fn state_derivatives(c: &Circuit, theta: &[f64]) -> Result<Vec<State>> {
    c.check_theta(theta)?;
    let all: Vec<usize> = (0..c.n_params()).collect();
    Ok(derivatives_for(c, theta, &all))
}

fn derivatives_for(c: &Circuit, theta: &[f64], params: &[usize]) -> Vec<State> {
    // prefix[j] = state after gates 0..=j
    let mut prefix = Vec::with_capacity(c.gates.len());
    let mut psi = State::basis(c.n_qubits, c.initial);
    for g in &c.gates {
        g.apply(&mut psi, theta, 0.0);
        prefix.push(psi.clone());
    }
    let bindings = c.bindings();
    params
        .iter()
        .map(|&k| {
            let mut d = State::zero(c.n_qubits);
            for &(pos, scale) in &bindings[k] {
                let mut v = prefix[pos].clone();
                c.gates[pos].apply_generator(&mut v);
                let mut v = v.scaled(Complex64::new(0.0, -scale / 2.0));
                for g in &c.gates[pos + 1..] {
                    g.apply(&mut v, theta, 0.0);
                }
                d.add_assign(&v);
            }
            d
        })
        .collect()
}

/// Squared norm of the projection of `psi` onto the span of an orthonormal basis.
pub fn fidelity(psi: &State, ground_space: &[State]) -> Result<f64> {
    let mut dev: f64 = 0.0;
    for (i, u) in ground_space.iter().enumerate() {
        if u.n_qubits != psi.n_qubits {
            return Err(Error::QubitMismatch {
                left: psi.n_qubits,
                right: u.n_qubits,
            });
        }
        for (j, v) in ground_space.iter().enumerate().skip(i) {
            let target = if i == j { ONE } else { ZERO };
            dev = dev.max((u.inner(v) - target).norm());
        }
    }
    if dev > 1e-8 {
        return Err(Error::NonOrthonormal(dev));
    }
    let f: f64 = ground_space.iter().map(|u| u.inner(psi).norm_sqr()).sum();
    Ok(f.clamp(0.0, 1.0))
}

#[derive(Debug, Clone)]
pub struct Eigensystem {
    /// All eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    /// Eigenvectors in the order of `eigenvalues`.
    pub eigenvectors: Vec<State>,
    /// Orthonormal basis of the eigenspace within [`GROUND_SPACE_TOL`] of the minimum.
    pub ground_space: Vec<State>,
}

impl Eigensystem {
    pub fn ground_energy(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn degeneracy(&self) -> usize {
        self.ground_space.len()
    }
}

/// Full dense diagonalization (Hermitian input assumed).
pub fn exact_eigensystem(s: &PauliSum) -> Result<Eigensystem> {
    let n = s.n_qubits();
    if n > DENSE_QUBIT_LIMIT {
        return Err(Error::SizeLimit {
            n_qubits: n,
            limit: DENSE_QUBIT_LIMIT,
        });
    }
    let m = s.to_dense();
    let dim = m.nrows();
    let diagonal = (0..dim).all(|r| (0..dim).all(|c| r == c || m[(r, c)] == ZERO));

    let mut pairs: Vec<(f64, Vec<Complex64>)> = if diagonal {
        (0..dim)
            .map(|i| {
                let mut v = vec![ZERO; dim];
                v[i] = ONE;
                (m[(i, i)].re, v)
            })
            .collect()
    } else {
        let eig = hermitian_eigen(m);
        eig.0.into_iter().zip(eig.1).collect()
    };
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let e0 = pairs[0].0;
    let degeneracy = pairs
        .iter()
        .take_while(|(e, _)| *e - e0 <= GROUND_SPACE_TOL)
        .count();
    let (eigenvalues, eigenvectors): (Vec<f64>, Vec<State>) = pairs
        .into_iter()
        .map(|(e, amps)| (e, State { n_qubits: n, amps }))
        .unzip();
    Ok(Eigensystem {
        ground_space: eigenvectors[..degeneracy].to_vec(),
        eigenvalues,
        eigenvectors,
    })
}

fn hermitian_eigen(m: DMatrix<Complex64>) -> (Vec<f64>, Vec<Vec<Complex64>>) {
    let eig = m.symmetric_eigen();
    let vecs = (0..eig.eigenvectors.ncols())
        .map(|j| eig.eigenvectors.column(j).iter().copied().collect())
        .collect();
    (eig.eigenvalues.iter().copied().collect(), vecs)
}
