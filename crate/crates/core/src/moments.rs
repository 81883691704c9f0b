//! Hamiltonian moments `⟨H^n⟩` of circuit states and their parameter derivatives.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::pauli::{
    group_basis, powers_with, qwc_groups, string_union, Pauli, PauliString, PauliSum, PauliTerm,
    DEFAULT_DROP_TOL, DEFAULT_MAX_POWER,
};
use crate::statesim::{apply_circuit, expectation, state_derivatives, Circuit, State};

/// `H^0 … H^max_order`, reduced once and shared read-only afterwards.
#[derive(Debug, Clone)]
pub struct PowerCache {
    powers: Vec<PauliSum>,
}

impl PowerCache {
    pub fn new(h: &PauliSum, max_order: usize) -> Result<Self> {
        Self::with_limits(h, max_order, DEFAULT_MAX_POWER, DEFAULT_DROP_TOL)
    }

    pub fn with_limits(
        h: &PauliSum,
        max_order: usize,
        max_power: u32,
        drop_tol: f64,
    ) -> Result<Self> {
        if !h.is_hermitian(1e-12) {
            return Err(Error::NonHermitian(h.max_imaginary()));
        }
        let max_order = u32::try_from(max_order).unwrap_or(u32::MAX);
        Ok(PowerCache {
            powers: powers_with(h, max_order, max_power, drop_tol)?,
        })
    }

    pub fn max_order(&self) -> usize {
        self.powers.len() - 1
    }

    pub fn n_qubits(&self) -> usize {
        self.powers[0].n_qubits()
    }

    pub fn hamiltonian(&self) -> &PauliSum {
        &self.powers[self.powers.len().min(2) - 1]
    }

    pub fn power(&self, n: usize) -> &PauliSum {
        &self.powers[n]
    }

    pub fn powers(&self) -> &[PauliSum] {
        &self.powers
    }

    fn check(&self, max_order: usize) -> Result<()> {
        if max_order > self.max_order() {
            return Err(Error::MissingMoments {
                required: max_order,
                available: self.max_order(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentTable {
    pub max_order: usize,
    /// `values[n] = ⟨H^n⟩`, with `values[0] = 1`.
    pub values: Vec<f64>,
    /// `gradients[k][n] = ∂⟨H^n⟩/∂θ_k`.
    pub gradients: Option<Vec<Vec<f64>>>,
}

impl MomentTable {
    pub fn from_values(values: Vec<f64>) -> Self {
        MomentTable {
            max_order: values.len().saturating_sub(1),
            values,
            gradients: None,
        }
    }

    pub fn with_gradients(mut self, gradients: Vec<Vec<f64>>) -> Self {
        self.gradients = Some(gradients);
        self
    }

    pub fn n_params(&self) -> usize {
        self.gradients.as_ref().map_or(0, Vec::len)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GradientMethod {
    #[default]
    Analytic,
    /// Two-point ±π/2 shift per one-qubit rotation occurrence.
    Shift,
}

/// `⟨H^n⟩` for `n = 0..=max_order` in a given state.
pub fn state_moments(psi: &State, cache: &PowerCache, max_order: usize) -> Result<Vec<f64>> {
    cache.check(max_order)?;
    let mut values = Vec::with_capacity(max_order + 1);
    values.push(1.0);
    for n in 1..=max_order {
        values.push(expectation(psi, cache.power(n))?);
    }
    Ok(values)
}

pub fn moment_table(
    c: &Circuit,
    theta: &[f64],
    cache: &PowerCache,
    max_order: usize,
) -> Result<MomentTable> {
    if max_order < 1 {
        return Err(Error::InvalidArgument(
            "max_order must be at least 1".into(),
        ));
    }
    let psi = apply_circuit(c, theta)?;
    Ok(MomentTable::from_values(state_moments(
        &psi, cache, max_order,
    )?))
}

/// Moment table together with its `∂/∂θ` columns.
pub fn moment_table_with_gradients(
    c: &Circuit,
    theta: &[f64],
    cache: &PowerCache,
    max_order: usize,
    method: GradientMethod,
) -> Result<MomentTable> {
    let table = moment_table(c, theta, cache, max_order)?;
    let grads = moment_gradients(c, theta, cache, max_order, method)?;
    Ok(table.with_gradients(grads))
}

/// `∂⟨H^n⟩/∂θ_k` as `[k][n]`, `n = 0..=max_order`.
pub fn moment_gradients(
    c: &Circuit,
    theta: &[f64],
    cache: &PowerCache,
    max_order: usize,
    method: GradientMethod,
) -> Result<Vec<Vec<f64>>> {
    cache.check(max_order)?;
    match method {
        GradientMethod::Analytic => analytic_gradients(c, theta, cache, max_order),
        GradientMethod::Shift => shift_gradients(c, theta, cache, max_order),
    }
}

fn analytic_gradients(
    c: &Circuit,
    theta: &[f64],
    cache: &PowerCache,
    max_order: usize,
) -> Result<Vec<Vec<f64>>> {
    let psi = apply_circuit(c, theta)?;
    let derivs = state_derivatives(c, theta)?;
    // H^n|φ⟩ once per order, then 2·Re⟨∂_kφ|H^n|φ⟩ for every k.
    let images: Vec<State> = (1..=max_order)
        .map(|n| psi.apply_pauli_sum(cache.power(n)))
        .collect();
    Ok(derivs
        .iter()
        .map(|d| {
            let mut row = Vec::with_capacity(max_order + 1);
            row.push(0.0);
            row.extend(images.iter().map(|v| 2.0 * d.inner(v).re));
            row
        })
        .collect())
}

fn shift_gradients(
    c: &Circuit,
    theta: &[f64],
    cache: &PowerCache,
    max_order: usize,
) -> Result<Vec<Vec<f64>>> {
    shift_rule(c, theta, max_order, |psi| {
        state_moments(psi, cache, max_order)
    })
}

fn shift_rule(
    c: &Circuit,
    theta: &[f64],
    max_order: usize,
    mut eval: impl FnMut(&State) -> Result<Vec<f64>>,
) -> Result<Vec<Vec<f64>>> {
    let circuit = c.decompose_controlled();
    let mut grads = vec![vec![0.0; max_order + 1]; circuit.n_params()];
    for (k, occurrences) in circuit.bindings().iter().enumerate() {
        for &(pos, scale) in occurrences {
            if !circuit.gates()[pos].is_single_qubit_rotation() {
                return Err(Error::NotShiftable(pos));
            }
            let plus = eval(&circuit.apply_shifted(theta, pos, FRAC_PI_2)?)?;
            let minus = eval(&circuit.apply_shifted(theta, pos, -FRAC_PI_2)?)?;
            for n in 1..=max_order {
                grads[k][n] += scale * 0.5 * (plus[n] - minus[n]);
            }
        }
    }
    Ok(grads)
}

/// Sampled estimate of one term's expectation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TermEstimate {
    pub term: PauliTerm,
    pub mean: f64,
    pub std_error: f64,
}

/// Bitstring histogram of one QWC group measured in its shared basis.
#[derive(Debug, Clone)]
pub struct GroupSample {
    pub basis: PauliString,
    pub counts: Vec<u64>,
    pub terms: Vec<TermEstimate>,
}

impl GroupSample {
    fn shots(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Mean and standard error of `Σ w_i P_i` over the group's shots.
    fn weighted(&self, weights: &[(PauliString, f64)]) -> (f64, f64) {
        let shots = self.shots() as f64;
        let (mut s1, mut s2) = (0.0, 0.0);
        for (b, &count) in self.counts.iter().enumerate() {
            if count == 0 {
                continue;
            }
            let v: f64 = weights.iter().map(|(s, w)| w * parity(b, s)).sum();
            s1 += count as f64 * v;
            s2 += count as f64 * v * v;
        }
        let mean = s1 / shots;
        let var = (s2 / shots - mean * mean).max(0.0);
        (mean, (var / shots).sqrt())
    }
}

fn parity(b: usize, s: &PauliString) -> f64 {
    if (b as u64 & s.support()).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn rotate_to_basis(psi: &State, basis: &PauliString) -> State {
    let n = psi.n_qubits();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let hadamard = [
        [Complex64::new(h, 0.0), Complex64::new(h, 0.0)],
        [Complex64::new(h, 0.0), Complex64::new(-h, 0.0)],
    ];
    // H·S† maps Y to Z.
    let hs_dag = [
        [Complex64::new(h, 0.0), Complex64::new(0.0, -h)],
        [Complex64::new(h, 0.0), Complex64::new(0.0, h)],
    ];
    let mut out = psi.clone();
    for q in 0..n {
        match basis.letter(q, n) {
            Pauli::X => out.apply_single(q, hadamard, None),
            Pauli::Y => out.apply_single(q, hs_dag, None),
            Pauli::I | Pauli::Z => {}
        }
    }
    out
}

/// Measure every QWC group `shots` times and estimate each member term.
/// Term standard errors use `var(P) = 1 − ⟨P⟩²`.
pub fn sampled_expectation(
    psi: &State,
    groups: &[Vec<PauliTerm>],
    shots: u64,
    seed: u64,
) -> Result<Vec<GroupSample>> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(groups.len());
    for group in groups {
        let basis = group_basis(group);
        let probs = rotate_to_basis(psi, &basis).probabilities();
        let dist = WeightedIndex::new(&probs)
            .map_err(|e| Error::InvalidArgument(format!("cannot sample state: {e}")))?;
        let mut counts = vec![0u64; probs.len()];
        for _ in 0..shots {
            counts[dist.sample(&mut rng)] += 1;
        }
        let mut sample = GroupSample {
            basis,
            counts,
            terms: Vec::with_capacity(group.len()),
        };
        for term in group {
            let (mean, _) = sample.weighted(&[(term.string(), 1.0)]);
            let std_error = ((1.0 - mean * mean).max(0.0) / shots as f64).sqrt();
            sample.terms.push(TermEstimate {
                term: *term,
                mean,
                std_error,
            });
        }
        out.push(sample);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledMoments {
    pub values: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub n_groups: usize,
}

/// Shot-noise estimate of `⟨H^1⟩ … ⟨H^max_order⟩` from one QWC partition of
/// all strings the moments share. Errors include within-group covariances.
pub fn sampled_moments(
    psi: &State,
    cache: &PowerCache,
    max_order: usize,
    shots: u64,
    seed: u64,
) -> Result<SampledMoments> {
    cache.check(max_order)?;
    let union = string_union(&cache.powers()[1..=max_order])?;
    let groups = qwc_groups(&union);
    let samples = sampled_expectation(psi, &groups, shots, seed)?;

    let mut values = vec![1.0];
    let mut std_errors = vec![0.0];
    for n in 1..=max_order {
        let power = cache.power(n);
        let (mut mean, mut var) = (0.0, 0.0);
        for sample in &samples {
            let weights: Vec<(PauliString, f64)> = sample
                .terms
                .iter()
                .map(|t| (t.term.string(), power.coefficient(&t.term.string()).re))
                .filter(|(_, w)| *w != 0.0)
                .collect();
            if weights.is_empty() {
                continue;
            }
            let (m, se) = sample.weighted(&weights);
            mean += m;
            var += se * se;
        }
        values.push(mean);
        std_errors.push(var.sqrt());
    }
    Ok(SampledMoments {
        values,
        std_errors,
        n_groups: groups.len(),
    })
}

/// Moment table whose values and shift-rule gradients are all shot estimates.
/// Every circuit evaluation draws from its own stream derived from `seed`.
pub fn sampled_moment_table(
    c: &Circuit,
    theta: &[f64],
    cache: &PowerCache,
    max_order: usize,
    shots: u64,
    seed: u64,
) -> Result<MomentTable> {
    let psi = apply_circuit(c, theta)?;
    let values = sampled_moments(&psi, cache, max_order, shots, seed)?.values;
    let mut stream = seed;
    let grads = shift_rule(c, theta, max_order, |shifted| {
        stream = stream.wrapping_add(0x9e37_79b9_7f4a_7c15);
        Ok(sampled_moments(shifted, cache, max_order, shots, stream)?.values)
    })?;
    Ok(MomentTable::from_values(values).with_gradients(grads))
}
