//! Shot-count estimates over QWC groups and Pauli-reduction statistics of `H^n`.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::pauli::{powers_with, qwc_groups, string_union, PauliString, PauliSum, PauliTerm};
use crate::pauli::{DEFAULT_DROP_TOL, DEFAULT_MAX_POWER};

#[derive(Debug, Clone, PartialEq, Default)]
pub enum Variances {
    /// `var(P) = 1` for every string.
    #[default]
    WorstCase,
    /// `var(P) = 1 − ⟨P⟩²`; strings without an entry count as `⟨P⟩ = 0`.
    FromExpectations(BTreeMap<PauliString, f64>),
}

impl Variances {
    fn of(&self, s: &PauliString) -> f64 {
        match self {
            Variances::WorstCase => 1.0,
            Variances::FromExpectations(map) => {
                let m = map.get(s).copied().unwrap_or(0.0).clamp(-1.0, 1.0);
                1.0 - m * m
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Covariance {
    /// Off-diagonal covariances set to zero.
    #[default]
    Zero,
    /// `|cov(P_i, P_j)| ≤ √(var_i var_j)`.
    WorstCaseBound,
}

/// `M = (Σ_G √(Σ_{i,j∈G} h_i h_j cov(P_i, P_j)) / ε)²`, identity strings excluded.
pub fn estimate_measurements(
    groups: &[Vec<PauliTerm>],
    variances: &Variances,
    covariance: Covariance,
    epsilon: f64,
) -> Result<f64> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument("epsilon must be positive".into()));
    }
    let mut sum = 0.0;
    for group in groups {
        let weighted = group
            .iter()
            .filter(|t| !t.string().is_identity())
            .map(|t| (t.coeff().norm(), variances.of(&t.string())));
        sum += match covariance {
            Covariance::Zero => weighted.map(|(h, v)| h * h * v).sum::<f64>().sqrt(),
            Covariance::WorstCaseBound => weighted.map(|(h, v)| h * v.sqrt()).sum::<f64>(),
        };
    }
    Ok((sum / epsilon).powi(2))
}

/// Estimate for one sum, grouped with [`qwc_groups`].
pub fn estimate_for_sum(
    s: &PauliSum,
    variances: &Variances,
    covariance: Covariance,
    epsilon: f64,
) -> Result<f64> {
    estimate_measurements(&qwc_groups(s), variances, covariance, epsilon)
}

/// Every term in its own group.
pub fn singleton_groups(s: &PauliSum) -> Vec<Vec<PauliTerm>> {
    s.iter().map(|t| vec![t]).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CostReport {
    /// Unique strings in `H^n`, `n = 1..=max_order`.
    pub counts: Vec<usize>,
    /// Unique strings in the union of `H^1 … H^n`.
    pub cumulative: Vec<usize>,
    /// QWC groups covering the union through `max_order`.
    pub groups: usize,
    /// Worst-case estimate for `⟨H^n⟩` alone.
    pub measurements: Vec<f64>,
    pub total: f64,
    pub epsilon: f64,
}

pub fn reduction_stats(h: &PauliSum, max_order: usize, epsilon: f64) -> Result<CostReport> {
    if max_order == 0 {
        return Err(Error::InvalidArgument(
            "max_order must be at least 1".into(),
        ));
    }
    let order = u32::try_from(max_order).unwrap_or(u32::MAX);
    let powers = powers_with(h, order, DEFAULT_MAX_POWER, DEFAULT_DROP_TOL)?;
    let mut seen: BTreeSet<PauliString> = BTreeSet::new();
    let mut counts = Vec::with_capacity(max_order);
    let mut cumulative = Vec::with_capacity(max_order);
    let mut measurements = Vec::with_capacity(max_order);
    for p in &powers[1..] {
        counts.push(p.len());
        seen.extend(p.strings());
        cumulative.push(seen.len());
        measurements.push(estimate_for_sum(
            p,
            &Variances::WorstCase,
            Covariance::Zero,
            epsilon,
        )?);
    }
    let union = string_union(&powers[1..])?;
    Ok(CostReport {
        counts,
        cumulative,
        groups: qwc_groups(&union).len(),
        total: measurements.iter().sum(),
        measurements,
        epsilon,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{heisenberg_hamiltonian, toy_b_hamiltonian};

    #[test]
    fn single_term() {
        let s = PauliSum::from_pairs([(0.2, "XZ")]).unwrap();
        let m = estimate_for_sum(&s, &Variances::WorstCase, Covariance::Zero, 0.01).unwrap();
        assert!((m - 400.0).abs() < 1e-9);
    }

    #[test]
    fn grouping_never_costs_more() {
        let s = PauliSum::from_pairs([(0.2, "ZI"), (0.2, "IZ")]).unwrap();
        let grouped = estimate_for_sum(&s, &Variances::WorstCase, Covariance::Zero, 0.1).unwrap();
        let split = estimate_measurements(
            &singleton_groups(&s),
            &Variances::WorstCase,
            Covariance::Zero,
            0.1,
        )
        .unwrap();
        assert!((grouped - 0.08 / 0.01).abs() < 1e-9);
        assert!((split - 0.16 / 0.01).abs() < 1e-9);
        let bound =
            estimate_for_sum(&s, &Variances::WorstCase, Covariance::WorstCaseBound, 0.1).unwrap();
        assert!((bound - split).abs() < 1e-9);
    }

    #[test]
    fn identity_and_eigen_expectations_are_free() {
        let s = PauliSum::from_pairs([(3.0, "II"), (0.5, "ZZ")]).unwrap();
        let known =
            Variances::FromExpectations([(PauliString::from_letters("ZZ").unwrap(), 1.0)].into());
        assert_eq!(
            estimate_for_sum(&s, &known, Covariance::Zero, 0.1).unwrap(),
            0.0
        );
    }

    #[test]
    fn epsilon_scaling() {
        let s = heisenberg_hamiltonian(0.1, 1.0).unwrap();
        let a = estimate_for_sum(&s, &Variances::WorstCase, Covariance::Zero, 1e-3).unwrap();
        let b = estimate_for_sum(&s, &Variances::WorstCase, Covariance::Zero, 5e-4).unwrap();
        assert_eq!(b, 4.0 * a);
        assert!(estimate_for_sum(&s, &Variances::WorstCase, Covariance::Zero, 0.0).is_err());
    }

    #[test]
    fn toy_b_counts() {
        let r = reduction_stats(&toy_b_hamiltonian(), 2, 0.01).unwrap();
        assert_eq!(r.counts, vec![3, 4]);
        assert_eq!(r.cumulative, vec![3, 4]);
    }

    #[test]
    fn single_z_counts() {
        let z = PauliSum::from_pairs([(1.0, "Z")]).unwrap();
        let r = reduction_stats(&z, 6, 0.01).unwrap();
        assert_eq!(r.counts, vec![1; 6]);
        assert_eq!(r.cumulative, vec![1, 2, 2, 2, 2, 2]);
    }

    #[test]
    fn heisenberg_union_groups() {
        let r = reduction_stats(&heisenberg_hamiltonian(0.1, 1.0).unwrap(), 7, 0.01).unwrap();
        assert_eq!(r.groups, 21);
        assert!(r.cumulative.windows(2).all(|w| w[0] <= w[1]));
    }
}
