//! The PDS(K) energy functional: moment system, polynomial roots and energy gradient.

use nalgebra::{DMatrix, DVector, Dyn, SymmetricEigen};

use crate::error::{Error, Result};
use crate::moments::MomentTable;

/// Relative eigenvalue floor below which the unregularized system is rejected.
pub const SINGULAR_RATIO: f64 = 1e-12;
/// Roots with `|Im| ≤ ROOT_IMAG_TOL·max(1, |Re|)` are accepted as real.
pub const ROOT_IMAG_TOL: f64 = 1e-8;
pub const DENOMINATOR_TOL: f64 = 1e-12;
pub const DEFAULT_EIGEN_SHIFT: f64 = 1e-6;
pub const DEFAULT_TRUNCATION: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Regularization {
    #[default]
    None,
    /// Eigenvalues `λ` of the moment matrix are inverted as `1/(λ + ε)`.
    EigenShift(f64),
    /// Eigenvalues below `rel·λ_max` in magnitude are discarded.
    Truncate(f64),
}

impl Regularization {
    pub fn eigen_shift() -> Self {
        Regularization::EigenShift(DEFAULT_EIGEN_SHIFT)
    }

    pub fn truncate() -> Self {
        Regularization::Truncate(DEFAULT_TRUNCATION)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PdsResult {
    pub order: usize,
    /// Coefficients of `E^K + Σ X_i E^{K−i}`.
    pub x: Vec<f64>,
    /// Real roots, ascending.
    pub roots: Vec<f64>,
    pub energy: f64,
    pub cond_m: f64,
    /// Magnitude of the regularization, if it changed the solve.
    pub regularization: Option<f64>,
    pub imag_residue: f64,
    pub policy: Regularization,
}

impl PdsResult {
    pub fn regularized(&self) -> bool {
        self.regularization.is_some()
    }
}

/// `M_ij = ⟨H^{2K−i−j}⟩`, `Y_i = ⟨H^{2K−i}⟩` for `i, j = 1..K`.
pub fn moment_system(values: &[f64], k: usize) -> (DMatrix<f64>, DVector<f64>) {
    let m = DMatrix::from_fn(k, k, |i, j| values[2 * k - (i + 1) - (j + 1)]);
    let y = DVector::from_fn(k, |i, _| values[2 * k - (i + 1)]);
    (m, y)
}

/// Spectral solver for the symmetric positive semidefinite moment matrix.
struct Solver {
    eig: SymmetricEigen<f64, Dyn>,
    inverse: Vec<f64>,
    cond: f64,
    regularization: Option<f64>,
}

impl Solver {
    fn new(m: DMatrix<f64>, policy: Regularization) -> Result<Self> {
        let eig = m.symmetric_eigen();
        let lambda = &eig.eigenvalues;
        let smax = lambda.iter().fold(0.0f64, |a, l| a.max(l.abs()));
        let smin = lambda.iter().fold(f64::INFINITY, |a, l| a.min(l.abs()));
        let cond = if smin > 0.0 {
            smax / smin
        } else {
            f64::INFINITY
        };
        let singular = !(smin > SINGULAR_RATIO * smax);
        let (inverse, regularization) = match policy {
            Regularization::None => {
                if singular {
                    return Err(Error::SingularMoments { cond });
                }
                (lambda.iter().map(|l| 1.0 / l).collect(), None)
            }
            Regularization::EigenShift(eps) => {
                (lambda.iter().map(|l| 1.0 / (l + eps)).collect(), Some(eps))
            }
            Regularization::Truncate(rel) => {
                let cut = rel * smax;
                let dropped = lambda.iter().any(|l| l.abs() < cut);
                (
                    lambda
                        .iter()
                        .map(|&l| if l.abs() < cut || l == 0.0 { 0.0 } else { 1.0 / l })
                        .collect(),
                    dropped.then_some(cut),
                )
            }
        };
        Ok(Solver {
            eig,
            inverse,
            cond,
            regularization,
        })
    }

    fn solve(&self, rhs: &DVector<f64>) -> DVector<f64> {
        let v = &self.eig.eigenvectors;
        let mut w = v.transpose() * rhs;
        for (wi, inv) in w.iter_mut().zip(&self.inverse) {
            *wi *= inv;
        }
        v * w
    }
}

fn check_order(table: &MomentTable, k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidArgument(
            "PDS order must be at least 1".into(),
        ));
    }
    if table.max_order < 2 * k - 1 || table.values.len() < 2 * k {
        return Err(Error::MissingMoments {
            required: 2 * k - 1,
            available: table.max_order,
        });
    }
    Ok(())
}

fn eval_poly(x: &[f64], e: f64) -> (f64, f64) {
    // Horner for P and P′ with leading coefficient 1.
    let mut p = 1.0;
    let mut dp = 0.0;
    for &c in x {
        dp = dp * e + p;
        p = p * e + c;
    }
    (p, dp)
}

fn polish(x: &[f64], mut e: f64) -> f64 {
    let (mut p, _) = eval_poly(x, e);
    for _ in 0..8 {
        let (_, dp) = eval_poly(x, e);
        if dp == 0.0 || p == 0.0 {
            break;
        }
        let next = e - p / dp;
        let (pn, _) = eval_poly(x, next);
        if pn.abs() >= p.abs() {
            break;
        }
        e = next;
        p = pn;
    }
    e
}

/// Real roots of the monic polynomial with lower coefficients `x`, ascending.
pub fn polynomial_roots(x: &[f64]) -> Result<(Vec<f64>, f64)> {
    let k = x.len();
    if k == 1 {
        return Ok((vec![-x[0]], 0.0));
    }
    let companion = DMatrix::from_fn(k, k, |i, j| {
        if i == 0 {
            -x[j]
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    let eig = companion.complex_eigenvalues();
    let mut residue: f64 = 0.0;
    let mut worst: f64 = 0.0;
    let mut roots = Vec::with_capacity(k);
    for z in eig.iter() {
        residue = residue.max(z.im.abs());
        let excess = z.im.abs() / z.re.abs().max(1.0);
        worst = worst.max(excess);
        roots.push(polish(x, z.re));
    }
    if worst > ROOT_IMAG_TOL {
        return Err(Error::ComplexRoots { residue });
    }
    roots.sort_by(f64::total_cmp);
    Ok((roots, residue))
}

/// Solve the PDS(K) moment system and select the smallest root.
pub fn pds_solve(table: &MomentTable, k: usize, policy: Regularization) -> Result<PdsResult> {
    check_order(table, k)?;
    if k == 1 {
        let e = table.values[1];
        return Ok(PdsResult {
            order: 1,
            x: vec![-e],
            roots: vec![e],
            energy: e,
            cond_m: 1.0,
            regularization: None,
            imag_residue: 0.0,
            policy,
        });
    }
    let (m, y) = moment_system(&table.values, k);
    let solver = Solver::new(m, policy)?;
    let x: Vec<f64> = solver.solve(&(-y)).iter().copied().collect();
    let (roots, imag_residue) = polynomial_roots(&x)?;
    Ok(PdsResult {
        order: k,
        energy: roots[0],
        x,
        roots,
        cond_m: solver.cond,
        regularization: solver.regularization,
        imag_residue,
        policy,
    })
}

/// `∂E/∂θ_k` for the root selected in `result`.
pub fn pds_gradient(table: &MomentTable, k: usize, result: &PdsResult) -> Result<Vec<f64>> {
    check_order(table, k)?;
    let grads = table.gradients.as_ref().ok_or(Error::MissingGradients)?;
    if grads.iter().any(|g| g.len() < 2 * k) {
        return Err(Error::MissingGradients);
    }
    if k == 1 {
        return Ok(grads.iter().map(|g| g[1]).collect());
    }
    let e = result.energy;
    let (_, dp) = eval_poly(&result.x, e);
    if dp.abs() < DENOMINATOR_TOL {
        return Err(Error::VanishingDenominator(dp));
    }
    let (m, _) = moment_system(&table.values, k);
    let solver = Solver::new(m, result.policy)?;
    let x = DVector::from_column_slice(&result.x);
    // (E^{K−1}, …, E, 1)
    let mut powers = vec![1.0; k];
    for i in (0..k - 1).rev() {
        powers[i] = powers[i + 1] * e;
    }
    let powers = DVector::from_vec(powers);
    Ok(grads
        .iter()
        .map(|g| {
            let (dm, dy) = moment_system(g, k);
            let dx = solver.solve(&(-dy - dm * &x));
            -powers.dot(&dx) / dp
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::{moment_table_with_gradients, GradientMethod, PowerCache};
    use crate::pauli::PauliSum;
    use crate::statesim::{Angle, Circuit};

    fn table(values: &[f64]) -> MomentTable {
        MomentTable::from_values(values.to_vec())
    }

    #[test]
    fn h2_reference_state_order_two() {
        let t = table(&[1.0, 0.8, 0.68, 0.544]);
        let r = pds_solve(&t, 2, Regularization::None).unwrap();
        assert!(r.x[0].abs() < 1e-12);
        assert!((r.x[1] + 0.68).abs() < 1e-12);
        let s = 0.68f64.sqrt();
        assert!((r.roots[0] + s).abs() < 1e-12 && (r.roots[1] - s).abs() < 1e-12);
        assert_eq!(r.energy, r.roots[0]);
        assert!(!r.regularized());
    }

    #[test]
    fn two_level_support_is_exact() {
        let t = table(&[1.0, 0.5, 0.5, 0.5]);
        let r = pds_solve(&t, 2, Regularization::None).unwrap();
        assert!(r.roots[0].abs() < 1e-12 && (r.roots[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn order_one_is_the_expectation() {
        let t = table(&[1.0, 0.37]);
        let r = pds_solve(&t, 1, Regularization::None).unwrap();
        assert_eq!(r.energy, 0.37);
        assert_eq!(r.x, vec![-0.37]);
    }

    #[test]
    fn eigenstate_is_singular() {
        let e: f64 = 1.7;
        let t = table(&[1.0, e, e * e, e * e * e]);
        assert!(matches!(
            pds_solve(&t, 2, Regularization::None),
            Err(Error::SingularMoments { .. })
        ));
        let shifted = pds_solve(&t, 2, Regularization::eigen_shift()).unwrap();
        assert!(shifted.regularized());
        let cut = pds_solve(&t, 2, Regularization::truncate()).unwrap();
        assert!(cut.regularized());
    }

    #[test]
    fn insufficient_orders() {
        let t = table(&[1.0, 0.8, 0.68]);
        assert!(matches!(
            pds_solve(&t, 2, Regularization::None),
            Err(Error::MissingMoments {
                required: 3,
                available: 2
            })
        ));
        assert!(pds_solve(&t, 0, Regularization::None).is_err());
    }

    #[test]
    fn zero_moment_gradients_give_zero() {
        let t = table(&[1.0, 0.8, 0.68, 0.544]).with_gradients(vec![vec![0.0; 4]; 3]);
        let r = pds_solve(&t, 2, Regularization::None).unwrap();
        assert!(pds_gradient(&t, 2, &r).unwrap().iter().all(|g| *g == 0.0));
    }

    #[test]
    fn gradient_needs_columns() {
        let t = table(&[1.0, 0.8, 0.68, 0.544]);
        let r = pds_solve(&t, 2, Regularization::None).unwrap();
        assert_eq!(pds_gradient(&t, 2, &r), Err(Error::MissingGradients));
    }

    #[test]
    fn gradient_matches_central_differences() {
        let h = PauliSum::from_pairs([(0.4, "ZI"), (0.4, "IZ"), (0.2, "XX")]).unwrap();
        let c = Circuit::new(2)
            .ry(0, Angle::scaled(0, 2.0))
            .ry(1, Angle::scaled(1, 2.0))
            .cnot(0, 1)
            .ry(0, Angle::scaled(2, 2.0))
            .ry(1, Angle::scaled(3, 2.0));
        let cache = PowerCache::new(&h, 7).unwrap();
        let theta = [0.31, -1.2, 0.77, 2.1];
        let energy = |th: &[f64], k: usize| {
            let t = crate::moments::moment_table(&c, th, &cache, 2 * k - 1).unwrap();
            pds_solve(&t, k, Regularization::None).unwrap().energy
        };
        for k in 1..=2 {
            let t = moment_table_with_gradients(
                &c,
                &theta,
                &cache,
                2 * k - 1,
                GradientMethod::Analytic,
            )
            .unwrap();
            let r = pds_solve(&t, k, Regularization::None).unwrap();
            let g = pds_gradient(&t, k, &r).unwrap();
            for p in 0..4 {
                let step = 1e-5;
                let mut a = theta;
                let mut b = theta;
                a[p] += step;
                b[p] -= step;
                let fd = (energy(&a, k) - energy(&b, k)) / (2.0 * step);
                assert!(
                    (g[p] - fd).abs() <= 1e-6 * fd.abs().max(1e-3),
                    "k={k} p={p}: {} vs {fd}",
                    g[p]
                );
            }
        }
    }

    #[test]
    fn roots_are_sorted() {
        // (E−1)(E+2)(E−3) = E³ − 2E² − 5E + 6
        let (roots, _) = polynomial_roots(&[-2.0, -5.0, 6.0]).unwrap();
        for (a, b) in roots.iter().zip([-2.0, 1.0, 3.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn complex_roots_are_rejected() {
        assert!(matches!(
            polynomial_roots(&[0.0, 1.0]),
            Err(Error::ComplexRoots { .. })
        ));
    }
}
