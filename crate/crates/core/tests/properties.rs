use approx::{assert_abs_diff_eq, assert_relative_eq};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

use pds_vqs::measure::{estimate_measurements, singleton_groups, Covariance, Variances};
use pds_vqs::models::{build_model, hardware_efficient, ModelOptions};
use pds_vqs::moments::{state_moments, MomentTable, PowerCache};
use pds_vqs::pauli::{power, qwc_groups, PauliSum, PauliTerm, DEFAULT_DROP_TOL};
use pds_vqs::pds::{pds_solve, Regularization};
use pds_vqs::statesim::{apply_circuit, expectation, state_derivatives, State};

fn letters(n: usize) -> impl Strategy<Value = String> {
    proptest::collection::vec(prop::sample::select(vec!['I', 'X', 'Y', 'Z']), n)
        .prop_map(|v| v.into_iter().collect())
}

fn hermitian_sum(n: usize, max_terms: usize) -> impl Strategy<Value = PauliSum> {
    proptest::collection::vec((-1.0f64..1.0, letters(n)), 1..=max_terms).prop_map(|pairs| {
        PauliSum::from_pairs(pairs.iter().map(|(c, l)| (*c, l.as_str()))).unwrap()
    })
}

fn max_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn random_state(n: usize, re: &[f64], im: &[f64]) -> State {
    let amps = (0..1usize << n)
        .map(|i| Complex64::new(re[i], im[i]))
        .collect();
    State::from_amplitudes(amps).unwrap().normalized()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sum_product_matches_dense(a in hermitian_sum(3, 6), b in hermitian_sum(3, 6)) {
        let product = a.mul(&b, 0.0).unwrap();
        let dense = a.to_dense() * b.to_dense();
        prop_assert!(max_diff(&product.to_dense(), &dense) < 1e-12);
    }

    #[test]
    fn powers_compose(h in hermitian_sum(2, 5), p in 1u32..4, q in 1u32..4) {
        let lhs = power(&h, p + q).unwrap();
        let rhs = power(&h, p).unwrap().mul(&power(&h, q).unwrap(), DEFAULT_DROP_TOL).unwrap();
        prop_assert!(max_diff(&lhs.to_dense(), &rhs.to_dense()) < 1e-10);
    }

    #[test]
    fn qwc_groups_partition_and_commute(h in hermitian_sum(4, 12)) {
        let groups = qwc_groups(&h);
        let total: usize = groups.iter().map(Vec::len).sum();
        prop_assert_eq!(total, h.len());
        for g in &groups {
            for (i, a) in g.iter().enumerate() {
                for b in &g[i + 1..] {
                    prop_assert!(a.string().qubit_wise_commutes(&b.string()));
                }
            }
        }
    }

    #[test]
    fn text_round_trip(h in hermitian_sum(3, 8)) {
        let back = PauliSum::from_text(&h.to_text()).unwrap();
        prop_assert!(max_diff(&back.to_dense(), &h.to_dense()) < 1e-12);
    }

    #[test]
    fn circuits_preserve_norm(theta in proptest::collection::vec(-3.2f64..3.2, 9)) {
        let c = hardware_efficient(3, 2);
        let psi = apply_circuit(&c, &theta).unwrap();
        assert_relative_eq!(psi.norm_sqr(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn state_derivative_matches_differences(theta in proptest::collection::vec(-3.2f64..3.2, 4)) {
        let m = build_model("h2", ModelOptions::default()).unwrap();
        let d = state_derivatives(&m.circuit, &theta).unwrap();
        let h = 1e-6;
        for (k, dk) in d.iter().enumerate() {
            let mut a = theta.clone();
            let mut b = theta.clone();
            a[k] += h;
            b[k] -= h;
            let fd = apply_circuit(&m.circuit, &a).unwrap().sub(&apply_circuit(&m.circuit, &b).unwrap());
            for (x, y) in dk.amplitudes().iter().zip(fd.amplitudes()) {
                prop_assert!((x - y / (2.0 * h)).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn moments_of_random_states(
        re in proptest::collection::vec(-1.0f64..1.0, 4),
        im in proptest::collection::vec(-1.0f64..1.0, 4),
    ) {
        let m = build_model("toy_b", ModelOptions::default()).unwrap();
        let psi = random_state(2, &re, &im);
        let cache = PowerCache::new(&m.hamiltonian, 3).unwrap();
        let v = state_moments(&psi, &cache, 3).unwrap();
        assert_abs_diff_eq!(v[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(v[1], expectation(&psi, &m.hamiltonian).unwrap(), epsilon = 1e-12);
        prop_assert!(v[2] - v[1] * v[1] >= -1e-12);
        // PDS(2) lies between the ground energy and the Rayleigh quotient
        if let Ok(r) = pds_solve(&MomentTable::from_values(v.clone()), 2, Regularization::None) {
            prop_assert!(r.energy <= v[1] + 1e-9);
            prop_assert!(r.energy >= m.ground_energy().unwrap() - 1e-9);
        }
    }

    #[test]
    fn estimate_ignores_term_order(h in hermitian_sum(3, 8), eps in 1e-4f64..1e-1) {
        let mut groups = singleton_groups(&h);
        let forward = estimate_measurements(&groups, &Variances::WorstCase, Covariance::Zero, eps).unwrap();
        groups.reverse();
        let backward = estimate_measurements(&groups, &Variances::WorstCase, Covariance::Zero, eps).unwrap();
        assert_relative_eq!(forward, backward, max_relative = 1e-12);
        let finer = estimate_measurements(&groups, &Variances::WorstCase, Covariance::Zero, eps / 2.0).unwrap();
        prop_assert!(finer > backward || backward == 0.0);
    }
}

#[test]
fn single_term_product_phase() {
    let x = PauliTerm::from_letters("X", 1.0).unwrap();
    let y = PauliTerm::from_letters("Y", 1.0).unwrap();
    let z = pds_vqs::pauli::multiply(&x, &y).unwrap();
    assert_eq!(z.letters(), "Z");
    assert_abs_diff_eq!(z.coeff().im, 1.0);
}
