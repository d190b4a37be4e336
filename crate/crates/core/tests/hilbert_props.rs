mod common;

use num_complex::Complex64 as C64;
use proptest::prelude::*;

use torus_chaos::hilbert::{self, partial_trace, partial_trace_pure, tensor_product, ComplexOperator};
use torus_chaos::linalg;
use torus_chaos::{DensityMatrix, HilbertDim, Subsystem};

use common::*;

#[test]
fn partial_trace_of_random_states_is_a_density_matrix() {
    let mut r = rng(11);
    for i in 0..200 {
        let (n1, n2) = [(2, 3), (3, 3), (4, 2), (2, 5)][i % 4];
        let rho = random_density(&mut r, n1 * n2);
        for (keep, d) in [(Subsystem::First, n1), (Subsystem::Second, n2)] {
            let red = partial_trace(&rho, (n1, n2), keep).unwrap();
            assert_eq!(red.dim(), d);
            assert!(red.min_eigenvalue() > -1e-12);
            let tr: C64 = red.matrix().trace();
            assert!((tr - C64::new(1.0, 0.0)).norm() < 1e-12);
            assert!(linalg::hermiticity_defect(red.matrix()) < 1e-13);
        }
    }
}

#[test]
fn pure_partial_trace_matches_general_route() {
    let mut r = rng(12);
    for _ in 0..30 {
        let psi = random_state(&mut r, 12);
        let rho = DensityMatrix::pure(&psi);
        for keep in [Subsystem::First, Subsystem::Second] {
            let a = partial_trace(&rho, (3, 4), keep).unwrap();
            let b = partial_trace_pure(&psi, (3, 4), keep).unwrap();
            assert!(max_abs(&(a.matrix() - b.matrix())) < 1e-13);
        }
        // Schmidt symmetry of pure-state marginals
        let p1 = partial_trace_pure(&psi, (3, 4), Subsystem::First).unwrap().purity();
        let p2 = partial_trace_pure(&psi, (3, 4), Subsystem::Second).unwrap().purity();
        assert!((p1 - p2).abs() < 1e-13);
    }
}

#[test]
fn kronecker_mixed_product_on_random_unitaries() {
    let mut r = rng(13);
    for _ in 0..20 {
        let (a, b, c, d) = (
            haar_unitary(&mut r, 3),
            haar_unitary(&mut r, 4),
            haar_unitary(&mut r, 3),
            haar_unitary(&mut r, 4),
        );
        let op = |m: &nalgebra::DMatrix<C64>| ComplexOperator::new(m.clone()).unwrap();
        let lhs = tensor_product(&op(&a), &op(&b)).unwrap().into_matrix()
            * tensor_product(&op(&c), &op(&d)).unwrap().into_matrix();
        let rhs = tensor_product(&op(&(&a * &c)), &op(&(&b * &d))).unwrap().into_matrix();
        assert!(max_abs(&(lhs - rhs)) < 1e-12);
    }
}

#[test]
fn tensor_product_respects_dense_limit() {
    let a = ComplexOperator::identity(65);
    assert!(tensor_product(&a, &a).is_err());
    assert!(hilbert::tensor_product_with_limit(&a, &a, 65 * 65).is_ok());
}

/// Mean purity of the reduced state of Haar-random pure states in
/// `C^n ⊗ C^n`. Haar states are built independently as normalized complex
/// Gaussian vectors and compared against `2n / (n^2 + 1)`.
#[test]
fn haar_sampling_matches_closed_form_purity() {
    let mut r = rng(14);
    for n in [2usize, 8] {
        let samples: Vec<f64> = (0..2000)
            .map(|_| {
                let psi = random_state(&mut r, n * n);
                partial_trace_pure(&psi, (n, n), Subsystem::First).unwrap().purity()
            })
            .collect();
        let mean = samples.iter().sum::<f64>() / samples.len() as f64;
        let var = samples.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / (samples.len() - 1) as f64;
        let stderr = (var / samples.len() as f64).sqrt();
        let closed = torus_chaos::entropy::rmt_saturation(HilbertDim::new(n).unwrap()).purity;
        assert!(
            (mean - closed).abs() < 4.0 * stderr,
            "n={n}: sampled {mean} vs {closed} (stderr {stderr})"
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn weyl_relation_holds(n in 2usize..40) {
        let d = HilbertDim::new(n).unwrap();
        let u = hilbert::clock_operator(d).into_matrix();
        let v = hilbert::shift_operator(d).into_matrix();
        let w = C64::from_polar(1.0, 2.0 * std::f64::consts::PI / n as f64);
        // V U = w^{-1} U V
        prop_assert!(max_abs(&(&v * &u - &u * &v / w)) < 1e-12);
    }

    #[test]
    fn position_and_momentum_are_hermitian_with_bounded_spectrum(n in 2usize..40) {
        let d = HilbertDim::new(n).unwrap();
        for op in [hilbert::position_operator(d), hilbert::momentum_operator(d)] {
            prop_assert!(op.hermiticity_defect() < 1e-14);
            let ev = op.eigenvalues_hermitian();
            prop_assert!(ev.iter().all(|e| e.abs() <= 1.0 + 1e-12));
        }
    }
}
