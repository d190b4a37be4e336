mod common;

use num_complex::Complex64 as C64;

use torus_chaos::catmap::{propagator_2d, CoupledSpec, Floquet, MapSpec};
use torus_chaos::entropy;
use torus_chaos::hilbert::{self, partial_trace_pure};
use torus_chaos::states::{self, PhasePoint};
use torus_chaos::wigner::{self, operator_schmidt, wigner_grid, wse, wse_pure_fast};
use torus_chaos::{DensityMatrix, HilbertDim, Subsystem};

use common::*;

fn dim(n: usize) -> HilbertDim {
    HilbertDim::new(n).unwrap()
}

#[test]
fn wse_is_twice_von_neumann_for_random_pure_states() {
    let mut r = rng(41);
    for (n1, n2) in [(2, 2), (3, 3), (2, 4), (4, 4), (3, 5)] {
        for _ in 0..5 {
            let psi = random_state(&mut r, n1 * n2);
            let svn = entropy::von_neumann(&partial_trace_pure(&psi, (n1, n2), Subsystem::First).unwrap()).unwrap();
            let dense = wse(&operator_schmidt(&DensityMatrix::pure(&psi), (n1, n2)).unwrap()).unwrap();
            let fast = wse_pure_fast(&psi, (n1, n2)).unwrap();
            assert!((dense - 2.0 * svn).abs() < 1e-9, "{dense} vs {}", 2.0 * svn);
            assert!((fast - 2.0 * svn).abs() < 1e-9);
        }
    }
}

#[test]
fn wse_relation_on_evolved_states() {
    for n in [8usize, 16] {
        let spec = CoupledSpec::new(MapSpec::hyperbolic(0.25), MapSpec::elliptic(0.25), 0.5, dim(n)).unwrap();
        let u = propagator_2d(&spec).unwrap();
        let c = states::coherent_state(dim(n), PhasePoint::new(0.5, 0.5));
        let mut psi = states::product_state(&c, &c);
        for _ in 0..4 {
            psi = u.forward_state(&psi);
            let svn = entropy::von_neumann(&partial_trace_pure(&psi, (n, n), Subsystem::First).unwrap()).unwrap();
            let dense = wse(&operator_schmidt(&DensityMatrix::pure(&psi), (n, n)).unwrap()).unwrap();
            assert!((dense - 2.0 * svn).abs() < 1e-9);
        }
    }
}

#[test]
fn operator_schmidt_values_square_sum_to_purity() {
    // sum sigma^2 = ||rho||_F^2 = Tr rho^2 (reshuffling is an isometry)
    let mut r = rng(42);
    for _ in 0..10 {
        let rho = random_density(&mut r, 9);
        let s = operator_schmidt(&rho, (3, 3)).unwrap();
        let sq: f64 = s.sigmas().iter().map(|x| x * x).sum();
        assert!((sq - rho.purity()).abs() < 1e-12);
    }
}

#[test]
fn one_dof_grid_is_real_normalized_with_exact_marginals() {
    let mut r = rng(43);
    for n in [3usize, 4, 5, 8] {
        let rho = random_density(&mut r, n);
        let g = wigner_grid(&rho, dim(n)).unwrap();
        assert!(g.max_imag < 1e-12);
        assert!((g.total() - 1.0).abs() < 1e-12);
        let side = 2 * n;
        // position marginal on even q
        for j in 0..n {
            let col: f64 = (0..side).map(|p| g.at(2 * j, p)).sum();
            assert!((col - rho.matrix()[(j, j)].re).abs() < 1e-12);
        }
        // momentum marginal on even p against the DFT basis
        let f = hilbert::dft_matrix(dim(n)).into_matrix();
        let rho_p = f.adjoint() * rho.matrix() * &f;
        let mut from_grid: Vec<f64> = (0..n).map(|k| (0..side).map(|q| g.at(q, 2 * k)).sum()).collect();
        let mut from_dft: Vec<f64> = (0..n).map(|k| rho_p[(k, k)].re).collect();
        from_grid.sort_by(f64::total_cmp);
        from_dft.sort_by(f64::total_cmp);
        for (a, b) in from_grid.iter().zip(&from_dft) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }
}

#[test]
fn grid_overlap_reproduces_hilbert_schmidt_product() {
    let mut r = rng(44);
    for n in [3usize, 4, 6] {
        let a = random_density(&mut r, n);
        let b = random_density(&mut r, n);
        let ga = wigner_grid(&a, dim(n)).unwrap();
        let gb = wigner_grid(&b, dim(n)).unwrap();
        let overlap: f64 = ga.values.iter().zip(&gb.values).map(|(x, y)| x * y).sum();
        let tr: C64 = (a.matrix() * b.matrix()).trace();
        assert!((overlap - tr.re / n as f64).abs() < 1e-12);
    }
    // two degrees of freedom: factor 1/n per DOF
    let n = 3;
    let a = random_density(&mut r, n * n);
    let b = random_density(&mut r, n * n);
    let ga = wigner_grid(&a, dim(n)).unwrap();
    let gb = wigner_grid(&b, dim(n)).unwrap();
    let overlap: f64 = ga.values.iter().zip(&gb.values).map(|(x, y)| x * y).sum();
    let tr: C64 = (a.matrix() * b.matrix()).trace();
    assert!((overlap - tr.re / (n * n) as f64).abs() < 1e-12);
}

#[test]
fn two_dof_grid_spectrum_matches_operator_schmidt() {
    let mut r = rng(45);
    for n in [2usize, 3, 4] {
        let rho = random_density(&mut r, n * n);
        let rep = wigner::wigner_schmidt_crosscheck(&rho, (n, n)).unwrap();
        assert!(rep.max_rel_deviation < 1e-6, "n={n}: {}", rep.max_rel_deviation);
    }
    let n = 8;
    let spec = CoupledSpec::new(MapSpec::hyperbolic(0.25), MapSpec::hyperbolic(0.25), 0.5, dim(n)).unwrap();
    let u = propagator_2d(&spec).unwrap();
    let c = states::coherent_state(dim(n), PhasePoint::new(0.5, 0.5));
    let psi = (0..2).fold(states::product_state(&c, &c), |s, _| u.forward_state(&s));
    let rep = wigner::wigner_schmidt_crosscheck(&DensityMatrix::pure(&psi), (n, n)).unwrap();
    assert!(rep.max_rel_deviation < 1e-6);
}

#[test]
fn two_dof_grid_refused_beyond_budget() {
    let rho = DensityMatrix::maximally_mixed(16 * 16);
    assert!(wigner_grid(&rho, dim(16)).is_err());
    assert!(wigner::wigner_grid_with_budget(&DensityMatrix::maximally_mixed(9), dim(3), 3).is_ok());
}
