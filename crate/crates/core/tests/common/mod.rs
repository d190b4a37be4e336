#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use torus_chaos::linalg::{CMatrix, CVector};
use torus_chaos::{DensityMatrix, StateVector};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im)
}

pub fn ginibre(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    DMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Haar unitary: QR of a Ginibre matrix with the diagonal phases of R removed.
pub fn haar_unitary(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    let qr = ginibre(rng, n, n).qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        q.column_mut(j).iter_mut().for_each(|x| *x *= phase);
    }
    q
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    let g = ginibre(rng, n, n);
    (&g + g.adjoint()) * C64::new(0.5, 0.0)
}

pub fn random_state(rng: &mut ChaCha8Rng, dim: usize) -> StateVector {
    let v = CVector::from_fn(dim, |_, _| gaussian(rng));
    StateVector::normalized(v).unwrap()
}

/// Full-rank mixed state `G G^dagger / Tr`.
pub fn random_density(rng: &mut ChaCha8Rng, dim: usize) -> DensityMatrix {
    let g = ginibre(rng, dim, dim);
    let m = &g * g.adjoint();
    let tr = m.trace();
    DensityMatrix::new(m / tr).unwrap()
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
