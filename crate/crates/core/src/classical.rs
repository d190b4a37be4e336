//! Classical companion dynamics of the coupled perturbed cat maps.

use nalgebra::{DMatrix, Matrix2, Matrix4};
use rayon::prelude::*;

use crate::catmap::{CoupledSpec, MapSpec};
use crate::error::{Error, Result};
use crate::linalg;
use crate::states::wrap_unit;

/// Steps between re-orthonormalizations of the tangent frame.
pub const REORTHO_INTERVAL: usize = 10;
/// Shortest run accepted by the Lyapunov estimators.
pub const MIN_LYAPUNOV_STEPS: usize = 100;

/// Identifier for metadata: what the classical separability entropy is.
pub const CSE_CONSTRUCTION: &str = "SVD entropy of the g^2 x g^2 subsystem-partitioned coarse histogram";

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassicalPoint4D {
    pub q1: f64,
    pub p1: f64,
    pub q2: f64,
    pub p2: f64,
}

impl ClassicalPoint4D {
    pub fn new(q1: f64, p1: f64, q2: f64, p2: f64) -> Self {
        ClassicalPoint4D {
            q1: wrap_unit(q1),
            p1: wrap_unit(p1),
            q2: wrap_unit(q2),
            p2: wrap_unit(p2),
        }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.q1, self.p1, self.q2, self.p2]
    }
}

fn apply_matrix(m: [[i64; 2]; 2], q: f64, p: f64) -> (f64, f64) {
    (
        m[0][0] as f64 * q + m[0][1] as f64 * p,
        m[1][0] as f64 * q + m[1][1] as f64 * p,
    )
}

/// `(q', p') = M (q, p + eps(q)) mod 1`.
pub fn step_1d(point: (f64, f64), spec: &MapSpec) -> (f64, f64) {
    let (q, p) = point;
    let (q2, p2) = apply_matrix(spec.matrix(), q, p + spec.kick(q));
    (wrap_unit(q2), wrap_unit(p2))
}

/// Each degree of freedom is kicked by `eps(own q) + kappa(q1, q2)` and then
/// mapped by its own matrix.
pub fn step_2d(point: &ClassicalPoint4D, spec: &CoupledSpec) -> ClassicalPoint4D {
    let (a, b) = unwrapped_step_2d(point, spec);
    ClassicalPoint4D::new(a.0, a.1, b.0, b.1)
}

fn unwrapped_step_2d(x: &ClassicalPoint4D, spec: &CoupledSpec) -> ((f64, f64), (f64, f64)) {
    let kappa = spec.coupling_kick(x.q1, x.q2);
    let a = apply_matrix(spec.spec1.matrix(), x.q1, x.p1 + spec.spec1.kick(x.q1) + kappa);
    let b = apply_matrix(spec.spec2.matrix(), x.q2, x.p2 + spec.spec2.kick(x.q2) + kappa);
    (a, b)
}

fn int_matrix2(m: [[i64; 2]; 2]) -> Matrix2<f64> {
    Matrix2::new(m[0][0] as f64, m[0][1] as f64, m[1][0] as f64, m[1][1] as f64)
}

/// Tangent map of `step_1d`.
pub fn jacobian_1d(point: (f64, f64), spec: &MapSpec) -> Matrix2<f64> {
    int_matrix2(spec.matrix()) * Matrix2::new(1.0, 0.0, spec.kick_derivative(point.0), 1.0)
}

/// Tangent map of `step_2d` in coordinates `(q1, p1, q2, p2)`.
pub fn jacobian_2d(x: &ClassicalPoint4D, spec: &CoupledSpec) -> Matrix4<f64> {
    let dk = spec.coupling_derivative(x.q1, x.q2);
    let d1 = spec.spec1.kick_derivative(x.q1);
    let d2 = spec.spec2.kick_derivative(x.q2);
    // (q1, p1, q2, p2) -> (q1, p1 + eps1 + kappa, q2, p2 + eps2 + kappa)
    #[rustfmt::skip]
    let kick = Matrix4::new(
        1.0,     0.0, 0.0,     0.0,
        d1 + dk, 1.0, dk,      0.0,
        0.0,     0.0, 1.0,     0.0,
        dk,      0.0, d2 + dk, 1.0,
    );
    let m1 = int_matrix2(spec.spec1.matrix());
    let m2 = int_matrix2(spec.spec2.matrix());
    let mut lin = Matrix4::zeros();
    lin.fixed_view_mut::<2, 2>(0, 0).copy_from(&m1);
    lin.fixed_view_mut::<2, 2>(2, 2).copy_from(&m2);
    lin * kick
}

/// Lyapunov spectrum (descending) from tangent-map products with QR
/// re-orthonormalization every [`REORTHO_INTERVAL`] steps.
fn lyapunov_spectrum<P: Copy>(
    dim: usize,
    mut point: P,
    steps: usize,
    step: impl Fn(&P) -> P,
    jacobian: impl Fn(&P) -> DMatrix<f64>,
) -> Result<Vec<f64>> {
    if steps < MIN_LYAPUNOV_STEPS {
        return Err(Error::InvalidInput(format!(
            "Lyapunov estimate needs at least {MIN_LYAPUNOV_STEPS} steps, got {steps}"
        )));
    }
    let mut frame = DMatrix::<f64>::identity(dim, dim);
    let mut sums = vec![0.0; dim];
    let mut pending = 0;
    for s in 0..steps {
        frame = jacobian(&point) * frame;
        point = step(&point);
        pending += 1;
        if pending == REORTHO_INTERVAL || s + 1 == steps {
            let qr = frame.clone().qr();
            let r = qr.r();
            for (i, acc) in sums.iter_mut().enumerate() {
                let d = r[(i, i)].abs();
                if !d.is_finite() || d == 0.0 {
                    return Err(Error::NumericalHealth(format!("degenerate tangent frame at step {s}")));
                }
                *acc += d.ln();
            }
            frame = qr.q();
            pending = 0;
        }
    }
    let mut out: Vec<f64> = sums.into_iter().map(|s| s / steps as f64).collect();
    out.sort_by(|a, b| b.total_cmp(a));
    Ok(out)
}

pub fn lyapunov_spectrum_1d(spec: &MapSpec, steps: usize, seed: (f64, f64)) -> Result<Vec<f64>> {
    lyapunov_spectrum(
        2,
        seed,
        steps,
        |p| step_1d(*p, spec),
        |p| {
            let j = jacobian_1d(*p, spec);
            DMatrix::from_iterator(2, 2, j.iter().copied())
        },
    )
}

pub fn lyapunov_spectrum_2d(spec: &CoupledSpec, steps: usize, seed: ClassicalPoint4D) -> Result<Vec<f64>> {
    lyapunov_spectrum(
        4,
        seed,
        steps,
        |p| step_2d(p, spec),
        |p| {
            let j = jacobian_2d(p, spec);
            DMatrix::from_iterator(4, 4, j.iter().copied())
        },
    )
}

/// Which classical system to analyze.
#[derive(Clone, Copy, Debug)]
pub enum ClassicalSystem<'a> {
    Single(&'a MapSpec, (f64, f64)),
    Coupled(&'a CoupledSpec, ClassicalPoint4D),
}

/// Largest Lyapunov exponent.
pub fn lyapunov_estimate(system: ClassicalSystem<'_>, steps: usize) -> Result<f64> {
    let spectrum = match system {
        ClassicalSystem::Single(spec, seed) => lyapunov_spectrum_1d(spec, steps, seed)?,
        ClassicalSystem::Coupled(spec, seed) => lyapunov_spectrum_2d(spec, steps, seed)?,
    };
    Ok(spectrum[0])
}

/// Element-wise `t`-fold `step_2d`, order preserving.
pub fn evolve_ensemble(points: &[ClassicalPoint4D], spec: &CoupledSpec, t: usize) -> Vec<ClassicalPoint4D> {
    points
        .par_iter()
        .map(|x| (0..t).fold(*x, |acc, _| step_2d(&acc, spec)))
        .collect()
}

/// Normalized `g^4`-cell histogram as a `g^2 x g^2` matrix: rows index
/// `(q1, p1)` cells, columns `(q2, p2)` cells.
#[derive(Clone, Debug, PartialEq)]
pub struct CoarseDistribution {
    pub g: usize,
    pub weights: DMatrix<f64>,
}

fn cell(x: f64, g: usize) -> usize {
    ((x * g as f64) as usize).min(g - 1)
}

pub fn coarse_distribution(points: &[ClassicalPoint4D], g: usize) -> Result<CoarseDistribution> {
    if g < 2 {
        return Err(Error::InvalidInput(format!("grid size {g} < 2")));
    }
    if points.is_empty() {
        return Err(Error::InvalidInput("empty ensemble".into()));
    }
    let mut weights = DMatrix::<f64>::zeros(g * g, g * g);
    for x in points {
        let r = cell(x.q1, g) * g + cell(x.p1, g);
        let c = cell(x.q2, g) * g + cell(x.p2, g);
        weights[(r, c)] += 1.0;
    }
    weights /= points.len() as f64;
    Ok(CoarseDistribution { g, weights })
}

/// Separability entropy of a coarse distribution: `-sum s^2 ln s^2` over its
/// normalized singular values.
pub fn cse(dist: &CoarseDistribution) -> Result<f64> {
    let sv = linalg::singular_values_real(&dist.weights);
    let norm2: f64 = sv.iter().map(|s| s * s).sum();
    if norm2.is_nan() || norm2 <= 0.0 {
        return Err(Error::InvalidInput("all-zero distribution".into()));
    }
    Ok(linalg::shannon(
        sv.iter()
            .filter(|&&s| s > crate::wigner::SIGMA_FLOOR)
            .map(|s| s * s / norm2),
    ))
}
