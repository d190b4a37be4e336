//! Perturbed cat maps: specifications, the 1-DOF coordinate-representation
//! propagator, the diagonal coupling and the 2-DOF Floquet operator.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{ComplexOperator, HilbertDim, StateVector, MAX_DENSE_DIM};
use crate::linalg::{self, CMatrix, CVector, C64};

/// Kick strength used for every canonical scenario.
pub const DEFAULT_K: f64 = 0.25;
/// Coupling strength used for every canonical scenario.
pub const DEFAULT_KC: f64 = 0.5;
/// Hilbert dimension used for every canonical scenario.
pub const DEFAULT_N: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MapKind {
    Hyperbolic,
    Elliptic,
}

/// One torus degree of freedom: unimodular integer matrix plus kick strength.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MapSpec {
    m: [[i64; 2]; 2],
    k: f64,
}

impl MapSpec {
    pub fn new(m: [[i64; 2]; 2], k: f64) -> Result<Self> {
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if det != 1 {
            return Err(Error::InvalidSpec(format!("det(M) = {det}, expected 1")));
        }
        let tr = (m[0][0] + m[1][1]).abs();
        if tr == 2 {
            return Err(Error::UnsupportedMap("parabolic map (|trace| = 2)".into()));
        }
        if !k.is_finite() {
            return Err(Error::InvalidSpec(format!("kick strength {k} not finite")));
        }
        Ok(MapSpec { m, k })
    }

    /// `[[2, 1], [3, 2]]`.
    pub fn hyperbolic(k: f64) -> Self {
        MapSpec { m: [[2, 1], [3, 2]], k }
    }

    /// `[[0, 1], [-1, 0]]`.
    pub fn elliptic(k: f64) -> Self {
        MapSpec {
            m: [[0, 1], [-1, 0]],
            k,
        }
    }

    pub fn matrix(&self) -> [[i64; 2]; 2] {
        self.m
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn trace(&self) -> i64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn kind(&self) -> MapKind {
        if self.trace().abs() > 2 {
            MapKind::Hyperbolic
        } else {
            MapKind::Elliptic
        }
    }

    /// Kick `eps(q) = -(K / 2 pi) sin(2 pi q)`.
    pub fn kick(&self, q: f64) -> f64 {
        -(self.k / (2.0 * PI)) * (2.0 * PI * q).sin()
    }

    /// `d eps / dq = -K cos(2 pi q)`.
    pub fn kick_derivative(&self, q: f64) -> f64 {
        -self.k * (2.0 * PI * q).cos()
    }
}

/// Two maps, their coupling strength and the per-DOF Hilbert dimension.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoupledSpec {
    pub spec1: MapSpec,
    pub spec2: MapSpec,
    pub kc: f64,
    pub n: HilbertDim,
}

impl CoupledSpec {
    pub fn new(spec1: MapSpec, spec2: MapSpec, kc: f64, n: HilbertDim) -> Result<Self> {
        if !kc.is_finite() {
            return Err(Error::InvalidSpec(format!("coupling {kc} not finite")));
        }
        Ok(CoupledSpec { spec1, spec2, kc, n })
    }

    /// Coupling `kappa(q1, q2) = -(Kc / 2 pi) sin(2 pi (q1 + q2))`.
    pub fn coupling_kick(&self, q1: f64, q2: f64) -> f64 {
        -(self.kc / (2.0 * PI)) * (2.0 * PI * (q1 + q2)).sin()
    }

    /// `d kappa / d q1 = d kappa / d q2 = -Kc cos(2 pi (q1 + q2))`.
    pub fn coupling_derivative(&self, q1: f64, q2: f64) -> f64 {
        -self.kc * (2.0 * PI * (q1 + q2)).cos()
    }
}

/// Coordinate-representation propagator
/// `U_jk = A exp[i pi (M11 j^2 - 2jk + M22 k^2) / (n M12)] exp[i K n cos(2 pi j/n) / 2 pi]`
/// with `A = (1 / (i n M12))^{1/2}` on the principal branch.
pub fn propagator_1d(spec: &MapSpec, n: HilbertDim) -> Result<ComplexOperator> {
    let [[m11, m12], [m21, m22]] = spec.m;
    if m11 * m22 - m12 * m21 != 1 {
        return Err(Error::InvalidSpec("matrix is not unimodular".into()));
    }
    if m12 == 0 {
        return Err(Error::UnsupportedMap("M12 = 0: propagator divides by M12".into()));
    }
    let nn = n.get() as i64;
    let amp = (C64::new(1.0, 0.0) / C64::new(0.0, (nn * m12) as f64)).sqrt();
    // exp(i pi Q / (n M12)) only depends on Q mod 2 n |M12|; reducing keeps
    // the phase argument small.
    let period = 2 * nn * m12.abs();
    let kick_scale = spec.k * nn as f64 / (2.0 * PI);
    let m = CMatrix::from_fn(n.get(), n.get(), |j, k| {
        let (j, k) = (j as i64, k as i64);
        let q = (m11 * j * j - 2 * j * k + m22 * k * k).rem_euclid(period);
        let quad = PI * q as f64 / (nn * m12) as f64;
        let kick = kick_scale * (2.0 * PI * j as f64 / nn as f64).cos();
        amp * C64::from_polar(1.0, quad + kick)
    });
    ComplexOperator::new(m)
}

/// Diagonal coupling phases `exp[i n Kc cos(2 pi (j1 + j2)/n) / 2 pi]`,
/// indexed `j1 * n + j2`.
pub fn coupling_phases(n: HilbertDim, kc: f64) -> Vec<C64> {
    let nn = n.get();
    let scale = nn as f64 * kc / (2.0 * PI);
    (0..nn * nn)
        .map(|idx| {
            let (j1, j2) = (idx / nn, idx % nn);
            let arg = 2.0 * PI * ((j1 + j2) % nn) as f64 / nn as f64;
            C64::from_polar(1.0, scale * arg.cos())
        })
        .collect()
}

/// Dense diagonal coupling operator of dimension `n^2`.
pub fn coupling_matrix(n: HilbertDim, kc: f64) -> Result<ComplexOperator> {
    let dim = n.get() * n.get();
    if dim > MAX_DENSE_DIM {
        return Err(Error::DimensionTooLarge {
            dim,
            max: MAX_DENSE_DIM,
        });
    }
    Ok(ComplexOperator::from_diagonal(&coupling_phases(n, kc)))
}

/// One-step Floquet evolution on a finite space.
pub trait Floquet: Sync {
    fn dim(&self) -> usize;

    /// `U v`.
    fn forward(&self, v: &CVector) -> CVector;

    /// `U^dagger v`.
    fn backward(&self, v: &CVector) -> CVector;

    /// `U^dagger A U`.
    fn heisenberg_step(&self, a: &CMatrix) -> CMatrix {
        let left = map_columns(a, |c| self.backward(c));
        map_columns(&left.adjoint(), |c| self.backward(c)).adjoint()
    }

    /// `U A U^dagger`.
    fn schrodinger_step(&self, a: &CMatrix) -> CMatrix {
        let left = map_columns(a, |c| self.forward(c));
        map_columns(&left.adjoint(), |c| self.forward(c)).adjoint()
    }

    fn forward_state(&self, psi: &StateVector) -> StateVector {
        StateVector::from_raw(self.forward(psi.amplitudes()))
    }
}

fn map_columns(a: &CMatrix, f: impl Fn(&CVector) -> CVector + Sync) -> CMatrix {
    let cols: Vec<CVector> = (0..a.ncols())
        .into_par_iter()
        .map(|j| f(&a.column(j).into_owned()))
        .collect();
    CMatrix::from_columns(&cols)
}

impl Floquet for ComplexOperator {
    fn dim(&self) -> usize {
        ComplexOperator::dim(self)
    }

    fn forward(&self, v: &CVector) -> CVector {
        self.matrix() * v
    }

    fn backward(&self, v: &CVector) -> CVector {
        self.matrix().ad_mul(v)
    }

    fn heisenberg_step(&self, a: &CMatrix) -> CMatrix {
        self.matrix().ad_mul(a) * self.matrix()
    }

    fn schrodinger_step(&self, a: &CMatrix) -> CMatrix {
        self.matrix() * a * self.matrix().adjoint()
    }
}

/// `diag(C) (U1 ⊗ U2)` held in factored form; never materialized unless
/// [`CoupledPropagator::to_dense`] is called.
#[derive(Clone, Debug)]
pub struct CoupledPropagator {
    u1: CMatrix,
    u2: CMatrix,
    u2_t: CMatrix,
    u2_conj: CMatrix,
    phases: CMatrix,
}

impl CoupledPropagator {
    pub fn from_parts(u1: &ComplexOperator, u2: &ComplexOperator, phases: &[C64]) -> Result<Self> {
        let (n1, n2) = (u1.dim(), u2.dim());
        if phases.len() != n1 * n2 {
            return Err(Error::DimensionMismatch {
                expected: n1 * n2,
                got: phases.len(),
            });
        }
        let u2m = u2.matrix().clone();
        Ok(CoupledPropagator {
            u1: u1.matrix().clone(),
            u2_t: u2m.transpose(),
            u2_conj: u2m.map(|z| z.conj()),
            u2: u2m,
            phases: linalg::reshape_bipartite(phases, n1, n2),
        })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.u1.nrows(), self.u2.nrows())
    }

    pub fn u1(&self) -> &CMatrix {
        &self.u1
    }

    pub fn u2(&self) -> &CMatrix {
        &self.u2
    }

    /// Multiplies every factor by `exp(i phi)` (applied to `U1`).
    pub fn with_global_phase(&self, phi: f64) -> Self {
        let mut out = self.clone();
        out.u1 *= C64::from_polar(1.0, phi);
        out
    }

    /// Forward step on a coefficient matrix `M[j1, j2]`.
    pub fn forward_coefficients(&self, m: &CMatrix) -> CMatrix {
        let mut out = &self.u1 * m * &self.u2_t;
        out.component_mul_assign(&self.phases);
        out
    }

    pub fn backward_coefficients(&self, m: &CMatrix) -> CMatrix {
        let phased = m.zip_map(&self.phases, |a, c| a * c.conj());
        self.u1.ad_mul(&phased) * &self.u2_conj
    }

    pub fn to_dense(&self) -> Result<ComplexOperator> {
        let (n1, n2) = self.dims();
        let dim = n1 * n2;
        if dim > MAX_DENSE_DIM {
            return Err(Error::DimensionTooLarge {
                dim,
                max: MAX_DENSE_DIM,
            });
        }
        let mut m = linalg::kron(&self.u1, &self.u2);
        for r in 0..dim {
            let c = self.phases[(r / n2, r % n2)];
            m.row_mut(r).iter_mut().for_each(|x| *x *= c);
        }
        ComplexOperator::new(m)
    }

    /// `max |U^dagger U - I|` without forming the `n1 n2` square matrix:
    /// `(U^dagger U)[(k1 k2), (l1 l2)] = sum_j1 conj(U1[j1,k1]) U1[j1,l1] B_j1[k2, l2]`
    /// with `B_j1 = U2^dagger diag(|C[j1, .]|^2) U2`.
    pub fn unitarity_defect(&self) -> f64 {
        let (n1, n2) = self.dims();
        let blocks: Vec<CMatrix> = (0..n1)
            .map(|j1| {
                let mut weighted = self.u2.clone();
                for j2 in 0..n2 {
                    let w = self.phases[(j1, j2)].norm_sqr();
                    weighted.row_mut(j2).scale_mut(w);
                }
                self.u2.ad_mul(&weighted)
            })
            .collect();
        (0..n1)
            .into_par_iter()
            .map(|k1| {
                let mut worst = 0.0_f64;
                for l1 in 0..n1 {
                    let mut acc = CMatrix::zeros(n2, n2);
                    for (j1, block) in blocks.iter().enumerate() {
                        let a = self.u1[(j1, k1)].conj() * self.u1[(j1, l1)];
                        acc.zip_apply(block, |x, b| *x += a * b);
                    }
                    if k1 == l1 {
                        for d in 0..n2 {
                            acc[(d, d)] -= C64::new(1.0, 0.0);
                        }
                    }
                    worst = worst.max(linalg::max_abs(&acc));
                }
                worst
            })
            .reduce(|| 0.0, f64::max)
    }
}

impl Floquet for CoupledPropagator {
    fn dim(&self) -> usize {
        let (n1, n2) = self.dims();
        n1 * n2
    }

    fn forward(&self, v: &CVector) -> CVector {
        let (n1, n2) = self.dims();
        let m = linalg::reshape_bipartite(v.as_slice(), n1, n2);
        linalg::flatten_bipartite(&self.forward_coefficients(&m))
    }

    fn backward(&self, v: &CVector) -> CVector {
        let (n1, n2) = self.dims();
        let m = linalg::reshape_bipartite(v.as_slice(), n1, n2);
        linalg::flatten_bipartite(&self.backward_coefficients(&m))
    }
}

/// Builds the factored 2-DOF propagator `diag(C) (U1 ⊗ U2)`. The coupling
/// phase is indexed by the output (row) indices.
pub fn propagator_2d(spec: &CoupledSpec) -> Result<CoupledPropagator> {
    let u1 = propagator_1d(&spec.spec1, spec.n)?;
    let u2 = propagator_1d(&spec.spec2, spec.n)?;
    CoupledPropagator::from_parts(&u1, &u2, &coupling_phases(spec.n, spec.kc))
}

/// Structured application of `diag(C)(U1 ⊗ U2)` to a state.
pub fn apply_propagator_structured(
    u1: &ComplexOperator,
    u2: &ComplexOperator,
    c_diag: &[C64],
    target: &StateVector,
) -> Result<StateVector> {
    let prop = CoupledPropagator::from_parts(u1, u2, c_diag)?;
    check_len(prop.dim(), target.dim())?;
    Ok(prop.forward_state(target))
}

/// Structured both-sided application `U A U^dagger` to an operator.
pub fn apply_propagator_structured_operator(
    u1: &ComplexOperator,
    u2: &ComplexOperator,
    c_diag: &[C64],
    target: &ComplexOperator,
) -> Result<ComplexOperator> {
    let prop = CoupledPropagator::from_parts(u1, u2, c_diag)?;
    check_len(prop.dim(), target.dim())?;
    ComplexOperator::new(prop.schrodinger_step(target.matrix()))
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dim(n: usize) -> HilbertDim {
        HilbertDim::new(n).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(matches!(
            MapSpec::new([[2, 1], [1, 2]], 0.0),
            Err(Error::InvalidSpec(_))
        ));
        assert!(matches!(
            MapSpec::new([[1, 1], [0, 1]], 0.0),
            Err(Error::UnsupportedMap(_))
        ));
        assert_eq!(
            MapSpec::new([[2, 1], [3, 2]], 0.25).unwrap().kind(),
            MapKind::Hyperbolic
        );
        assert_eq!(MapSpec::new([[0, 1], [-1, 0]], 0.25).unwrap().kind(), MapKind::Elliptic);
        assert!(CoupledSpec::new(MapSpec::hyperbolic(0.0), MapSpec::hyperbolic(0.0), f64::NAN, dim(4)).is_err());
    }

    #[test]
    fn m12_zero_is_unsupported() {
        let spec = MapSpec::new([[3, 0], [1, 1]], 0.0);
        // trace 4, det 3: rejected as non-unimodular before reaching M12
        assert!(spec.is_err());
        let spec = MapSpec {
            m: [[-1, 0], [5, -1]],
            k: 0.0,
        };
        assert!(matches!(propagator_1d(&spec, dim(4)), Err(Error::UnsupportedMap(_))));
        let bad = MapSpec {
            m: [[2, 1], [1, 2]],
            k: 0.0,
        };
        assert!(matches!(propagator_1d(&bad, dim(4)), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn unperturbed_propagators_unitary() {
        for spec in [MapSpec::hyperbolic(0.0), MapSpec::elliptic(0.0)] {
            let u = propagator_1d(&spec, dim(8)).unwrap();
            assert!(u.unitarity_defect() < 1e-10);
        }
    }

    #[test]
    fn coupling_entries() {
        let id = coupling_matrix(dim(4), 0.0).unwrap();
        assert!(linalg::identity_defect(id.matrix()) < 1e-15);
        assert!(coupling_phases(dim(16), 0.5)
            .iter()
            .all(|z| (z.norm() - 1.0).abs() < 1e-15));
        let c = coupling_phases(dim(64), 0.5);
        let expected = C64::from_polar(1.0, 64.0 * 0.5 / (2.0 * PI));
        assert!((c[0] - expected).norm() < 1e-14);
    }

    #[test]
    fn zero_coupling_is_kronecker() {
        let spec = CoupledSpec::new(MapSpec::hyperbolic(0.25), MapSpec::elliptic(0.25), 0.0, dim(4)).unwrap();
        let prop = propagator_2d(&spec).unwrap().to_dense().unwrap();
        let u1 = propagator_1d(&spec.spec1, spec.n).unwrap();
        let u2 = propagator_1d(&spec.spec2, spec.n).unwrap();
        let kron = linalg::kron(u1.matrix(), u2.matrix());
        assert_eq!(prop.matrix(), &kron);
    }

    #[test]
    fn dense_element_matches_scalar_formula() {
        // independent scalar evaluation of the propagator formula times coupling
        let n = 4usize;
        let (k, kc) = (0.25, 0.5);
        let spec = CoupledSpec::new(MapSpec::hyperbolic(k), MapSpec::hyperbolic(k), kc, dim(n)).unwrap();
        let dense = propagator_2d(&spec).unwrap().to_dense().unwrap();
        let nf = n as f64;
        let u_scalar = |j: f64, kk: f64| {
            let a = (C64::new(0.0, nf)).inv().sqrt();
            let phase = PI / nf * (2.0 * j * j - 2.0 * j * kk + 2.0 * kk * kk)
                + k * nf / (2.0 * PI) * (2.0 * PI * j / nf).cos();
            a * C64::from_polar(1.0, phase)
        };
        let c_scalar =
            |j1: f64, j2: f64| C64::from_polar(1.0, nf * kc / (2.0 * PI) * (2.0 * PI * (j1 + j2) / nf).cos());
        for &(j1, j2, k1, k2) in &[(0usize, 0usize, 0usize, 0usize), (1, 2, 3, 0), (3, 3, 1, 2)] {
            let expected =
                u_scalar(j1 as f64, k1 as f64) * u_scalar(j2 as f64, k2 as f64) * c_scalar(j1 as f64, j2 as f64);
            let got = dense.matrix()[(j1 * n + j2, k1 * n + k2)];
            assert!((got - expected).norm() < 1e-12, "{got} vs {expected}");
        }
    }

    #[test]
    fn structured_unitarity_matches_dense() {
        let spec = CoupledSpec::new(MapSpec::hyperbolic(0.25), MapSpec::elliptic(0.25), 0.5, dim(8)).unwrap();
        let prop = propagator_2d(&spec).unwrap();
        let dense = prop.to_dense().unwrap();
        let d1 = prop.unitarity_defect();
        let d2 = dense.unitarity_defect();
        assert!(d1 < 1e-10 && d2 < 1e-10);
        assert!((d1 - d2).abs() < 1e-13);
    }

    #[test]
    fn structured_identity_action() {
        let id = ComplexOperator::identity(3);
        let phases = vec![C64::new(1.0, 0.0); 9];
        let psi = StateVector::normalized(CVector::from_fn(9, |k, _| C64::new(k as f64, 1.0))).unwrap();
        let out = apply_propagator_structured(&id, &id, &phases, &psi).unwrap();
        assert_eq!(out, psi);
        let op = ComplexOperator::identity(9);
        let out = apply_propagator_structured_operator(&id, &id, &phases, &op).unwrap();
        assert!(linalg::identity_defect(out.matrix()) < 1e-15);
        assert!(apply_propagator_structured(&id, &id, &phases[..4], &psi).is_err());
    }
}
