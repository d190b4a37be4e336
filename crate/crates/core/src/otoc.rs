//! Heisenberg evolution, out-of-time-ordered correlators, the 2-/4-point
//! split and the complete-basis Renyi sum.
//!
//! Two averaging conventions are supported:
//!
//! * [`Average::NormalizedTrace`]: `C = Tr(K K^dagger) / D` with `K = [A(t), B]`
//!   and `D` the total dimension; `C2 = Tr(A(t)^2 B^2)`, `C4 = Tr(A(t) B A(t) B)`
//!   and `C = -2 (C4 - C2) / D` exactly for hermitian `A`, `B`.
//! * [`Average::StateExpectation`]: `C = <K K^dagger>` in the initial state.
//!   The split is exact with the symmetrized 2-point term
//!   `C2 = (<A B B A> + <B A A B>) / 2`, `C4 = <A B A B>` and norm factor 1.

use rayon::prelude::*;

use crate::catmap::Floquet;
use crate::error::{Error, Result};
use crate::hilbert::{self, ComplexOperator, DensityMatrix, HilbertDim, StateVector, MAX_DENSE_DIM};
use crate::linalg::{self, CMatrix, CVector, C64};

/// Tolerance on `|purity - 1|` for treating a density matrix as pure.
pub const PURE_TOL: f64 = 1e-10;
/// Split-identity tolerance enforced on every emitted sample.
pub const SPLIT_TOL: f64 = 1e-8;

/// Operator acting on the bipartite space, stored in whichever form keeps
/// the vector path cheap.
#[derive(Clone, Debug)]
pub enum Observable {
    Dense(ComplexOperator),
    /// `a ⊗ b`.
    Local(ComplexOperator, ComplexOperator),
    /// `|psi><psi|`.
    Projector(StateVector),
}

impl Observable {
    /// `X ⊗ X`.
    pub fn x2d(n: HilbertDim) -> Self {
        let x = hilbert::position_operator(n);
        Observable::Local(x.clone(), x)
    }

    /// `P ⊗ P`.
    pub fn p2d(n: HilbertDim) -> Self {
        let p = hilbert::momentum_operator(n);
        Observable::Local(p.clone(), p)
    }

    pub fn dim(&self) -> usize {
        match self {
            Observable::Dense(op) => op.dim(),
            Observable::Local(a, b) => a.dim() * b.dim(),
            Observable::Projector(psi) => psi.dim(),
        }
    }

    pub fn apply(&self, v: &CVector) -> CVector {
        match self {
            Observable::Dense(op) => op.matrix() * v,
            Observable::Local(a, b) => {
                let m = linalg::reshape_bipartite(v.as_slice(), a.dim(), b.dim());
                linalg::flatten_bipartite(&(a.matrix() * m * b.matrix().transpose()))
            }
            Observable::Projector(psi) => {
                let overlap = linalg::inner(psi.as_slice(), v.as_slice());
                psi.amplitudes() * overlap
            }
        }
    }

    pub fn to_dense(&self) -> Result<ComplexOperator> {
        match self {
            Observable::Dense(op) => Ok(op.clone()),
            Observable::Local(a, b) => hilbert::tensor_product(a, b),
            Observable::Projector(psi) => {
                if psi.dim() > MAX_DENSE_DIM {
                    return Err(Error::DimensionTooLarge {
                        dim: psi.dim(),
                        max: MAX_DENSE_DIM,
                    });
                }
                ComplexOperator::new(DensityMatrix::pure(psi).into_matrix())
            }
        }
    }
}

/// Evolving operator `A`.
#[derive(Clone, Debug)]
pub enum OperatorA {
    X2d,
    P2d,
    Custom(ComplexOperator),
}

/// Static operator `B`.
#[derive(Clone, Debug)]
pub enum OperatorB {
    P2d,
    InitialDensity,
    Custom(ComplexOperator),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Average {
    StateExpectation,
    NormalizedTrace,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum OtocPath {
    /// Never materializes `A(t)`; requires a pure initial state and the
    /// state-expectation average.
    #[default]
    Vector,
    /// Dense `A(t)` for cross-validation.
    Dense,
}

#[derive(Clone, Debug)]
pub struct OtocConfig {
    pub operator_a: OperatorA,
    pub operator_b: OperatorB,
    pub average: Average,
    pub path: OtocPath,
}

impl OtocConfig {
    pub fn new(operator_a: OperatorA, operator_b: OperatorB, average: Average) -> Self {
        OtocConfig {
            operator_a,
            operator_b,
            average,
            path: OtocPath::Vector,
        }
    }

    pub fn with_path(mut self, path: OtocPath) -> Self {
        self.path = path;
        self
    }
}

#[derive(Clone, Debug)]
pub enum InitialState {
    Pure(StateVector),
    Mixed(DensityMatrix),
}

impl InitialState {
    pub fn dim(&self) -> usize {
        match self {
            InitialState::Pure(psi) => psi.dim(),
            InitialState::Mixed(rho) => rho.dim(),
        }
    }

    /// The state vector, if the state is pure (density matrices are tested
    /// by purity).
    pub fn as_pure(&self) -> Result<StateVector> {
        match self {
            InitialState::Pure(psi) => Ok(psi.clone()),
            InitialState::Mixed(rho) => rho.pure_state(PURE_TOL),
        }
    }

    pub fn density(&self) -> Result<DensityMatrix> {
        match self {
            InitialState::Pure(psi) => {
                if psi.dim() > MAX_DENSE_DIM {
                    return Err(Error::DimensionTooLarge {
                        dim: psi.dim(),
                        max: MAX_DENSE_DIM,
                    });
                }
                Ok(DensityMatrix::pure(psi))
            }
            InitialState::Mixed(rho) => Ok(rho.clone()),
        }
    }
}

impl From<StateVector> for InitialState {
    fn from(psi: StateVector) -> Self {
        InitialState::Pure(psi)
    }
}

impl From<DensityMatrix> for InitialState {
    fn from(rho: DensityMatrix) -> Self {
        InitialState::Mixed(rho)
    }
}

/// One OTOC evaluation with its correlator split.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrelatorSample {
    pub t: usize,
    pub c: f64,
    pub c2: f64,
    pub c4_real: f64,
    pub c4_imag: f64,
    /// `D` for the normalized trace, 1 for state expectations.
    pub norm_factor: f64,
}

impl CorrelatorSample {
    /// `|C + 2 (C4 - C2) / norm|`.
    pub fn split_residual(&self) -> f64 {
        (self.c + 2.0 * (self.c4_real - self.c2) / self.norm_factor).abs()
    }

    pub fn check(&self) -> Result<()> {
        if self.c < -1e-10 {
            return Err(Error::NumericalHealth(format!(
                "negative OTOC {} at t={}",
                self.c, self.t
            )));
        }
        let scale = self.c.abs().max(self.c2.abs() / self.norm_factor).max(1.0);
        if self.split_residual() > SPLIT_TOL * scale {
            return Err(Error::NumericalHealth(format!(
                "correlator split residual {:.3e} at t={}",
                self.split_residual(),
                self.t
            )));
        }
        Ok(())
    }
}

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

/// `A(t) = (U^dagger)^t A U^t`, one conjugation per step.
pub fn heisenberg_evolve<F: Floquet + ?Sized>(a: &ComplexOperator, u: &F, t: usize) -> Result<ComplexOperator> {
    check_dim(u.dim(), a.dim())?;
    let mut m = a.matrix().clone();
    for _ in 0..t {
        m = u.heisenberg_step(&m);
    }
    ComplexOperator::new(m)
}

/// `A(t) v = U^{-t} A U^t v`.
pub fn evolved_action<F: Floquet + ?Sized>(a: &Observable, u: &F, t: usize, v: &CVector) -> CVector {
    let mut w = v.clone();
    for _ in 0..t {
        w = u.forward(&w);
    }
    back_evolve(a.apply(&w), u, t)
}

fn back_evolve<F: Floquet + ?Sized>(mut w: CVector, u: &F, t: usize) -> CVector {
    for _ in 0..t {
        w = u.backward(&w);
    }
    w
}

fn resolve_a(a: &OperatorA, n: HilbertDim) -> Observable {
    match a {
        OperatorA::X2d => Observable::x2d(n),
        OperatorA::P2d => Observable::p2d(n),
        OperatorA::Custom(op) => Observable::Dense(op.clone()),
    }
}

fn resolve_b(b: &OperatorB, n: HilbertDim, init: &InitialState) -> Result<Observable> {
    Ok(match b {
        OperatorB::P2d => Observable::p2d(n),
        OperatorB::Custom(op) => Observable::Dense(op.clone()),
        OperatorB::InitialDensity => match init {
            InitialState::Pure(psi) => Observable::Projector(psi.clone()),
            InitialState::Mixed(rho) => match rho.pure_state(PURE_TOL) {
                Ok(psi) => Observable::Projector(psi),
                Err(_) => Observable::Dense(ComplexOperator::new(rho.matrix().clone())?),
            },
        },
    })
}

fn local_dim(total: usize) -> Result<HilbertDim> {
    let n = (total as f64).sqrt().round() as usize;
    if n * n != total {
        return Err(Error::InvalidInput(format!(
            "dimension {total} is not a square bipartite dimension"
        )));
    }
    HilbertDim::new(n)
}

/// Full OTOC `<[A(t), B][A(t), B]^dagger>` with its 2-/4-point split.
pub fn otoc_full<F: Floquet + ?Sized>(
    cfg: &OtocConfig,
    init: &InitialState,
    u: &F,
    t: usize,
) -> Result<CorrelatorSample> {
    let dim = u.dim();
    check_dim(dim, init.dim())?;
    let n = local_dim(dim)?;
    let a = resolve_a(&cfg.operator_a, n);
    let b = resolve_b(&cfg.operator_b, n, init)?;
    check_dim(dim, a.dim())?;
    check_dim(dim, b.dim())?;
    let use_vector = cfg.path == OtocPath::Vector && cfg.average == Average::StateExpectation;
    let sample = if use_vector {
        let psi = init.as_pure()?;
        vector_sample(&a, &b, &psi, u, t)
    } else {
        let at = heisenberg_evolve(&a.to_dense()?, u, t)?;
        dense_sample(at.matrix(), b.to_dense()?.matrix(), cfg.average, init, t)?
    };
    sample.check()?;
    Ok(sample)
}

fn vector_sample<F: Floquet + ?Sized>(
    a: &Observable,
    b: &Observable,
    psi: &StateVector,
    u: &F,
    t: usize,
) -> CorrelatorSample {
    let bpsi = b.apply(psi.amplitudes());
    let ab = evolved_action(a, u, t, &bpsi);
    let ba = b.apply(&evolved_action(a, u, t, psi.amplitudes()));
    sample_from_vectors(t, &ab, &ba)
}

/// With `ab = A(t) B psi` and `ba = B A(t) psi`:
/// `C = |ba - ab|^2`, `C2 = (|ab|^2 + |ba|^2)/2`, `C4 = <ba|ab>`.
fn sample_from_vectors(t: usize, ab: &CVector, ba: &CVector) -> CorrelatorSample {
    let diff = ba - ab;
    let c4 = linalg::inner(ba.as_slice(), ab.as_slice());
    CorrelatorSample {
        t,
        c: diff.norm_squared(),
        c2: 0.5 * (ab.norm_squared() + ba.norm_squared()),
        c4_real: c4.re,
        c4_imag: c4.im,
        norm_factor: 1.0,
    }
}

fn dense_sample(
    at: &CMatrix,
    b: &CMatrix,
    average: Average,
    init: &InitialState,
    t: usize,
) -> Result<CorrelatorSample> {
    let ab = at * b;
    let ba = b * at;
    let k = &ab - &ba;
    let kk = &k * k.adjoint();
    let abab = &ab * &ab;
    match average {
        Average::NormalizedTrace => {
            let d = at.nrows() as f64;
            let c2 = (at * at * b * b).trace();
            let c4 = abab.trace();
            Ok(CorrelatorSample {
                t,
                c: kk.trace().re / d,
                c2: c2.re,
                c4_real: c4.re,
                c4_imag: c4.im,
                norm_factor: d,
            })
        }
        Average::StateExpectation => {
            let rho = init.density()?;
            let r = rho.matrix();
            let tr = |m: &CMatrix| -> C64 { (r * m).trace() };
            let c2 = 0.5 * (tr(&(&ab * &ba)) + tr(&(&ba * &ab)));
            let c4 = tr(&abab);
            Ok(CorrelatorSample {
                t,
                c: tr(&kk).re,
                c2: c2.re,
                c4_real: c4.re,
                c4_imag: c4.im,
                norm_factor: 1.0,
            })
        }
    }
}

/// `(C2, C4)` for explicit operators under the given average.
pub fn correlators_2_4<F: Floquet + ?Sized>(
    a: &ComplexOperator,
    b: &ComplexOperator,
    u: &F,
    t: usize,
    average: Average,
    init: &InitialState,
) -> Result<(f64, C64)> {
    check_dim(u.dim(), a.dim())?;
    check_dim(u.dim(), b.dim())?;
    let at = heisenberg_evolve(a, u, t)?;
    let s = dense_sample(at.matrix(), b.matrix(), average, init, t)?;
    Ok((s.c2, C64::new(s.c4_real, s.c4_imag)))
}

/// Vector-path samples for `t = 0..=t_max`. Forward trajectories are shared;
/// the back-evolution for each `t` runs in parallel and is reduced in order.
pub fn otoc_series<F: Floquet + ?Sized>(
    a: &Observable,
    b: &Observable,
    psi: &StateVector,
    u: &F,
    t_max: usize,
) -> Result<Vec<CorrelatorSample>> {
    let dim = u.dim();
    check_dim(dim, psi.dim())?;
    check_dim(dim, a.dim())?;
    check_dim(dim, b.dim())?;
    let mut fwd_psi = Vec::with_capacity(t_max + 1);
    let mut fwd_bpsi = Vec::with_capacity(t_max + 1);
    fwd_psi.push(psi.amplitudes().clone());
    fwd_bpsi.push(b.apply(psi.amplitudes()));
    for s in 0..t_max {
        fwd_psi.push(u.forward(&fwd_psi[s]));
        fwd_bpsi.push(u.forward(&fwd_bpsi[s]));
    }
    let samples: Vec<CorrelatorSample> = (0..=t_max)
        .into_par_iter()
        .map(|t| {
            let ab = back_evolve(a.apply(&fwd_bpsi[t]), u, t);
            let ba = b.apply(&back_evolve(a.apply(&fwd_psi[t]), u, t));
            sample_from_vectors(t, &ab, &ba)
        })
        .collect();
    for s in &samples {
        s.check()?;
    }
    Ok(samples)
}

/// Orthonormal (Hilbert-Schmidt) operator basis of one subsystem.
#[derive(Clone, Debug)]
pub struct OperatorBasis {
    n: usize,
    elements: Vec<CMatrix>,
}

impl OperatorBasis {
    /// `{ U^a V^b / sqrt(n) : a, b in 0..n }`.
    pub fn clock_shift(n: HilbertDim) -> Self {
        let nn = n.get();
        let u = hilbert::clock_operator(n).into_matrix();
        let v = hilbert::shift_operator(n).into_matrix();
        let scale = C64::from(1.0 / (nn as f64).sqrt());
        let mut u_pows = vec![CMatrix::identity(nn, nn)];
        let mut v_pows = vec![CMatrix::identity(nn, nn)];
        for k in 1..nn {
            u_pows.push(&u_pows[k - 1] * &u);
            v_pows.push(&v_pows[k - 1] * &v);
        }
        let elements = u_pows
            .iter()
            .flat_map(|ua| v_pows.iter().map(move |vb| ua * vb * scale))
            .collect();
        OperatorBasis { n: nn, elements }
    }

    /// Validates completeness (`n^2` elements) and orthonormality to 1e-10.
    pub fn new(n: usize, elements: Vec<CMatrix>) -> Result<Self> {
        if elements.len() != n * n {
            return Err(Error::IncompleteBasis(format!(
                "{} elements, need {}",
                elements.len(),
                n * n
            )));
        }
        if elements.iter().any(|e| e.shape() != (n, n)) {
            return Err(Error::IncompleteBasis("element shape mismatch".into()));
        }
        for (i, ei) in elements.iter().enumerate() {
            for (j, ej) in elements.iter().enumerate().skip(i) {
                let ip = ei.ad_mul(ej).trace();
                let target = if i == j { 1.0 } else { 0.0 };
                if (ip - C64::from(target)).norm() > 1e-10 {
                    return Err(Error::IncompleteBasis(format!(
                        "<e{i}, e{j}> = {ip}, expected {target}"
                    )));
                }
            }
        }
        Ok(OperatorBasis { n, elements })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }

    /// Scalar prefactor fixed by the analytically forced case: a product
    /// state at `t = 0` has unit reduced purity, so the prefactor is the
    /// inverse raw sum on `|0> ⊗ |0>`.
    pub fn calibration(&self) -> f64 {
        let raw: f64 = self.elements.iter().map(|m| m[(0, 0)].norm_sqr()).sum();
        1.0 / raw
    }
}

/// `sum_M <M(t) rho0 M(t)^dagger rho0> = sum_M |<psi0| M(t) |psi0>|^2` over a
/// complete orthonormal basis `M = I ⊗ m` of subsystem 2; equals
/// `Tr rho_1(t)^2 = exp(-S_2)` for a pure initial state.
pub fn otoc_re_sum<F: Floquet + ?Sized>(init: &InitialState, u: &F, t: usize, basis: &OperatorBasis) -> Result<f64> {
    let psi = init.as_pure()?;
    let dim = u.dim();
    check_dim(dim, psi.dim())?;
    let n1 = dim / basis.n();
    check_dim(dim, n1 * basis.n())?;
    let prefactor = basis.calibration();
    let mut fwd = psi.amplitudes().clone();
    for _ in 0..t {
        fwd = u.forward(&fwd);
    }
    let terms: Vec<f64> = basis
        .elements()
        .par_iter()
        .map(|m| {
            let op = Observable::Local(
                ComplexOperator::identity(n1),
                ComplexOperator::new(m.clone()).expect("basis elements are square"),
            );
            let mt_psi = back_evolve(op.apply(&fwd), u, t);
            linalg::inner(psi.as_slice(), mt_psi.as_slice()).norm_sqr()
        })
        .collect();
    Ok(prefactor * terms.iter().sum::<f64>())
}

/// Scales `series` by the nonnegative least-squares factor
/// `alpha = max(0, sum s r / sum s^2)` against `reference`.
pub fn rescale_for_comparison(series: &[f64], reference: &[f64]) -> Result<(Vec<f64>, f64)> {
    if series.len() != reference.len() {
        return Err(Error::InvalidInput(format!(
            "series length {} != reference length {}",
            series.len(),
            reference.len()
        )));
    }
    let ss: f64 = series.iter().map(|s| s * s).sum();
    if ss.is_nan() || ss <= 0.0 {
        return Err(Error::InvalidInput("cannot rescale an all-zero series".into()));
    }
    if reference.iter().all(|&r| r == 0.0) {
        return Err(Error::InvalidInput("reference series is identically zero".into()));
    }
    let sr: f64 = series.iter().zip(reference).map(|(s, r)| s * r).sum();
    let alpha = (sr / ss).max(0.0);
    Ok((series.iter().map(|s| alpha * s).collect(), alpha))
}
