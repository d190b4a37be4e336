//! Finite torus Hilbert space: clock/shift operators, discrete position and
//! momentum, the DFT basis change, tensor products and partial traces.
//!
//! Conventions:
//! - `<q_j|p_k> = exp(+2 pi i jk/n) / sqrt(n)`, so the momentum operator has
//!   eigenvalue `-sin(2 pi k/n)` on momentum index `k`.
//! - Bipartite index is `j1 * n2 + j2` (subsystem 1 is the outer index).

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, C64, I};

/// Largest dense operator dimension the crate will materialize.
pub const MAX_DENSE_DIM: usize = 4096;

const CLAIM_TOL: f64 = 1e-10;

/// Hilbert space dimension of one torus degree of freedom, `n = 1/(2 pi hbar)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HilbertDim(usize);

impl HilbertDim {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDimension(n));
        }
        Ok(HilbertDim(n))
    }

    #[inline]
    pub fn get(self) -> usize {
        self.0
    }

    /// Effective Planck constant `1/(2 pi n)`.
    pub fn hbar(self) -> f64 {
        1.0 / (2.0 * PI * self.0 as f64)
    }
}

impl TryFrom<usize> for HilbertDim {
    type Error = Error;

    fn try_from(n: usize) -> Result<Self> {
        HilbertDim::new(n)
    }
}

/// Which factor of a bipartite space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    First,
    Second,
}

/// Dense square complex operator.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexOperator {
    matrix: CMatrix,
}

impl ComplexOperator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                got: matrix.ncols(),
            });
        }
        Ok(ComplexOperator { matrix })
    }

    pub fn identity(dim: usize) -> Self {
        ComplexOperator {
            matrix: CMatrix::identity(dim, dim),
        }
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        ComplexOperator {
            matrix: CMatrix::from_diagonal(&CVector::from_column_slice(diag)),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn adjoint(&self) -> Self {
        ComplexOperator {
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn hermiticity_defect(&self) -> f64 {
        linalg::hermiticity_defect(&self.matrix)
    }

    /// `max |U^dagger U - I|`.
    pub fn unitarity_defect(&self) -> f64 {
        linalg::identity_defect(&(self.matrix.adjoint() * &self.matrix))
    }

    pub fn offdiagonal_max(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0_f64;
        for j in 0..n {
            for i in (0..n).filter(|&i| i != j) {
                worst = worst.max(self.matrix[(i, j)].norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        self.offdiagonal_max() <= tol
    }

    pub fn eigenvalues_hermitian(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.matrix)
    }

    pub fn apply(&self, v: &CVector) -> Result<CVector> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: v.len(),
            });
        }
        Ok(&self.matrix * v)
    }

    pub fn mul(&self, other: &ComplexOperator) -> Result<ComplexOperator> {
        if other.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(ComplexOperator {
            matrix: &self.matrix * &other.matrix,
        })
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }
}

/// Claimed operator properties are checked in debug builds only.
fn debug_claim_unitary(op: &ComplexOperator) {
    debug_assert!(
        op.dim() > 256 || op.is_unitary(CLAIM_TOL),
        "operator claimed unitary has defect {}",
        op.unitarity_defect()
    );
}

fn debug_claim_hermitian(op: &ComplexOperator) {
    debug_assert!(
        op.is_hermitian(CLAIM_TOL),
        "operator claimed hermitian has defect {}",
        op.hermiticity_defect()
    );
}

/// Unit-normalized state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amps: CVector,
}

const NORM_TOL: f64 = 1e-10;

impl StateVector {
    /// Accepts amplitudes that are already normalized.
    pub fn new(amps: CVector) -> Result<Self> {
        let norm = amps.norm();
        if amps.is_empty() || (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(StateVector { amps })
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn normalized(amps: CVector) -> Result<Self> {
        let norm = amps.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::NotNormalized(norm));
        }
        Ok(StateVector {
            amps: amps / C64::from(norm),
        })
    }

    /// Computational basis state `|k>`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut amps = CVector::zeros(dim);
        amps[k] = C64::new(1.0, 0.0);
        StateVector { amps }
    }

    pub(crate) fn from_raw(amps: CVector) -> Self {
        StateVector { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    pub fn as_slice(&self) -> &[C64] {
        self.amps.as_slice()
    }

    pub fn into_amplitudes(self) -> CVector {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    pub fn inner(&self, other: &StateVector) -> C64 {
        linalg::inner(self.as_slice(), other.as_slice())
    }

    /// `<psi|A|psi>`.
    pub fn expectation(&self, op: &ComplexOperator) -> Result<C64> {
        let a_psi = op.apply(&self.amps)?;
        Ok(linalg::inner(self.as_slice(), a_psi.as_slice()))
    }
}

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

const DENSITY_TOL: f64 = 1e-12;
/// Lowest eigenvalue tolerated before a density matrix is rejected.
pub const NEGATIVITY_TOL: f64 = 1e-10;

impl DensityMatrix {
    /// Checks hermiticity and trace (to 1e-12, scaled by the largest entry).
    /// Positivity is checked separately by [`DensityMatrix::min_eigenvalue`].
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidDensity("not square".into()));
        }
        let scale = linalg::max_abs(&matrix).max(1.0);
        let herm = linalg::hermiticity_defect(&matrix);
        if herm > DENSITY_TOL * scale {
            return Err(Error::InvalidDensity(format!("hermiticity defect {herm:.3e}")));
        }
        let tr = matrix.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > DENSITY_TOL * matrix.nrows() as f64 {
            return Err(Error::InvalidDensity(format!("trace {tr}")));
        }
        Ok(DensityMatrix { matrix })
    }

    pub(crate) fn from_raw(matrix: CMatrix) -> Self {
        DensityMatrix { matrix }
    }

    /// `|psi><psi|`.
    pub fn pure(psi: &StateVector) -> Self {
        let v = psi.amplitudes();
        DensityMatrix {
            matrix: v * v.adjoint(),
        }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix {
            matrix: CMatrix::identity(dim, dim) / C64::from(dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    /// `Tr(rho^2)`, computed as the Frobenius norm squared.
    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    /// If `rho = |psi><psi|` to within `tol` in purity, recover `psi` (up to a
    /// global phase) from the column with the largest diagonal weight.
    pub fn pure_state(&self, tol: f64) -> Result<StateVector> {
        let purity = self.purity();
        if (purity - 1.0).abs() > tol {
            return Err(Error::NotPure(purity));
        }
        let k = (0..self.dim())
            .max_by(|&a, &b| self.matrix[(a, a)].re.total_cmp(&self.matrix[(b, b)].re))
            .unwrap_or(0);
        let col = self.matrix.column(k).into_owned();
        StateVector::normalized(col)
    }
}

fn check_dim(n: HilbertDim) -> usize {
    n.get()
}

/// Schwinger shift `V|q> = |q+1 mod n>`.
pub fn shift_operator(n: HilbertDim) -> ComplexOperator {
    let n = check_dim(n);
    let mut m = CMatrix::zeros(n, n);
    for q in 0..n {
        m[((q + 1) % n, q)] = C64::new(1.0, 0.0);
    }
    let op = ComplexOperator { matrix: m };
    debug_claim_unitary(&op);
    op
}

/// Clock `U = diag(exp(2 pi i q/n))`.
pub fn clock_operator(n: HilbertDim) -> ComplexOperator {
    let nn = check_dim(n);
    let diag: Vec<C64> = (0..nn)
        .map(|q| C64::from_polar(1.0, 2.0 * PI * q as f64 / nn as f64))
        .collect();
    let op = ComplexOperator::from_diagonal(&diag);
    debug_claim_unitary(&op);
    op
}

/// `X = (U - U^dagger)/2i = diag(sin(2 pi q/n))`.
pub fn position_operator(n: HilbertDim) -> ComplexOperator {
    let nn = n.get();
    let diag: Vec<C64> = (0..nn)
        .map(|q| C64::new((2.0 * PI * q as f64 / nn as f64).sin(), 0.0))
        .collect();
    let op = ComplexOperator::from_diagonal(&diag);
    debug_claim_hermitian(&op);
    op
}

/// `P = (V - V^dagger)/2i`.
pub fn momentum_operator(n: HilbertDim) -> ComplexOperator {
    let v = shift_operator(n).into_matrix();
    let m = (&v - v.adjoint()) / (C64::new(2.0, 0.0) * I);
    let op = ComplexOperator { matrix: m };
    debug_claim_hermitian(&op);
    op
}

/// Discrete Fourier matrix `F[j,k] = exp(+2 pi i jk/n)/sqrt(n)`; column `k`
/// is the momentum eigenstate `|p_k>` in the position basis.
pub fn dft_matrix(n: HilbertDim) -> ComplexOperator {
    let nn = n.get();
    let scale = 1.0 / (nn as f64).sqrt();
    let m = CMatrix::from_fn(nn, nn, |j, k| {
        let phase = 2.0 * PI * ((j * k) % nn) as f64 / nn as f64;
        C64::from_polar(scale, phase)
    });
    let op = ComplexOperator { matrix: m };
    debug_claim_unitary(&op);
    op
}

/// Kronecker product `a ⊗ b` with `a` on the outer (slow) index.
pub fn tensor_product(a: &ComplexOperator, b: &ComplexOperator) -> Result<ComplexOperator> {
    tensor_product_with_limit(a, b, MAX_DENSE_DIM)
}

pub fn tensor_product_with_limit(a: &ComplexOperator, b: &ComplexOperator, max_dim: usize) -> Result<ComplexOperator> {
    let dim = a.dim().checked_mul(b.dim()).ok_or(Error::DimensionTooLarge {
        dim: usize::MAX,
        max: max_dim,
    })?;
    if dim > max_dim {
        return Err(Error::DimensionTooLarge { dim, max: max_dim });
    }
    Ok(ComplexOperator {
        matrix: linalg::kron(&a.matrix, &b.matrix),
    })
}

fn check_bipartite(dim: usize, dims: (usize, usize)) -> Result<()> {
    if dims.0 * dims.1 != dim {
        return Err(Error::DimensionMismatch {
            expected: dims.0 * dims.1,
            got: dim,
        });
    }
    Ok(())
}

/// Reduced density matrix of `keep`, tracing out the other factor.
pub fn partial_trace(rho: &DensityMatrix, dims: (usize, usize), keep: Subsystem) -> Result<DensityMatrix> {
    check_bipartite(rho.dim(), dims)?;
    let (n1, n2) = dims;
    let m = rho.matrix();
    let out = match keep {
        Subsystem::First => CMatrix::from_fn(n1, n1, |a, b| (0..n2).map(|j| m[(a * n2 + j, b * n2 + j)]).sum()),
        Subsystem::Second => CMatrix::from_fn(n2, n2, |a, b| (0..n1).map(|j| m[(j * n2 + a, j * n2 + b)]).sum()),
    };
    Ok(DensityMatrix::from_raw(out))
}

/// Reduced density matrix of a pure state via the coefficient matrix
/// `M[j1, j2]`: `rho1 = M M^dagger`, `rho2 = (M^dagger M)^T`.
pub fn partial_trace_pure(psi: &StateVector, dims: (usize, usize), keep: Subsystem) -> Result<DensityMatrix> {
    check_bipartite(psi.dim(), dims)?;
    let m = linalg::reshape_bipartite(psi.as_slice(), dims.0, dims.1);
    Ok(DensityMatrix::from_raw(reduced_from_coefficients(&m, keep)))
}

pub(crate) fn reduced_from_coefficients(m: &CMatrix, keep: Subsystem) -> CMatrix {
    match keep {
        Subsystem::First => m * m.adjoint(),
        Subsystem::Second => (m.adjoint() * m).transpose(),
    }
}
