//! Entanglement scalars of reduced density matrices (natural logarithms).

use crate::error::{Error, Result};
use crate::hilbert::{DensityMatrix, HilbertDim, NEGATIVITY_TOL};
use crate::linalg;

/// `Tr(rho^2)`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.purity()
}

/// `S_L = 1 - Tr(rho^2)`.
pub fn linear_entropy(rho: &DensityMatrix) -> f64 {
    1.0 - purity(rho)
}

/// `S_2 = -ln Tr(rho^2)`.
pub fn renyi2(rho: &DensityMatrix) -> f64 {
    -purity(rho).ln()
}

/// Eigenvalues in `[-1e-10, 0)` are clipped to zero; anything more negative
/// is a numerical-health failure.
pub fn clipped_spectrum(rho: &DensityMatrix) -> Result<Vec<f64>> {
    let ev = rho.eigenvalues();
    if let Some(&min) = ev.first() {
        if min < -NEGATIVITY_TOL {
            return Err(Error::NumericalHealth(format!(
                "density matrix eigenvalue {min:.3e} below -{NEGATIVITY_TOL:e}"
            )));
        }
    }
    Ok(ev.into_iter().map(|e| e.max(0.0)).collect())
}

/// `S_VN = -sum lambda ln lambda`.
pub fn von_neumann(rho: &DensityMatrix) -> Result<f64> {
    Ok(linalg::shannon(clipped_spectrum(rho)?))
}

/// Random-matrix reference values for an `n x n` bipartite Haar-random pure
/// state.
#[derive(Clone, Debug, PartialEq)]
pub struct RmtReference {
    pub purity: f64,
    pub linear: f64,
    pub von_neumann: f64,
}

impl RmtReference {
    pub const PURITY_SOURCE: &'static str = "exact Haar mean 2n/(n^2+1)";
    pub const VON_NEUMANN_SOURCE: &'static str = "asymptotic Page value ln(n) - 1/2";
}

pub fn rmt_saturation(n: HilbertDim) -> RmtReference {
    let nf = n.get() as f64;
    let purity = 2.0 * nf / (nf * nf + 1.0);
    RmtReference {
        purity,
        linear: 1.0 - purity,
        von_neumann: nf.ln() - 0.5,
    }
}

/// Entropy scalars of one reduced density matrix at one time step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntropySample {
    pub t: usize,
    pub s_linear: f64,
    pub s_vn: f64,
    pub s_renyi2: f64,
    pub purity: f64,
}

impl EntropySample {
    pub fn from_reduced(t: usize, rho: &DensityMatrix) -> Result<Self> {
        let p = purity(rho);
        if !(p > 0.0 && p <= 1.0 + 1e-10) {
            return Err(Error::NumericalHealth(format!("purity {p} outside (0, 1]")));
        }
        Ok(EntropySample {
            t,
            s_linear: 1.0 - p,
            s_vn: von_neumann(rho)?,
            s_renyi2: -p.ln(),
            purity: p,
        })
    }

    /// Cross-identities every sample must satisfy.
    pub fn check(&self) -> Result<()> {
        if ((-self.s_renyi2).exp() - self.purity).abs() > 1e-12 {
            return Err(Error::NumericalHealth(format!(
                "exp(-S2) = {} differs from purity {}",
                (-self.s_renyi2).exp(),
                self.purity
            )));
        }
        if (self.s_linear - (1.0 - self.purity)).abs() > 1e-12 {
            return Err(Error::NumericalHealth("S_L != 1 - purity".into()));
        }
        if self.s_renyi2 > self.s_vn + 1e-10 {
            return Err(Error::NumericalHealth(format!(
                "Renyi-2 {} exceeds von Neumann {}",
                self.s_renyi2, self.s_vn
            )));
        }
        Ok(())
    }
}
