//! Operator-Schmidt spectra, the Wigner separability entropy and a discrete
//! Wigner function on the `2n x 2n` half-integer lattice.
//!
//! Reflection convention, per degree of freedom, for lattice indices
//! `q, p in 0..2n` (phase-space point `(q, p) / 2n`):
//!
//! ```text
//! R(q, p) |l> = exp(-i pi p (2l - q) / n) |q - l mod n>
//! W(q, p)     = Tr[R(q, p) rho] / 2n
//! ```
//!
//! With this choice `W` is real, sums to 1, its marginals on the even
//! sublattice are the position and momentum probabilities, and
//! `sum_x W_rho W_sigma = Tr(rho sigma) / n` per degree of freedom.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hilbert::{DensityMatrix, HilbertDim, StateVector};
use crate::linalg::{self, CMatrix, C64};

/// Identifier written into output metadata.
pub const WIGNER_CONVENTION: &str =
    "reflection R(q,p)|l> = exp(-i pi p (2l-q)/n)|q-l mod n>, lattice (q,p)/2n, W = Tr[R rho]/2n per DOF";

/// Singular values below this are treated as zero.
pub const SIGMA_FLOOR: f64 = 1e-14;
/// Largest `n` for which a two-DOF grid is built by default.
pub const DEFAULT_TWO_DOF_MAX_N: usize = 8;
const IMAG_TOL: f64 = 1e-9;

/// Nonincreasing singular values plus their Frobenius norm.
#[derive(Clone, Debug, PartialEq)]
pub struct SchmidtSpectrum {
    sigmas: Vec<f64>,
    norm: f64,
}

impl SchmidtSpectrum {
    pub fn new(mut sigmas: Vec<f64>) -> Self {
        sigmas.sort_by(|a, b| b.total_cmp(a));
        let norm = sigmas.iter().map(|s| s * s).sum::<f64>().sqrt();
        SchmidtSpectrum { sigmas, norm }
    }

    pub fn sigmas(&self) -> &[f64] {
        &self.sigmas
    }

    /// `sqrt(sum sigma^2)` before normalization.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// `sigma / norm`, so the squares sum to one.
    pub fn normalized(&self) -> Vec<f64> {
        if self.norm == 0.0 {
            return vec![0.0; self.sigmas.len()];
        }
        self.sigmas.iter().map(|s| s / self.norm).collect()
    }
}

/// Realignment `R[(j1, k1), (j2, k2)] = rho[(j1, j2), (k1, k2)]`.
fn reshuffle(rho: &CMatrix, n1: usize, n2: usize) -> CMatrix {
    CMatrix::from_fn(n1 * n1, n2 * n2, |r, c| {
        let (j1, k1) = (r / n1, r % n1);
        let (j2, k2) = (c / n2, c % n2);
        rho[(j1 * n2 + j2, k1 * n2 + k2)]
    })
}

/// Operator-Schmidt spectrum of `rho` with respect to `dims = (n1, n2)`.
pub fn operator_schmidt(rho: &DensityMatrix, dims: (usize, usize)) -> Result<SchmidtSpectrum> {
    let (n1, n2) = dims;
    if n1 * n2 != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: n1 * n2,
            got: rho.dim(),
        });
    }
    let r = reshuffle(rho.matrix(), n1, n2);
    Ok(SchmidtSpectrum::new(linalg::singular_values(&r)))
}

/// `h = -sum s^2 ln s^2` over the normalized spectrum.
pub fn wse(spec: &SchmidtSpectrum) -> Result<f64> {
    if !spec.sigmas().iter().any(|&s| s > SIGMA_FLOOR) {
        return Err(Error::InvalidInput("all-zero Schmidt spectrum".into()));
    }
    let kept = SchmidtSpectrum::new(spec.sigmas().iter().copied().filter(|&s| s > SIGMA_FLOOR).collect());
    Ok(linalg::shannon(kept.normalized().into_iter().map(|s| s * s)))
}

/// Schmidt probabilities `lambda_i^2` of a bipartite pure state.
pub fn state_schmidt_probabilities(psi: &StateVector, dims: (usize, usize)) -> Result<Vec<f64>> {
    if dims.0 * dims.1 != psi.dim() {
        return Err(Error::DimensionMismatch {
            expected: dims.0 * dims.1,
            got: psi.dim(),
        });
    }
    let m = linalg::reshape_bipartite(psi.as_slice(), dims.0, dims.1);
    Ok(linalg::singular_values(&m).into_iter().map(|s| s * s).collect())
}

/// Pure-state WSE from the state Schmidt values: the operator-Schmidt values
/// of `|psi><psi|` are `lambda_i lambda_j`, so the normalized weights are
/// `p_i p_j` and the entropy is `2 S_VN(rho_1)`.
pub fn wse_pure_fast(psi: &StateVector, dims: (usize, usize)) -> Result<f64> {
    let norm = psi.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized(norm));
    }
    let probs = state_schmidt_probabilities(psi, dims)?;
    let floor2 = SIGMA_FLOOR * SIGMA_FLOOR;
    let mut h = 0.0;
    for &pi in &probs {
        for &pj in &probs {
            let w = pi * pj;
            if w > floor2 {
                h -= w * w.ln();
            }
        }
    }
    Ok(h)
}

/// Discrete Wigner function of one or two degrees of freedom.
#[derive(Clone, Debug, PartialEq)]
pub struct WignerGrid {
    pub n: HilbertDim,
    pub dof: usize,
    /// Row-major over `(q1, p1[, q2, p2])`, each axis of length `2n`.
    pub values: Vec<f64>,
    /// Largest imaginary part discarded.
    pub max_imag: f64,
}

impl WignerGrid {
    pub fn side(&self) -> usize {
        2 * self.n.get()
    }

    pub fn at(&self, q: usize, p: usize) -> f64 {
        debug_assert_eq!(self.dof, 1);
        self.values[q * self.side() + p]
    }

    /// Two-DOF grid as a `(2n)^2 x (2n)^2` matrix, rows `(q1, p1)`, columns `(q2, p2)`.
    pub fn as_bipartite_matrix(&self) -> Option<DMatrix<f64>> {
        (self.dof == 2).then(|| {
            let s = self.side() * self.side();
            DMatrix::from_row_slice(s, s, &self.values)
        })
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }
}

/// `F_q[p, l] = exp(-i pi p (2l - q) / n)` as a `2n x n` matrix.
fn reflection_phases(n: usize, q: usize) -> CMatrix {
    let period = 2 * n as i64;
    CMatrix::from_fn(2 * n, n, |p, l| {
        let e = (p as i64 * (2 * l as i64 - q as i64)).rem_euclid(period);
        C64::from_polar(1.0, -std::f64::consts::PI * e as f64 / n as f64)
    })
}

pub fn wigner_grid(rho: &DensityMatrix, n: HilbertDim) -> Result<WignerGrid> {
    wigner_grid_with_budget(rho, n, DEFAULT_TWO_DOF_MAX_N)
}

pub fn wigner_grid_with_budget(rho: &DensityMatrix, n: HilbertDim, two_dof_max_n: usize) -> Result<WignerGrid> {
    let nn = n.get();
    let m = rho.matrix();
    let (values, max_imag) = if rho.dim() == nn {
        one_dof_grid(m, nn)
    } else if rho.dim() == nn * nn {
        if nn > two_dof_max_n {
            return Err(Error::BudgetExceeded(format!(
                "two-DOF Wigner grid needs n <= {two_dof_max_n}, got {nn}"
            )));
        }
        two_dof_grid(m, nn)
    } else {
        return Err(Error::DimensionMismatch {
            expected: nn * nn,
            got: rho.dim(),
        });
    };
    if max_imag > IMAG_TOL {
        return Err(Error::NumericalHealth(format!(
            "Wigner imaginary residue {max_imag:.3e}"
        )));
    }
    Ok(WignerGrid {
        n,
        dof: if rho.dim() == nn { 1 } else { 2 },
        values,
        max_imag,
    })
}

fn one_dof_grid(m: &CMatrix, n: usize) -> (Vec<f64>, f64) {
    let side = 2 * n;
    let scale = 1.0 / side as f64;
    let mut values = vec![0.0; side * side];
    let mut max_imag = 0.0_f64;
    for q in 0..side {
        let f = reflection_phases(n, q);
        let g: Vec<C64> = (0..n).map(|l| m[(l, (q + 2 * n - l) % n)]).collect();
        for p in 0..side {
            let w: C64 = (0..n).map(|l| f[(p, l)] * g[l]).sum::<C64>() * scale;
            values[q * side + p] = w.re;
            max_imag = max_imag.max(w.im.abs());
        }
    }
    (values, max_imag)
}

fn two_dof_grid(m: &CMatrix, n: usize) -> (Vec<f64>, f64) {
    let side = 2 * n;
    let scale = C64::from(1.0 / (side * side) as f64);
    let phases: Vec<CMatrix> = (0..side).map(|q| reflection_phases(n, q)).collect();
    let rows: Vec<(Vec<f64>, f64)> = (0..side)
        .into_par_iter()
        .map(|q1| {
            // block[(p1, q2, p2)] for this q1
            let mut block = vec![0.0; side * side * side];
            let mut max_imag = 0.0_f64;
            for q2 in 0..side {
                let g = CMatrix::from_fn(n, n, |l1, l2| {
                    let r1 = (q1 + 2 * n - l1) % n;
                    let r2 = (q2 + 2 * n - l2) % n;
                    m[(l1 * n + l2, r1 * n + r2)]
                });
                let w = &phases[q1] * g * phases[q2].transpose() * scale;
                for p1 in 0..side {
                    for p2 in 0..side {
                        let z = w[(p1, p2)];
                        block[(p1 * side + q2) * side + p2] = z.re;
                        max_imag = max_imag.max(z.im.abs());
                    }
                }
            }
            (block, max_imag)
        })
        .collect();
    let mut values = Vec::with_capacity(side.pow(4));
    let mut max_imag = 0.0_f64;
    for (block, mi) in rows {
        values.extend(block);
        max_imag = max_imag.max(mi);
    }
    (values, max_imag)
}

/// Normalized spectra from the Wigner grid and from the operator-Schmidt
/// decomposition.
#[derive(Clone, Debug)]
pub struct CrosscheckReport {
    pub grid_spectrum: Vec<f64>,
    pub operator_spectrum: Vec<f64>,
    /// `max_i |a_i - b_i| / b_0` over both spectra, zero padded.
    pub max_rel_deviation: f64,
}

pub fn wigner_schmidt_crosscheck(rho: &DensityMatrix, dims: (usize, usize)) -> Result<CrosscheckReport> {
    if dims.0 != dims.1 {
        return Err(Error::InvalidInput(
            "Wigner cross-check needs equal subsystem dimensions".into(),
        ));
    }
    let n = HilbertDim::new(dims.0)?;
    let grid = wigner_grid(rho, n)?;
    let wmat = grid
        .as_bipartite_matrix()
        .ok_or_else(|| Error::InvalidInput("cross-check needs a two-DOF state".into()))?;
    let grid_spectrum = SchmidtSpectrum::new(linalg::singular_values_real(&wmat)).normalized();
    let operator_spectrum = operator_schmidt(rho, dims)?.normalized();
    let lead = operator_spectrum.first().copied().unwrap_or(0.0);
    if lead <= 0.0 {
        return Err(Error::InvalidInput("all-zero Schmidt spectrum".into()));
    }
    let len = grid_spectrum.len().max(operator_spectrum.len());
    let at = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
    let max_rel_deviation = (0..len)
        .map(|i| (at(&grid_spectrum, i) - at(&operator_spectrum, i)).abs() / lead)
        .fold(0.0, f64::max);
    Ok(CrosscheckReport {
        grid_spectrum,
        operator_spectrum,
        max_rel_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{self, Subsystem};
    use crate::linalg::CVector;
    use crate::states::{coherent_state, product_state, PhasePoint};
    use approx::assert_abs_diff_eq;

    fn bell() -> StateVector {
        let s = 1.0 / 2f64.sqrt();
        StateVector::new(CVector::from_vec(vec![
            C64::new(s, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(s, 0.0),
        ]))
        .unwrap()
    }

    #[test]
    fn product_density_is_rank_one() {
        let n = HilbertDim::new(3).unwrap();
        let psi = product_state(
            &coherent_state(n, PhasePoint::new(0.2, 0.3)),
            &coherent_state(n, PhasePoint::new(0.6, 0.1)),
        );
        let spec = operator_schmidt(&DensityMatrix::pure(&psi), (3, 3)).unwrap();
        assert!(spec.sigmas()[1] < 1e-12);
        assert_abs_diff_eq!(wse(&spec).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn bell_operator_schmidt() {
        // explicit reshuffle: R[(j1,k1),(j2,k2)] = delta_{j1 j2} delta_{k1 k2} / 2 = I_4 / 2,
        // so four singular values 1/2 (sum of squares = Tr rho^2 = 1)
        let rho = DensityMatrix::pure(&bell());
        let spec = operator_schmidt(&rho, (2, 2)).unwrap();
        for s in spec.sigmas() {
            assert_abs_diff_eq!(*s, 0.5, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(wse(&spec).unwrap(), 4f64.ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(
            wse_pure_fast(&bell(), (2, 2)).unwrap(),
            2.0 * 2f64.ln(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn bell_mixture_has_quarter_values() {
        // I/4 reshuffles to vec(I) vec(I)^T / 4: rank one, sigma = |vec I|^2 / 4 = 1/2
        let mixed = DensityMatrix::maximally_mixed(4);
        let spec = operator_schmidt(&mixed, (2, 2)).unwrap();
        assert_abs_diff_eq!(spec.sigmas()[0], 0.5, epsilon = 1e-12);
        assert!(spec.sigmas()[1] < 1e-12);
    }

    #[test]
    fn wse_edge_cases() {
        assert_eq!(wse(&SchmidtSpectrum::new(vec![0.7])).unwrap(), 0.0);
        let k = 5;
        let h = wse(&SchmidtSpectrum::new(vec![0.3; k])).unwrap();
        assert_abs_diff_eq!(h, (k as f64).ln(), epsilon = 1e-12);
        assert!(wse(&SchmidtSpectrum::new(vec![0.0, 0.0])).is_err());
        let spec = SchmidtSpectrum::new(vec![0.1, 0.5, 0.2]);
        assert_eq!(spec.sigmas(), &[0.5, 0.2, 0.1]);
        let sq: f64 = spec.normalized().iter().map(|s| s * s).sum();
        assert_abs_diff_eq!(sq, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn fast_path_rejects_unnormalized() {
        let raw = StateVector::from_raw(CVector::from_element(4, C64::new(1.0, 0.0)));
        assert!(matches!(wse_pure_fast(&raw, (2, 2)), Err(Error::NotNormalized(_))));
    }

    #[test]
    fn position_eigenstate_marginal() {
        let n = HilbertDim::new(4).unwrap();
        let grid = wigner_grid(&DensityMatrix::pure(&StateVector::basis(4, 0)), n).unwrap();
        for q in 0..8 {
            let col: f64 = (0..8).map(|p| grid.at(q, p)).sum();
            let expected = if q == 0 { 1.0 } else { 0.0 };
            assert_abs_diff_eq!(col, expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn maximally_mixed_grid_uniform_on_weighted_sublattice() {
        let n = HilbertDim::new(4).unwrap();
        let grid = wigner_grid(&DensityMatrix::maximally_mixed(4), n).unwrap();
        // even n: support on the (even, even) sublattice, uniform there
        let even = 1.0 / (n.get() * n.get()) as f64;
        for q in 0..8 {
            for p in 0..8 {
                let expected = if q % 2 == 0 && p % 2 == 0 { even } else { 0.0 };
                assert_abs_diff_eq!(grid.at(q, p), expected, epsilon = 1e-14);
            }
        }
        assert_abs_diff_eq!(grid.total(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn coherent_state_peak_location() {
        let n = HilbertDim::new(8).unwrap();
        let psi = coherent_state(n, PhasePoint::new(0.5, 0.5));
        let grid = wigner_grid(&DensityMatrix::pure(&psi), n).unwrap();
        let (imax, _) = grid
            .values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap();
        let (q, p) = (imax / 16, imax % 16);
        let (xq, xp) = (q as f64 / 16.0, p as f64 / 16.0);
        assert!((xq - 0.5).abs() <= 1.0 / 16.0 + 1e-12 && (xp - 0.5).abs() <= 1.0 / 16.0 + 1e-12);
    }

    #[test]
    fn two_dof_budget() {
        let n = HilbertDim::new(9).unwrap();
        let rho = DensityMatrix::maximally_mixed(81);
        assert!(matches!(wigner_grid(&rho, n), Err(Error::BudgetExceeded(_))));
        assert!(wigner_grid_with_budget(&DensityMatrix::maximally_mixed(9), n, 8).is_ok());
    }

    #[test]
    fn crosscheck_product_state_rank_one() {
        let n = HilbertDim::new(4).unwrap();
        let psi = product_state(
            &coherent_state(n, PhasePoint::new(0.3, 0.6)),
            &coherent_state(n, PhasePoint::new(0.5, 0.5)),
        );
        let rho = DensityMatrix::pure(&psi);
        let rep = wigner_schmidt_crosscheck(&rho, (4, 4)).unwrap();
        assert!(rep.grid_spectrum[1] < 1e-10 && rep.operator_spectrum[1] < 1e-10);
        assert!(rep.max_rel_deviation < 1e-6);
        let r1 = hilbert::partial_trace(&rho, (4, 4), Subsystem::First).unwrap();
        assert!(wigner_grid(&r1, n).is_ok());
    }
}
